"""Run configuration: a strict JSON document, validated into frozen dataclasses.

Unknown keys, wrong types and invariant violations are all collected and
reported together, each tagged with its dotted field path
(``problem.u0.singular.center``, ``params.ladder[4]``).
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, replace
from pathlib import Path
from typing import Any, Literal, Optional

from pydantic import ConfigDict, Field as PField, TypeAdapter, ValidationError, model_validator
from pydantic.dataclasses import dataclass

from .errors import ConfigError
from .fieldio import read_sidecar
from .mollify import MIN_POINTS_PER_EPS, SingularDatum, default_ladder
from .spectral import Grid
from .vws_lab import ESTIMATES

EXPERIMENTS = ("solve", "sweep", "twin", "coherence", "duhamel-check", "probes", "bounds")
# experiments that integrate a user-described problem
PROBLEM_EXPERIMENTS = ("solve", "sweep", "twin", "coherence", "duhamel-check")

Kernel = Literal["compact_bump", "gaussian"]
DatumKind = Literal["delta", "delta_prime", "delta_squared", "heaviside", "smooth_reference"]

STRICT = ConfigDict(extra="forbid", strict=True, frozen=True)


@dataclass(config=STRICT)
class GridBlock:
    dim: int
    n: int
    L: float

    def grid(self) -> Grid:
        return Grid(self.dim, self.n, self.L)


@dataclass(config=STRICT)
class SingularEntry:
    kind: DatumKind
    center: tuple[float, ...]
    amplitude: float = 1.0
    mode: int = 1

    def datum(self) -> SingularDatum:
        return SingularDatum(self.kind, self.center, self.amplitude, self.mode)


@dataclass(config=STRICT)
class Coefficient:
    """Exactly one of a constant, a tabulated field file, or a singular entry."""

    constant: Optional[float] = None
    file: Optional[str] = None
    singular: Optional[SingularEntry] = None

    @model_validator(mode="after")
    def _one_source(self):
        given = [k for k in ("constant", "file", "singular") if getattr(self, k) is not None]
        if len(given) != 1:
            raise ValueError(f"give exactly one of constant, file, singular (got {given or 'none'})")
        return self


@dataclass(config=STRICT)
class TimeProfile:
    """amplitude * cos/sin(omega t + phase), or the constant amplitude."""

    kind: Literal["constant", "cos", "sin"] = "constant"
    omega: float = 0.0
    phase: float = 0.0
    amplitude: float = 1.0

    def __call__(self, t: float) -> float:
        if self.kind == "constant":
            return self.amplitude
        fn = math.cos if self.kind == "cos" else math.sin
        return self.amplitude * fn(self.omega * t + self.phase)


@dataclass(config=STRICT)
class ForcingBlock:
    spatial: Coefficient
    profile: TimeProfile = PField(default_factory=TimeProfile)


def _const(v: float) -> Coefficient:
    return Coefficient(constant=v)


@dataclass(config=STRICT)
class ProblemBlock:
    s: float
    T: float
    u0: Coefficient
    u1: Coefficient = PField(default_factory=lambda: _const(0.0))
    g: Coefficient = PField(default_factory=lambda: _const(1.0))
    m: Coefficient = PField(default_factory=lambda: _const(0.0))
    b: Coefficient = PField(default_factory=lambda: _const(0.0))
    f: Optional[ForcingBlock] = None

    def slots(self) -> dict:
        out = {k: getattr(self, k) for k in ("g", "m", "b", "u0", "u1")}
        if self.f is not None:
            out["f"] = self.f.spatial
        return out


@dataclass(config=STRICT)
class SolverBlock:
    cfl_fraction: float = 0.5
    snapshot_stride: int = 1
    dt_override: Optional[float] = None


@dataclass(config=STRICT)
class MollifierBlock:
    """Regularization used by single runs (solve, duhamel-check) with singular data."""

    kernel: Kernel = "compact_bump"
    epsilon: Optional[float] = None


# experiment-specific blocks ------------------------------------------------


@dataclass(config=STRICT)
class SolveParams:
    energy_tolerance: float = 1e-6
    monotone_slack: float = 1e-8


@dataclass(config=STRICT)
class SweepParams:
    ladder: Optional[tuple[float, ...]] = None
    kernel: Kernel = "compact_bump"
    norm_selector: Literal[1, 2, 3] = 1
    expected_slope: Optional[float] = None
    slope_tolerance: float = 0.1


@dataclass(config=STRICT)
class TwinParams:
    ladder: Optional[tuple[float, ...]] = None
    kernel_a: Kernel = "compact_bump"
    kernel_b: Kernel = "gaussian"
    margin: float = 1.0
    norm_selector: Literal[1, 2, 3] = 1


@dataclass(config=STRICT)
class CoherenceParams:
    ladder: Optional[tuple[float, ...]] = None
    kernel: Kernel = "compact_bump"
    reference_kind: Literal["analytic_modal", "fine_eps_refined"] = "analytic_modal"
    tolerance: float = 1e-3


@dataclass(config=STRICT)
class DuhamelParams:
    n_tau: Optional[int] = None
    tolerance: float = 1e-4


@dataclass(config=STRICT)
class ProbesParams:
    kind: Literal["sobolev", "kato_ponce", "both"] = "both"
    dim: int = 2
    s: float = 0.5
    n_values: tuple[int, ...] = (64, 128)
    n_samples: int = 200
    band: Optional[int] = None
    relative_tolerance: float = 0.1


@dataclass(config=STRICT)
class BoundsParams:
    estimate: Literal["E1", "E2", "both"] = "both"
    n_samples: int = 50
    c_star: Optional[float] = None
    scale_factors: tuple[float, ...] = (10.0, 0.37)
    scale_tolerance: float = 1e-10

    def estimates(self) -> tuple:
        return tuple(ESTIMATES) if self.estimate == "both" else (self.estimate,)


PARAMS = {
    "solve": SolveParams, "sweep": SweepParams, "twin": TwinParams, "coherence": CoherenceParams,
    "duhamel-check": DuhamelParams, "probes": ProbesParams, "bounds": BoundsParams,
}


@dataclass(config=ConfigDict(extra="forbid", strict=True, frozen=True, arbitrary_types_allowed=True))
class RunConfig:
    experiment: Literal["solve", "sweep", "twin", "coherence", "duhamel-check", "probes", "bounds"]
    seed: int = 0
    output_dir: str = "runs"
    grid: Optional[GridBlock] = None
    problem: Optional[ProblemBlock] = None
    solver: SolverBlock = PField(default_factory=SolverBlock)
    mollifier: MollifierBlock = PField(default_factory=MollifierBlock)
    # validated against PARAMS[experiment] by parse_config
    params: Any = None


_RUN = TypeAdapter(RunConfig)


def _loc(parts) -> str:
    out = ""
    for p in parts:
        if isinstance(p, int):
            out += f"[{p}]"
        else:
            out += f".{p}" if out else str(p)
    return out or "<root>"


def _pydantic_errors(exc: ValidationError, prefix=()) -> list:
    errors = []
    for e in exc.errors():
        # union/model-validator noise: drop pydantic's internal tags from the path
        loc = [p for p in prefix + tuple(e["loc"]) if p not in ("function-after[_one_source()]",)]
        errors.append(f"{_loc(loc)}: {e['msg']}")
    return errors


def parse_config(data: bytes, base_dir=None) -> RunConfig:
    """Validate a UTF-8 JSON document. Relative field-file paths are resolved
    against ``base_dir`` (default: the working directory). Raises ConfigError
    with every problem found."""
    try:
        raw = json.loads(data.decode("utf-8") if isinstance(data, bytes) else data)
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ConfigError([f"<root>: not valid UTF-8 JSON ({exc})"]) from None
    if not isinstance(raw, dict):
        raise ConfigError(["<root>: expected a JSON object"])
    params_raw = raw.pop("params", None)
    try:
        cfg = _RUN.validate_json(json.dumps(raw))
    except ValidationError as exc:
        errors = _pydantic_errors(exc)
        exp = raw.get("experiment")
        if exp in PARAMS:
            errors += _params_errors(exp, params_raw)
        raise ConfigError(errors) from None

    if params_raw is not None and not isinstance(params_raw, dict):
        raise ConfigError(["params: expected an object"])
    try:
        params = TypeAdapter(PARAMS[cfg.experiment]).validate_json(json.dumps(params_raw or {}))
    except ValidationError as exc:
        raise ConfigError(_pydantic_errors(exc, ("params",))) from None
    base = Path(base_dir) if base_dir is not None else Path.cwd()
    cfg = replace(cfg, params=params, problem=_resolve_files(cfg.problem, base))
    errors = check_invariants(cfg)
    if errors:
        raise ConfigError(errors)
    return cfg


def _params_errors(exp: str, params_raw) -> list:
    try:
        TypeAdapter(PARAMS[exp]).validate_json(json.dumps(params_raw or {}))
    except ValidationError as exc:
        return _pydantic_errors(exc, ("params",))
    return []


def _resolve_files(problem: Optional[ProblemBlock], base: Path) -> Optional[ProblemBlock]:
    if problem is None:
        return None

    def fix(c: Coefficient) -> Coefficient:
        if c.file is None or Path(c.file).is_absolute():
            return c
        return Coefficient(file=str((base / c.file).resolve()))

    changes = {k: fix(getattr(problem, k)) for k in ("g", "m", "b", "u0", "u1")}
    if problem.f is not None:
        changes["f"] = ForcingBlock(fix(problem.f.spatial), problem.f.profile)
    return replace(problem, **changes)


def _check_ladder(ladder, grid: Optional[Grid], path: str) -> list:
    errors = []
    if len(ladder) < 4:
        errors.append(f"{path}: needs at least 4 entries, got {len(ladder)}")
    for i, (a, b) in enumerate(zip(ladder, ladder[1:])):
        if not b < a:
            errors.append(f"{path}[{i + 1}]: ladder must be strictly decreasing ({b:g} after {a:g})")
    for i, e in enumerate(ladder):
        if not 0 < e <= 1:
            errors.append(f"{path}[{i}]: epsilon {e:g} outside (0, 1]")
        elif grid is not None and e < MIN_POINTS_PER_EPS * grid.spacing * (1 - 1e-12):
            errors.append(f"{path}[{i}]: epsilon {e:g} is below 4 dx = {MIN_POINTS_PER_EPS * grid.spacing:g}")
    return errors


def check_invariants(cfg: RunConfig) -> list:
    """Cross-field checks that the structural schema cannot express."""
    errors = []
    exp, prm = cfg.experiment, cfg.params
    grid = None
    if cfg.grid is not None:
        try:
            grid = cfg.grid.grid()
        except ValueError as exc:
            errors.append(f"grid: {exc}")

    if exp in PROBLEM_EXPERIMENTS:
        for block in ("grid", "problem"):
            if getattr(cfg, block) is None:
                errors.append(f"{block}: required for experiment {exp!r}")
    if cfg.seed < 0:
        errors.append(f"seed: must be >= 0, got {cfg.seed}")

    sv = cfg.solver
    if not 0 < sv.cfl_fraction <= 1:
        errors.append(f"solver.cfl_fraction: must lie in (0, 1], got {sv.cfl_fraction}")
    if sv.snapshot_stride < 1:
        errors.append(f"solver.snapshot_stride: must be >= 1, got {sv.snapshot_stride}")
    if sv.dt_override is not None and not sv.dt_override > 0:
        errors.append(f"solver.dt_override: must be positive, got {sv.dt_override}")

    p = cfg.problem
    singular_slots = []
    if p is not None:
        if not p.s > 0:
            errors.append(f"problem.s: must be positive, got {p.s}")
        if not p.T > 0:
            errors.append(f"problem.T: must be positive, got {p.T}")
        for slot, coef in p.slots().items():
            path = f"problem.{slot}" if slot != "f" else "problem.f.spatial"
            if coef.constant is not None:
                if slot == "g" and not coef.constant > 0:
                    errors.append(f"{path}.constant: g must be positive, got {coef.constant}")
                if slot in ("m", "b") and coef.constant < 0:
                    errors.append(f"{path}.constant: {slot} must be non-negative, got {coef.constant}")
            elif coef.file is not None:
                errors += _check_file(coef.file, grid, f"{path}.file")
            else:
                singular_slots.append(slot)
                if slot == "g":
                    errors.append(f"{path}.singular: g must stay bounded below; singular g is not supported")
                elif grid is not None and len(coef.singular.center) != grid.dim:
                    errors.append(f"{path}.singular.center: needs {grid.dim} coordinates, "
                                  f"got {len(coef.singular.center)}")
                elif grid is not None and any(not 0 <= c < grid.L for c in coef.singular.center):
                    errors.append(f"{path}.singular.center: {coef.singular.center} lies outside [0, {grid.L})")
                if slot in ("m", "b") and coef.singular.amplitude < 0:
                    errors.append(f"{path}.singular.amplitude: {slot} must be non-negative")

    if exp in ("solve", "duhamel-check") and singular_slots:
        eps = cfg.mollifier.epsilon
        if eps is None:
            errors.append(f"mollifier.epsilon: required when {', '.join(singular_slots)} are singular")
        elif not 0 < eps <= 1:
            errors.append(f"mollifier.epsilon: {eps:g} outside (0, 1]")
        elif grid is not None and eps < MIN_POINTS_PER_EPS * grid.spacing * (1 - 1e-12):
            errors.append(f"mollifier.epsilon: {eps:g} is below 4 dx = {MIN_POINTS_PER_EPS * grid.spacing:g}")

    if exp in ("sweep", "twin", "coherence"):
        if prm.ladder is not None:
            errors += _check_ladder(prm.ladder, grid, "params.ladder")
        elif grid is not None and len(default_ladder(grid)) < 4:
            errors.append(f"params.ladder: the default ladder 2^-2..2^-6 keeps only "
                          f"{len(default_ladder(grid))} entries >= 4 dx on this grid; give one explicitly")
    if exp in ("twin", "coherence") and p is not None and p.g.constant != 1.0:
        errors.append(f"problem.g: experiment {exp!r} is defined for g = 1 only")
    if exp == "coherence" and singular_slots:
        errors.append(f"problem: coherence takes smooth inputs only ({', '.join(singular_slots)} singular)")
    if exp == "duhamel-check":
        if p is not None and p.f is None:
            errors.append("problem.f: duhamel-check needs a forcing term")
        if prm.n_tau is not None and prm.n_tau < 2:
            errors.append(f"params.n_tau: must be >= 2, got {prm.n_tau}")
    if exp == "probes":
        if not prm.dim > 2 * prm.s > 0:
            errors.append(f"params.s: probes need dim > 2s > 0, got dim = {prm.dim}, s = {prm.s}")
        if prm.n_samples < 1:
            errors.append("params.n_samples: must be >= 1")
        if len(prm.n_values) < 2:
            errors.append("params.n_values: needs at least two resolutions")
        for i, n in enumerate(prm.n_values):
            band = prm.band if prm.band is not None else n // 8
            if n < 8 or n & (n - 1):
                errors.append(f"params.n_values[{i}]: {n} is not a power of two >= 8")
            elif not n > 4 * band or band < 1:
                errors.append(f"params.n_values[{i}]: n = {n} cannot resolve band {band}")
    if exp == "bounds":
        if prm.n_samples < 1:
            errors.append("params.n_samples: must be >= 1")
        if prm.c_star is not None and not prm.c_star > 0:
            errors.append(f"params.c_star: must be positive, got {prm.c_star}")
        for i, a in enumerate(prm.scale_factors):
            if not a > 0:
                errors.append(f"params.scale_factors[{i}]: must be positive, got {a}")
    return errors


def _check_file(path: str, grid: Optional[Grid], where: str) -> list:
    if not Path(path).exists():
        return [f"{where}: file {path} does not exist"]
    try:
        meta = read_sidecar(path)
    except (OSError, ValueError) as exc:
        return [f"{where}: {exc}"]
    if grid is not None and (meta["dim"], meta["n"], float(meta["L"])) != (grid.dim, grid.n, grid.L):
        return [f"{where}: file grid (dim={meta['dim']}, n={meta['n']}, L={meta['L']}) "
                f"does not match the grid block (dim={grid.dim}, n={grid.n}, L={grid.L})"]
    return []


def to_dict(cfg: RunConfig) -> dict:
    out = _RUN.dump_python(replace(cfg, params=None), mode="json", exclude_none=True)
    params = asdict(cfg.params) if cfg.params is not None else {}
    out["params"] = {k: v for k, v in params.items() if v is not None}
    return json.loads(json.dumps(out))


def serialize(cfg: RunConfig) -> bytes:
    return (json.dumps(to_dict(cfg), indent=2, sort_keys=True) + "\n").encode()
