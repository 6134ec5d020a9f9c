"""Very-weak-solution experiments.

Sweeps over a mollifier ladder eps_k = 2^-k: moderateness (power-law growth of
the solution norms), twin-kernel uniqueness runs, coherence with the classical
solution for smooth inputs, randomized checks of the a priori energy bounds,
and empirical probes of the Sobolev and Kato-Ponce inequalities.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from importlib import resources
from typing import Callable, Optional

import numpy as np

from .errors import InconclusiveFit, RegimeViolation, ScopeViolation
from .evolve import ProblemSpec, SolverConfig, SourceTerm, solve, step_plan
from .mollify import MIN_POINTS_PER_EPS, MollifierSpec, moderateness_exponent, regularize, singular_net
from .spectral import Field, Grid, composite_norms_array, hs_norm, irfftn, l2_array, lp_array, make_grid

R2_THRESHOLD = 0.95
NEGLIGIBLE_ABS = 1e-8
SLOTS = ("g", "m", "b", "u0", "u1", "f")


def _ordered_map(fn, items, workers: int) -> list:
    """map() that keeps input order, optionally on a thread pool."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _clean(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    return value


def _write_report(prefix, columns, rows, summary) -> tuple:
    csv_path, json_path = f"{prefix}.csv", f"{prefix}.json"
    with open(csv_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(columns)
        for row in rows:
            w.writerow([format(v, ".17g") if isinstance(v, float) else v for v in row])
    with open(json_path, "w") as fh:
        json.dump(_clean(summary), fh, indent=2, sort_keys=True)
    return csv_path, json_path


def check_ladder(ladder, grid: Grid) -> list:
    eps = [float(e) for e in ladder]
    if len(eps) < 4:
        raise ValueError(f"ladder needs at least 4 entries, got {len(eps)}")
    if any(b >= a for a, b in zip(eps, eps[1:])):
        raise ValueError("ladder must be strictly decreasing")
    if any(not (0 < e <= 1) for e in eps):
        raise ValueError("ladder entries must lie in (0, 1]")
    floor = MIN_POINTS_PER_EPS * grid.spacing * (1 - 1e-12)
    if eps[-1] < floor:
        raise ValueError(f"ladder entry {eps[-1]:g} is below 4 dx = {MIN_POINTS_PER_EPS * grid.spacing:g}")
    return eps


# ---------------------------------------------------------------------------
# problem templates


@dataclass(frozen=True, eq=False)
class VWSTemplate:
    """A Cauchy problem whose inputs are a smooth part plus singular data.

    ``smooth`` holds Fields for any of g, m, b, u0, u1 (defaults: g = 1, rest 0)
    and optionally the forcing's spatial part under "f". ``singular`` maps a
    slot to a SingularDatum realized as an eps-net and added to the smooth
    part. Forcing is profile(t) * (smooth f + singular f). With
    ``regularize_smooth`` the smooth parts are also convolved with psi_eps.
    """

    grid: Grid
    s: float
    T: float
    smooth: dict = field(default_factory=dict)
    singular: dict = field(default_factory=dict)
    profile: Callable[[float], float] = None
    regularize_smooth: bool = False

    def __post_init__(self):
        for slot in list(self.smooth) + list(self.singular):
            if slot not in SLOTS:
                raise ValueError(f"unknown slot {slot!r}; expected one of {SLOTS}")
        for datum in self.singular.values():
            datum.check_inside(self.grid)

    def _smooth(self, slot: str) -> Field:
        if slot in self.smooth:
            return self.smooth[slot]
        return Field.constant(self.grid, 1.0 if slot == "g" else 0.0)

    def is_g_one(self) -> bool:
        return "g" not in self.singular and np.all(self._smooth("g").samples == 1.0)

    def has_forcing(self) -> bool:
        return "f" in self.smooth or "f" in self.singular

    def build(self, spec: Optional[MollifierSpec]) -> ProblemSpec:
        """The regularized problem at one ladder entry (``None``: unregularized,
        only allowed without singular slots)."""
        if spec is None and self.singular:
            raise ValueError("singular slots need a mollifier")
        parts = {}
        provenance = {}
        for slot in SLOTS:
            if slot == "f" and not self.has_forcing():
                continue
            arr = self._smooth(slot)
            if spec is not None and self.regularize_smooth:
                arr = regularize(arr, spec)
            if slot in self.singular:
                arr = arr + singular_net(self.singular[slot], spec, self.grid)
                provenance[slot] = (spec, self.singular[slot])
            parts[slot] = arr
        forcing = SourceTerm()
        if "f" in parts:
            profile = self.profile if self.profile is not None else _unit_profile
            forcing = SourceTerm.separable(profile, parts["f"])
        return ProblemSpec(self.s, self.T, parts["g"], parts["m"], parts["b"], parts["u0"], parts["u1"],
                           forcing, provenance)


def _unit_profile(t: float) -> float:
    return 1.0


def _sup_norms(p: ProblemSpec, cfg: SolverConfig, selector: int) -> tuple:
    """(sup_t selected composite norm, sup_t ||u||_L2, trajectory)."""
    traj, _ = solve(p, cfg)
    grid = p.grid
    sel = max(composite_norms_array(sn.u.samples, sn.ut.samples, grid, p.s).select(selector) for sn in traj)
    l2 = max(l2_array(sn.u.samples, grid) for sn in traj)
    return sel, l2, traj


# ---------------------------------------------------------------------------
# moderateness


@dataclass
class SweepReport:
    epsilons: list
    norms_per_eps: list
    fitted_slope: float
    r_squared: float
    verdict: str
    N_hat: Optional[int]
    selector: int
    kernel: str

    def rows(self):
        return [(e, v) for e, v in zip(self.epsilons, self.norms_per_eps)]

    def write(self, prefix) -> tuple:
        return _write_report(prefix, ("epsilon", f"sup_norm{self.selector}"), self.rows(), asdict(self))


def moderate_order(slope: float) -> int:
    """Smallest N >= 1 with eps^slope <~ eps^-N."""
    return max(1, math.ceil(-slope - 1e-9))


def moderateness_sweep(template: VWSTemplate, ladder, norm_selector: int = 1,
                       kernel: str = "compact_bump", cfg: SolverConfig = SolverConfig(),
                       workers: int = 1, raise_inconclusive: bool = True) -> SweepReport:
    """sup_t ||u_eps||_selector over the ladder and its log-log fit."""
    if norm_selector not in (1, 2, 3):
        raise ValueError(f"norm_selector must be 1, 2 or 3, got {norm_selector}")
    eps = check_ladder(ladder, template.grid)

    def run(e):
        return _sup_norms(template.build(MollifierSpec(e, kernel)), cfg, norm_selector)[0]

    norms = _ordered_map(run, eps, workers)
    slope, r2 = moderateness_exponent(list(zip(eps, norms)))
    moderate = r2 >= R2_THRESHOLD
    report = SweepReport(eps, norms, slope, r2, "moderate" if moderate else "inconclusive",
                         moderate_order(slope) if moderate else None, norm_selector, kernel)
    if not moderate and raise_inconclusive:
        raise InconclusiveFit(f"power-law fit has r^2 = {r2:.3f} < {R2_THRESHOLD}", report)
    return report


# ---------------------------------------------------------------------------
# uniqueness (twin kernels)


@dataclass
class TwinRunReport:
    epsilons: list
    kernel_a: str
    kernel_b: str
    difference_norms: list
    solution_norms: list
    difference_slope: float
    solution_slope: float
    slope_gap: float
    margin: float
    unique: bool
    selector: int

    def rows(self):
        return list(zip(self.epsilons, self.difference_norms, self.solution_norms))

    def write(self, prefix) -> tuple:
        cols = ("epsilon", "difference_l2", f"solution_norm{self.selector}")
        return _write_report(prefix, cols, self.rows(), asdict(self))


def _fit_or_nan(eps, values) -> float:
    if any(v <= 0 for v in values):
        return float("nan")
    return moderateness_exponent(list(zip(eps, values)))[0]


def negligibility_twin(template: VWSTemplate, ladder, kernel_a: str = "compact_bump",
                       kernel_b: str = "gaussian", margin: float = 1.0, norm_selector: int = 1,
                       cfg: SolverConfig = SolverConfig(), workers: int = 1) -> TwinRunReport:
    """Run the ladder under two mollifier families.

    Differences are sup_t ||u_eps - u~_eps||_L2; solution norms are sup_t of the
    selected composite norm of the kernel-A net. Both runs at one eps share a
    time step so the difference reflects the regularization only.
    """
    if not template.is_g_one():
        raise ScopeViolation("twin-kernel uniqueness runs are defined for g = 1 only")
    eps = check_ladder(ladder, template.grid)

    def run(e):
        pa = template.build(MollifierSpec(e, kernel_a))
        pb = template.build(MollifierSpec(e, kernel_b))
        dt = min(step_plan(pa, cfg)[0], step_plan(pb, cfg)[0])
        shared = SolverConfig(cfg.cfl_fraction, dt, cfg.snapshot_stride)
        sel, _, ta = _sup_norms(pa, shared, norm_selector)
        tb, _ = solve(pb, shared)
        grid = pa.grid
        diff = max(l2_array(a.u.samples - b.u.samples, grid) for a, b in zip(ta, tb))
        return diff, sel

    results = _ordered_map(run, eps, workers)
    diffs = [r[0] for r in results]
    sols = [r[1] for r in results]
    d_slope = _fit_or_nan(eps, diffs)
    s_slope = _fit_or_nan(eps, sols)
    gap = d_slope - s_slope
    unique = bool(max(diffs) < NEGLIGIBLE_ABS or (math.isfinite(gap) and gap >= margin))
    return TwinRunReport(eps, kernel_a, kernel_b, diffs, sols, d_slope, s_slope, gap, margin, unique,
                         norm_selector)


# ---------------------------------------------------------------------------
# coherence


@dataclass
class CoherenceReport:
    epsilons: list
    errors: list
    reference_kind: str
    monotone: bool
    final_error: float
    tolerance: float
    passed: bool

    def rows(self):
        return list(zip(self.epsilons, self.errors))

    def write(self, prefix) -> tuple:
        return _write_report(prefix, ("epsilon", "relative_error"), self.rows(), asdict(self))


def modal_reference(p: ProblemSpec, times) -> list:
    """Exact solution for constant g, m, b and f = 0: every Fourier mode solves
    a'' + b a' + (g |k|^{2s} + m) a = 0."""
    grid = p.grid
    consts = [float(x.samples.flat[0]) for x in (p.g, p.m, p.b)]
    if any(np.ptp(x.samples) != 0 for x in (p.g, p.m, p.b)) or not p.forcing.is_zero:
        raise ValueError("the analytic modal reference needs constant coefficients and f = 0")
    g, m, b = consts
    a0 = np.fft.rfftn(p.u0.samples)
    a1 = np.fft.rfftn(p.u1.samples)
    omega2 = g * grid.symbol(p.s) + m
    gamma = np.sqrt((b * b / 4 - omega2).astype(complex))
    out = []
    for t in times:
        gt = gamma * t
        small = np.abs(gt) < 1e-8
        # sinh(gamma t)/gamma with its t-limit at gamma = 0
        shc = np.where(small, t * (1 + gt**2 / 6), np.sinh(gt) / np.where(small, 1, gamma)).real
        ch = np.cosh(gt).real
        coeff = math.exp(-b * t / 2) * (a0 * ch + (a1 + b * a0 / 2) * shc)
        out.append(irfftn(coeff, grid))
    return out


def coherence_run(template: VWSTemplate, ladder, reference_kind: str = "analytic_modal",
                  kernel: str = "compact_bump", tolerance: float = 1e-3,
                  cfg: SolverConfig = SolverConfig(), workers: int = 1) -> CoherenceReport:
    """Errors sup_t ||u_eps - u_ref|| / sup_t ||u_ref|| along the ladder.

    Every input is regularized; all runs and the reference share the smallest
    time step over the ladder so that time-stepping error does not vary.
    """
    if template.singular:
        raise ValueError("coherence runs take smooth inputs only")
    if not template.is_g_one():
        raise ScopeViolation("coherence runs are defined for g = 1 only")
    if reference_kind not in ("analytic_modal", "fine_eps_refined"):
        raise ValueError(f"unknown reference kind {reference_kind!r}")
    eps = check_ladder(ladder, template.grid)
    smooth = VWSTemplate(template.grid, template.s, template.T, dict(template.smooth), {},
                         template.profile, regularize_smooth=True)
    problems = [smooth.build(MollifierSpec(e, kernel)) for e in eps]
    exact = smooth.build(None)
    dt = min(step_plan(q, cfg)[0] for q in problems + [exact])
    shared = SolverConfig(cfg.cfl_fraction, dt, cfg.snapshot_stride)
    grid = template.grid

    ref_traj, _ = solve(exact, shared)
    times = [sn.t for sn in ref_traj]
    if reference_kind == "analytic_modal":
        ref = modal_reference(exact, times)
    else:
        ref = [sn.u.samples for sn in ref_traj]
    scale = max(l2_array(r, grid) for r in ref)

    def run(q):
        traj, _ = solve(q, shared)
        err = max(l2_array(sn.u.samples - r, grid) for sn, r in zip(traj, ref))
        return err / scale if scale > 0 else err

    errors = _ordered_map(run, problems, workers)
    monotone = all(b <= a for a, b in zip(errors, errors[1:]))
    final = errors[-1]
    return CoherenceReport(eps, errors, reference_kind, monotone, final, tolerance,
                           bool(monotone and final < tolerance))


# ---------------------------------------------------------------------------
# a priori energy bounds


def sup_forcing_l2(p: ProblemSpec, times) -> float:
    if p.forcing.is_zero:
        return 0.0
    return max(l2_array(p.forcing.at(t, p.grid).samples, p.grid) for t in times)


def _hs(u: Field, s: float) -> float:
    return hs_norm(u, s)[1]


def bound_e1(p: ProblemSpec, f_sup: float) -> float:
    """(2 + |m|_inf)(1 + |b|_inf + |m|_inf^{1/2})(|u0|_{H^s} + |u1|_{L2} + sup_t |f|_{L2})."""
    m_inf = float(np.max(np.abs(p.m.samples)))
    b_inf = float(np.max(np.abs(p.b.samples)))
    data = _hs(p.u0, p.s) + l2_array(p.u1.samples, p.grid) + f_sup
    return (2 + m_inf) * (1 + b_inf + math.sqrt(m_inf)) * data


def bound_e2(p: ProblemSpec, f_sup: float) -> float:
    """(1 + |m|_{d/s})(1 + |m|_{d/2s})(1 + |b|_{d/s})^2 (|u0|_{H^2s} + |u1|_{H^s} + sup_t |f|_{L2})."""
    d, s, grid = p.grid.dim, p.s, p.grid
    if not d > 2 * s:
        raise RegimeViolation(f"the second estimate needs d > 2s, got d = {d}, s = {s}")
    m_a = lp_array(p.m.samples, grid, d / s)
    m_b = lp_array(p.m.samples, grid, d / (2 * s))
    b_a = lp_array(p.b.samples, grid, d / s)
    data = _hs(p.u0, 2 * s) + _hs(p.u1, s) + f_sup
    return (1 + m_a) * (1 + m_b) * (1 + b_a) ** 2 * data


ESTIMATES = {"E1": (1, bound_e1), "E2": (2, bound_e2)}


def bound_ratio(p: ProblemSpec, estimate: str, cfg: SolverConfig = SolverConfig()) -> float:
    """sup_t ||u||_k / RHS with the implicit constant set to 1."""
    if estimate not in ESTIMATES:
        raise ValueError(f"unknown estimate {estimate!r}; expected one of {tuple(ESTIMATES)}")
    selector, rhs = ESTIMATES[estimate]
    if estimate == "E2" and not p.grid.dim > 2 * p.s:
        raise RegimeViolation(f"the second estimate needs d > 2s, got d = {p.grid.dim}, s = {p.s}")
    if np.ptp(p.g.samples) != 0 or p.g.samples.flat[0] != 1.0:
        raise ScopeViolation("the energy estimates are stated for g = 1")
    traj, _ = solve(p, cfg)
    lhs = max(composite_norms_array(sn.u.samples, sn.ut.samples, p.grid, p.s).select(selector) for sn in traj)
    bound = rhs(p, sup_forcing_l2(p, [sn.t for sn in traj]))
    return lhs / bound if bound > 0 else 0.0


def _smooth_random(grid: Grid, rng, band: int, decay: float) -> np.ndarray:
    """Random real trig polynomial with |modes| <= band and spectral decay."""
    shape = grid.shape[:-1] + (grid.n // 2 + 1,)
    spec = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    kk = np.sqrt(grid.k_squared) * grid.L / (2 * np.pi)
    spec *= (kk <= band) / (1 + kk) ** decay
    arr = irfftn(spec, grid)
    peak = np.max(np.abs(arr))
    return arr / peak if peak > 0 else arr


def random_bound_problem(rng, estimate: str = "E1", n: int = None, band: int = 4) -> ProblemSpec:
    """Admissible random problem for the E1 (d = 1, any s) or E2 (d = 2, s = 1/2) family."""
    if estimate == "E1":
        grid = make_grid(1, n or 64, 2 * np.pi)
        s = float(rng.uniform(0.25, 1.5))
    else:
        grid = make_grid(2, n or 32, 2 * np.pi)
        s = 0.5
    T = float(rng.uniform(0.5, 2.0))
    nonneg = lambda scale: Field(grid, scale * (1 + _smooth_random(grid, rng, band, 1.0)) / 2)
    m = nonneg(float(rng.uniform(0, 4)))
    b = nonneg(float(rng.uniform(0, 2)))
    data = lambda: Field(grid, float(rng.uniform(0.1, 3)) * _smooth_random(grid, rng, band, float(rng.uniform(0, 2))))
    u0, u1, f = data(), data(), data()
    omega = float(rng.uniform(0, 3))
    phase = float(rng.uniform(0, 2 * np.pi))
    forcing = SourceTerm.separable(lambda t, w=omega, ph=phase: math.cos(w * t + ph), f)
    return ProblemSpec(s, T, Field.constant(grid, 1.0), m, b, u0, u1, forcing)


def scale_data(p: ProblemSpec, alpha: float) -> ProblemSpec:
    return p.replace(u0=alpha * p.u0, u1=alpha * p.u1, forcing=p.forcing.scaled(alpha))


@dataclass
class BoundReport:
    estimate: str
    ratios: list
    max_ratio: float
    median_ratio: float
    c_star: Optional[float]
    passed: Optional[bool]

    def write(self, prefix) -> tuple:
        rows = list(enumerate(self.ratios))
        return _write_report(prefix, ("sample", "ratio"), rows, asdict(self))


def energy_bound_check(estimate: str = "E1", n_samples: int = 50, seed: int = 0,
                       family: Callable = None, c_star: float = None,
                       cfg: SolverConfig = SolverConfig(), workers: int = 1) -> BoundReport:
    """LHS/RHS over a seeded random family; PASS when max ratio <= c_star.

    ``family(rng, estimate)`` returns a ProblemSpec; each sample gets its own
    generator spawned from ``seed``, so results do not depend on ``workers``.
    """
    family = family or random_bound_problem
    children = np.random.SeedSequence(seed).spawn(n_samples)

    def run(child):
        return bound_ratio(family(np.random.default_rng(child), estimate), estimate, cfg)

    ratios = _ordered_map(run, children, workers)
    top = max(ratios)
    passed = None if c_star is None else bool(top <= c_star)
    return BoundReport(estimate, ratios, top, float(np.median(ratios)), c_star, passed)


def load_c_star(estimate: str = None):
    """Frozen regression constants (data/c_star.json, written by
    scripts/calibrate_cstar.py). Returns the full record when ``estimate`` is None."""
    record = json.loads(resources.files("fracwave").joinpath("data/c_star.json").read_text())
    if estimate is None:
        return record
    if estimate not in record["c_star"]:
        raise ValueError(f"no frozen constant for {estimate!r}")
    return float(record["c_star"][estimate])


# ---------------------------------------------------------------------------
# inequality probes


def _check_regime(d: int, s: float) -> None:
    if not 0 < s or not d > 2 * s:
        raise RegimeViolation(f"probe needs d > 2s > 0, got d = {d}, s = {s}")


def sobolev_exponent(d: int, s: float) -> float:
    return 2 * d / (d - 2 * s)


def sobolev_ratio(f: Field, s: float) -> float:
    """||f||_{L^q}^2 / ||(-Delta)^{s/2} f||_{L^2}^2, q = 2d/(d - 2s)."""
    grid = f.grid
    _check_regime(grid.dim, s)
    q = sobolev_exponent(grid.dim, s)
    top = lp_array(f.samples, grid, q) ** 2
    frac = irfftn(np.fft.rfftn(f.samples) * grid.symbol(s / 2), grid)
    return top / l2_array(frac, grid) ** 2


def kato_ponce_ratio(f: Field, h: Field, s: float) -> float:
    """||D(fh)||_2 / (||D f||_{p} ||h||_{q} + ||f||_{p} ||D h||_{q}), D = (-Delta)^{s/2},
    p = d/s, q = 2d/(d - 2s)."""
    grid = f.grid
    _check_regime(grid.dim, s)
    p, q = grid.dim / s, sobolev_exponent(grid.dim, s)
    half = grid.symbol(s / 2)
    D = lambda a: irfftn(np.fft.rfftn(a) * half, grid)
    fs, hs = f.samples, h.samples
    top = l2_array(D(fs * hs), grid)
    bottom = lp_array(D(fs), grid, p) * lp_array(hs, grid, q) + lp_array(fs, grid, p) * lp_array(D(hs), grid, q)
    return top / bottom


def band_limited_sample(grid: Grid, rng, band: int, decay: float) -> Field:
    """Zero-mean real field with integer modes |j| <= band (in units of 2 pi / L).

    Coefficients are drawn on the fixed (2 band + 1)^d lattice, so the same
    generator state gives the same continuum function at every n > 4 band.
    """
    if grid.n <= 4 * band:
        raise ValueError(f"n = {grid.n} cannot resolve band {band} products; need n > {4 * band}")
    d = grid.dim
    js = np.arange(-band, band + 1)
    lattice = np.stack(np.meshgrid(*([js] * d), indexing="ij"), axis=-1).reshape(-1, d)
    norm = np.sqrt(np.sum(lattice**2, axis=1))
    keep = (norm > 0) & (norm <= band)
    lattice, norm = lattice[keep], norm[keep]
    amp = (rng.standard_normal(len(lattice)) + 1j * rng.standard_normal(len(lattice))) / norm**decay
    full = np.zeros(grid.shape, dtype=complex)
    idx = tuple((lattice[:, a] % grid.n) for a in range(d))
    full[idx] = amp
    # real part of the synthesized series = symmetrized spectrum
    # normalized by the coefficients, not grid values, so n does not matter
    arr = np.fft.ifftn(full).real * grid.size
    return Field(grid, arr / np.sqrt(np.sum(np.abs(amp) ** 2)))


@dataclass
class ProbeReport:
    kind: str
    n: int
    s: float
    band: int
    ratios: list
    max_ratio: float

    def write(self, prefix) -> tuple:
        rows = list(enumerate(self.ratios))
        return _write_report(prefix, ("sample", "ratio"), rows, asdict(self))


def _probe_samples(d, n, n_samples, seed, band, count):
    grid = make_grid(d, n, 2 * np.pi)
    children = np.random.SeedSequence(seed).spawn(n_samples)
    for child in children:
        rng = np.random.default_rng(child)
        decay = float(rng.uniform(0, 2))
        yield grid, [band_limited_sample(grid, rng, band, decay) for _ in range(count)]


def sobolev_ratio_probe(d: int = 2, s: float = 0.5, n_samples: int = 200, n: int = 64,
                        band: int = None, seed: int = 0) -> ProbeReport:
    """Max Sobolev quotient over random zero-mean fields. The default band n/8
    grows with the grid, so doubling n also admits rougher fields."""
    _check_regime(d, s)
    band = band or n // 8
    ratios = [sobolev_ratio(fs[0], s) for _, fs in _probe_samples(d, n, n_samples, seed, band, 1)]
    return ProbeReport("sobolev", n, s, band, ratios, max(ratios))


def kato_ponce_probe(d: int = 2, s: float = 0.5, n_samples: int = 200, n: int = 64,
                     band: int = None, seed: int = 0) -> ProbeReport:
    _check_regime(d, s)
    band = band or n // 8
    ratios = [kato_ponce_ratio(fs[0], fs[1], s) for _, fs in _probe_samples(d, n, n_samples, seed, band, 2)]
    return ProbeReport("kato_ponce", n, s, band, ratios, max(ratios))
