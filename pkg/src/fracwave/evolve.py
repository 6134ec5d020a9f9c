"""Time integration of u_tt + D_g^s u + m u + b u_t = f on the periodic box.

The second-order equation is written as the first-order system
(u, u_t)' = (u_t, f - D_g^s u - m u - b u_t) and advanced with classical RK4.
The energy

    E(t) = ||u_t||^2 + ||g^{1/2} (-Delta)^{s/2} u||^2 + ||m^{1/2} u||^2

obeys dE/dt = -2 ||b^{1/2} u_t||^2 + 2 <f, u_t>, which is what the
dissipation residual checks.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .errors import ForcingPresent, GridMismatch, PositivityViolation, StabilityBreach
from .spectral import Field, Grid, _check_same_grid, apply_multiplier, composite_norms_array, l2_array

RK4_IMAG_LIMIT = 2.8
RK4_REAL_LIMIT = 2.78
BLOWUP_FACTOR = 1e12


@dataclass(frozen=True, eq=False)
class SourceTerm:
    """Forcing f(t, x).

    kind = "zero": f = 0.
    kind = "separable": f(t, x) = profile(t) * spatial(x).
    kind = "sampled": piecewise-linear interpolation between (times[k], fields[k]).
    """

    kind: str = "zero"
    profile: Optional[Callable[[float], float]] = None
    spatial: Optional[Field] = None
    times: tuple = ()
    fields: tuple = ()

    def __post_init__(self):
        if self.kind == "zero":
            return
        if self.kind == "separable":
            if self.profile is None or self.spatial is None:
                raise ValueError("separable forcing needs a time profile and a spatial field")
            return
        if self.kind == "sampled":
            times = tuple(float(t) for t in self.times)
            if len(times) < 2 or len(times) != len(self.fields):
                raise ValueError("sampled forcing needs >= 2 (time, field) pairs")
            if any(b <= a for a, b in zip(times, times[1:])):
                raise ValueError("sampled forcing times must be strictly increasing")
            for f in self.fields[1:]:
                _check_same_grid(self.fields[0], f)
            object.__setattr__(self, "times", times)
            object.__setattr__(self, "fields", tuple(self.fields))
            return
        raise ValueError(f"unknown forcing kind {self.kind!r}")

    @classmethod
    def zero(cls) -> "SourceTerm":
        return cls()

    @classmethod
    def separable(cls, profile, spatial: Field) -> "SourceTerm":
        return cls("separable", profile=profile, spatial=spatial)

    @classmethod
    def sampled(cls, times, fields) -> "SourceTerm":
        return cls("sampled", times=tuple(times), fields=tuple(fields))

    @property
    def is_zero(self) -> bool:
        if self.kind == "zero":
            return True
        if self.kind == "separable":
            return not np.any(self.spatial.samples)
        return not any(np.any(f.samples) for f in self.fields)

    @property
    def grid(self) -> Optional[Grid]:
        if self.kind == "separable":
            return self.spatial.grid
        if self.kind == "sampled":
            return self.fields[0].grid
        return None

    def array_at(self, t: float) -> Optional[np.ndarray]:
        """Samples of f(t, .), or None for the zero forcing."""
        if self.kind == "zero":
            return None
        if self.kind == "separable":
            return float(self.profile(t)) * self.spatial.samples
        times = self.times
        if t <= times[0]:
            return self.fields[0].samples
        if t >= times[-1]:
            return self.fields[-1].samples
        j = int(np.searchsorted(times, t, side="right")) - 1
        w = (t - times[j]) / (times[j + 1] - times[j])
        return (1 - w) * self.fields[j].samples + w * self.fields[j + 1].samples

    def at(self, t: float, grid: Grid) -> Field:
        arr = self.array_at(t)
        return Field.zeros(grid) if arr is None else Field(grid, arr)

    def scaled(self, alpha: float) -> "SourceTerm":
        if self.kind == "zero":
            return self
        if self.kind == "separable":
            return SourceTerm.separable(self.profile, alpha * self.spatial)
        return SourceTerm.sampled(self.times, [alpha * f for f in self.fields])


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    """One instance of the Cauchy problem. ``provenance`` maps a slot name
    (g, m, b, u0, u1, f) to the (MollifierSpec, SingularDatum) it was built
    from; an empty mapping means all inputs are smooth."""

    s: float
    T: float
    g: Field
    m: Field
    b: Field
    u0: Field
    u1: Field
    forcing: SourceTerm = field(default_factory=SourceTerm)
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.s > 0:
            raise ValueError(f"s must be positive, got {self.s}")
        if not self.T > 0:
            raise ValueError(f"horizon T must be positive, got {self.T}")
        for other in (self.m, self.b, self.u0, self.u1):
            _check_same_grid(self.g, other)
        fg = self.forcing.grid
        if fg is not None and fg != self.g.grid:
            raise GridMismatch(f"forcing lives on {fg}, coefficients on {self.g.grid}")
        if self.forcing.kind == "sampled":
            if self.forcing.times[0] > 0 or self.forcing.times[-1] < self.T:
                raise ValueError("sampled forcing must cover [0, T]")
        if self.g.min() <= 0:
            raise PositivityViolation(f"g must be positive, min(g) = {self.g.min():g}")
        if self.m.min() < 0:
            raise PositivityViolation(f"m must be non-negative, min(m) = {self.m.min():g}")
        if self.b.min() < 0:
            raise PositivityViolation(f"b must be non-negative, min(b) = {self.b.min():g}")

    @property
    def grid(self) -> Grid:
        return self.g.grid

    @classmethod
    def constant(cls, grid: Grid, s: float, T: float, u0: Field, u1: Field = None,
                 g: float = 1.0, m: float = 0.0, b: float = 0.0,
                 forcing: SourceTerm = None) -> "ProblemSpec":
        return cls(
            s=s, T=T,
            g=Field.constant(grid, g), m=Field.constant(grid, m), b=Field.constant(grid, b),
            u0=u0, u1=Field.zeros(grid) if u1 is None else u1,
            forcing=SourceTerm() if forcing is None else forcing,
        )

    def replace(self, **changes) -> "ProblemSpec":
        return replace(self, **changes)


@dataclass(frozen=True)
class SolverConfig:
    cfl_fraction: float = 0.5
    dt_override: Optional[float] = None
    snapshot_stride: int = 1

    def __post_init__(self):
        if not (0 < self.cfl_fraction <= 1):
            raise ValueError(f"cfl_fraction must lie in (0, 1], got {self.cfl_fraction}")
        if self.dt_override is not None and not self.dt_override > 0:
            raise ValueError(f"dt_override must be positive, got {self.dt_override}")
        if int(self.snapshot_stride) != self.snapshot_stride or self.snapshot_stride < 1:
            raise ValueError(f"snapshot_stride must be an integer >= 1, got {self.snapshot_stride}")


@dataclass(frozen=True, eq=False)
class StateSnapshot:
    t: float
    u: Field
    ut: Field

    def __post_init__(self):
        _check_same_grid(self.u, self.ut)


@dataclass
class EnergyReport:
    """Energy diagnostics on the snapshot times.

    ``dissipation_residual[k]`` belongs to the interval [times[k], times[k+1]],
    so it has one entry fewer than ``times``. ``monotone_violation`` is only
    defined (not None) for unforced problems.
    """

    times: list
    energy: list
    dissipation_residual: list
    monotone_violation: Optional[float]

    def max_relative_drift(self) -> float:
        e0 = self.energy[0]
        drift = max(abs(e - e0) for e in self.energy)
        return drift / e0 if e0 > 0 else drift


def stable_dt(grid: Grid, s: float, g_max: float, m_max: float) -> float:
    """2.8 / omega_max, omega_max = sqrt(g_max |k_max|^{2s} + m_max)."""
    if not g_max > 0:
        raise ValueError(f"g_max must be positive, got {g_max}")
    if m_max < 0:
        raise ValueError(f"m_max must be non-negative, got {m_max}")
    omega = math.sqrt(g_max * grid.k_max ** (2 * s) + m_max)
    return RK4_IMAG_LIMIT / omega


def stability_limit(p: ProblemSpec) -> float:
    """stable_dt, further capped by the real-axis limit when b is large."""
    dt = stable_dt(p.grid, p.s, p.g.max(), p.m.max())
    b_max = p.b.max()
    if b_max > 0:
        dt = min(dt, RK4_REAL_LIMIT / b_max)
    return dt


def step_plan(p: ProblemSpec, cfg: SolverConfig, horizon: float = None) -> tuple:
    """(dt, n_steps) with n_steps * dt == horizon and dt within the CFL bound."""
    horizon = p.T if horizon is None else horizon
    bound = cfg.cfl_fraction * stability_limit(p)
    target = bound
    if cfg.dt_override is not None:
        if cfg.dt_override > bound * (1 + 1e-12):
            raise ValueError(
                f"dt_override {cfg.dt_override:g} exceeds cfl_fraction * stable dt = {bound:g}"
            )
        target = cfg.dt_override
    n_steps = max(1, math.ceil(horizon / target * (1 - 1e-12)))
    return horizon / n_steps, n_steps


class _Operator:
    """Array-level right-hand side with precomputed multipliers."""

    def __init__(self, p: ProblemSpec):
        grid = p.grid
        self.grid = grid
        g = p.g.samples
        self.g_const = float(g.flat[0]) if np.ptp(g) == 0 else None
        self.g = g
        self.half = grid.symbol(p.s / 2)
        self.full = grid.symbol(p.s)
        self.m = p.m.samples
        self.b = p.b.samples
        self.m_zero = not np.any(self.m)
        self.b_zero = not np.any(self.b)
        self.forcing = p.forcing

    def dg(self, u: np.ndarray) -> np.ndarray:
        if self.g_const is not None:
            return self.g_const * apply_multiplier(u, self.grid, self.full)
        inner = apply_multiplier(u, self.grid, self.half)
        return apply_multiplier(self.g * inner, self.grid, self.half)

    def accel(self, t: float, u: np.ndarray, ut: np.ndarray, forced: bool = True) -> np.ndarray:
        out = -self.dg(u)
        if not self.m_zero:
            out -= self.m * u
        if not self.b_zero:
            out -= self.b * ut
        if forced:
            f = self.forcing.array_at(t)
            if f is not None:
                out += f
        return out

    def energy(self, u: np.ndarray, ut: np.ndarray) -> float:
        w = apply_multiplier(u, self.grid, self.half)
        dv = self.grid.cell_volume
        total = np.sum(ut * ut) + np.sum(self.g * w * w) + np.sum(self.m * u * u)
        return float(total) * dv

    def damping_rate(self, ut: np.ndarray) -> float:
        """||b^{1/2} u_t||^2."""
        return float(np.sum(self.b * ut * ut)) * self.grid.cell_volume

    def work_rate(self, t: float, ut: np.ndarray) -> float:
        """<f(t), u_t>."""
        f = self.forcing.array_at(t)
        if f is None:
            return 0.0
        return float(np.sum(f * ut)) * self.grid.cell_volume


def rhs(state: StateSnapshot, p: ProblemSpec) -> tuple:
    """(du, dut) = (u_t, f(t) - D_g^s u - m u - b u_t)."""
    _check_same_grid(state.u, p.g)
    op = _Operator(p)
    return state.ut, Field(p.grid, op.accel(state.t, state.u.samples, state.ut.samples))


def _reference_scale(p: ProblemSpec) -> float:
    grid = p.grid
    ref = composite_norms_array(p.u0.samples, p.u1.samples, grid, p.s).norm1
    if not p.forcing.is_zero:
        f_scale = max(l2_array(p.forcing.at(t, grid).samples, grid) for t in (0.0, 0.5 * p.T, p.T))
        ref += p.T * max(f_scale, l2_array(_forcing_peak(p), grid))
    return ref


def _forcing_peak(p: ProblemSpec) -> np.ndarray:
    f = p.forcing
    if f.kind == "separable":
        return f.spatial.samples
    if f.kind == "sampled":
        return max((x.samples for x in f.fields), key=lambda a: float(np.sum(a * a)))
    return np.zeros(p.grid.shape)


def integrate(p: ProblemSpec, dt: float, n_steps: int, u: np.ndarray, ut: np.ndarray,
              t0: float = 0.0, stride: int = 1, forced: bool = True,
              op: _Operator = None, ref: float = None):
    """Run n_steps of RK4 from (t0, u, ut); yields (step, t, u, ut) at every
    ``stride``-th step and at the last one (step 0 included)."""
    op = _Operator(p) if op is None else op
    limit = BLOWUP_FACTOR * (ref if ref is not None else _reference_scale(p))
    grid = op.grid
    yield 0, t0, u, ut
    for k in range(1, n_steps + 1):
        t = t0 + (k - 1) * dt
        h = 0.5 * dt
        a1 = op.accel(t, u, ut, forced)
        a2 = op.accel(t + h, u + h * ut, ut + h * a1, forced)
        v2 = ut + h * a1
        v3 = ut + h * a2
        a3 = op.accel(t + h, u + h * v2, v3, forced)
        v4 = ut + dt * a3
        a4 = op.accel(t + dt, u + dt * v3, v4, forced)
        u = u + (dt / 6) * (ut + 2 * v2 + 2 * v3 + v4)
        ut = ut + (dt / 6) * (a1 + 2 * a2 + 2 * a3 + a4)
        size = math.sqrt(float(np.sum(u * u) + np.sum(ut * ut)) * grid.cell_volume)
        if not math.isfinite(size) or (limit > 0 and size > limit):
            raise StabilityBreach(
                f"state norm {size:g} at t = {t + dt:g} exceeds {BLOWUP_FACTOR:g} x the initial scale"
            )
        if k % stride == 0 or k == n_steps:
            yield k, t0 + k * dt, u, ut


def solve(p: ProblemSpec, cfg: SolverConfig = SolverConfig()) -> tuple:
    """Integrate to T; returns (trajectory, EnergyReport)."""
    dt, n_steps = step_plan(p, cfg)
    op = _Operator(p)
    grid = p.grid
    trajectory = []
    for k, t, u, ut in integrate(p, dt, n_steps, p.u0.samples, p.u1.samples,
                                 stride=cfg.snapshot_stride, op=op):
        t = p.T if k == n_steps else t
        if k == 0:
            trajectory.append(StateSnapshot(0.0, p.u0, p.u1))
        else:
            trajectory.append(StateSnapshot(t, Field(grid, u), Field(grid, ut)))
    return trajectory, _energy_report(trajectory, op, forced=not p.forcing.is_zero)


def _energy_report(trajectory, op: _Operator, forced: bool) -> EnergyReport:
    times = [snap.t for snap in trajectory]
    energies = [op.energy(snap.u.samples, snap.ut.samples) for snap in trajectory]
    rates = []
    for snap in trajectory:
        rate = 2 * op.damping_rate(snap.ut.samples)
        if forced:
            rate -= 2 * op.work_rate(snap.t, snap.ut.samples)
        rates.append(rate)
    residual = [
        (energies[k + 1] - energies[k]) / (times[k + 1] - times[k]) + 0.5 * (rates[k] + rates[k + 1])
        for k in range(len(times) - 1)
    ]
    violation = None
    if not forced:
        jumps = [b - a for a, b in zip(energies, energies[1:])]
        violation = max([0.0] + jumps)
    return EnergyReport(times, energies, residual, violation)


def energy(state: StateSnapshot, p: ProblemSpec) -> float:
    _check_same_grid(state.u, p.g)
    return _Operator(p).energy(state.u.samples, state.ut.samples)


def dissipation_residual(trajectory, p: ProblemSpec) -> list:
    """(E_{k+1} - E_k)/dt_k + 2 ||b^{1/2} u_t||^2 averaged over the interval."""
    if not p.forcing.is_zero:
        raise ForcingPresent("the dissipation identity only holds for f = 0")
    return _energy_report(list(trajectory), _Operator(p), forced=False).dissipation_residual


def trajectory_rows(trajectory, report: EnergyReport, s: float) -> list:
    """Rows (t, ||u||, ||(-Delta)^{s/2} u||, ||u_t||, E, residual); the last
    residual is NaN because the residual is defined per interval."""
    rows = []
    for k, snap in enumerate(trajectory):
        norms = composite_norms_array(snap.u.samples, snap.ut.samples, snap.u.grid, s)
        res = report.dissipation_residual[k] if k < len(report.dissipation_residual) else float("nan")
        rows.append((snap.t, norms.u_l2, norms.frac_u_l2, norms.ut_l2, report.energy[k], res))
    return rows


TRAJECTORY_COLUMNS = ("t", "u_l2", "frac_u_l2", "ut_l2", "energy", "dissipation_residual")


def write_trajectory_csv(path, trajectory, report: EnergyReport, s: float) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TRAJECTORY_COLUMNS)
        for row in trajectory_rows(trajectory, report, s):
            w.writerow([format(x, ".17g") for x in row])
