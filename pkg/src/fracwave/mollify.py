"""Mollifier nets psi_eps(x) = eps^{-d} psi(x / eps) and a catalog of singular data.

Kernels are sampled on the periodic grid (minimum-image distance to the
centre) and then renormalized to unit discrete mass, so that convolving a
grid delta reproduces the kernel exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
import numpy as np

from .errors import UnresolvableKernel
from .spectral import Field, Grid, irfftn, plane_wave

KERNELS = ("compact_bump", "gaussian")
DATUM_KINDS = ("delta", "delta_prime", "delta_squared", "heaviside", "smooth_reference")
MIN_POINTS_PER_EPS = 4


@dataclass(frozen=True)
class MollifierSpec:
    epsilon: float
    kernel: str = "compact_bump"

    def __post_init__(self):
        if self.kernel not in KERNELS:
            raise ValueError(f"unknown kernel {self.kernel!r}; expected one of {KERNELS}")
        if not (0 < self.epsilon <= 1):
            raise ValueError(f"epsilon must lie in (0, 1], got {self.epsilon}")

    def with_epsilon(self, epsilon: float) -> "MollifierSpec":
        return MollifierSpec(epsilon, self.kernel)


@dataclass(frozen=True)
class SingularDatum:
    """One catalog entry; ``mode`` is only used by ``smooth_reference``."""

    kind: str
    center: tuple
    amplitude: float = 1.0
    mode: int = 1

    def __post_init__(self):
        if self.kind not in DATUM_KINDS:
            raise ValueError(f"unknown datum kind {self.kind!r}; expected one of {DATUM_KINDS}")
        object.__setattr__(self, "center", tuple(float(c) for c in np.atleast_1d(self.center)))

    def check_inside(self, grid: Grid) -> None:
        if len(self.center) != grid.dim:
            raise ValueError(f"center {self.center} has wrong dimension for a {grid.dim}-d grid")
        if not all(0 < c < grid.L for c in self.center):
            raise ValueError(f"center {self.center} must lie strictly inside (0, {grid.L})^{grid.dim}")


def check_resolvable(epsilon: float, grid: Grid) -> None:
    if epsilon < MIN_POINTS_PER_EPS * grid.spacing * (1 - 1e-12):
        raise UnresolvableKernel(
            f"epsilon = {epsilon:g} is below {MIN_POINTS_PER_EPS} grid spacings "
            f"({MIN_POINTS_PER_EPS * grid.spacing:g})"
        )


def _offsets(grid: Grid, center) -> tuple:
    """Minimum-image displacement x - center along each axis."""
    if center is None:
        center = (0.0,) * grid.dim
    L = grid.L
    return tuple(((x - c + L / 2) % L) - L / 2 for x, c in zip(grid.coords(), center))


def _profile(kernel: str, r2: np.ndarray) -> np.ndarray:
    """Unnormalized kernel as a function of |x/eps|^2."""
    if kernel == "gaussian":
        return np.exp(-r2)
    out = np.zeros_like(r2)
    inside = r2 < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - r2[inside]))
    return out


def _profile_slope(kernel: str, r2: np.ndarray) -> np.ndarray:
    """d(profile)/d(r2)."""
    if kernel == "gaussian":
        return -np.exp(-r2)
    out = np.zeros_like(r2)
    inside = r2 < 1.0
    q = 1.0 - r2[inside]
    out[inside] = -np.exp(-1.0 / q) / q**2
    return out


def _sampled_kernel(spec: MollifierSpec, grid: Grid, center=None):
    check_resolvable(spec.epsilon, grid)
    offs = _offsets(grid, center)
    r2 = sum((o / spec.epsilon) ** 2 for o in offs)
    raw = _profile(spec.kernel, r2)
    mass = float(raw.sum()) * grid.cell_volume
    return raw, mass, offs, r2


def kernel_eval(spec: MollifierSpec, grid: Grid, center=None) -> Field:
    """psi_eps sampled on ``grid`` around ``center`` (default: the origin)."""
    raw, mass, _, _ = _sampled_kernel(spec, grid, center)
    return Field(grid, raw / mass)


def kernel_hat(spec: MollifierSpec, grid: Grid) -> np.ndarray:
    """rfftn of the origin-centred kernel times dx^d (the discrete transform)."""
    psi = kernel_eval(spec, grid).samples
    return np.fft.rfftn(psi) * grid.cell_volume


def regularize(datum: Field, spec: MollifierSpec) -> Field:
    """Periodic convolution datum * psi_eps, done as a spectral product."""
    grid = datum.grid
    return Field(grid, irfftn(np.fft.rfftn(datum.samples) * kernel_hat(spec, grid), grid))


def grid_delta(grid: Grid, index=None) -> Field:
    """Discrete delta: 1/dx^d at one grid node (default: the origin)."""
    arr = np.zeros(grid.shape)
    arr[index if index is not None else (0,) * grid.dim] = 1.0 / grid.cell_volume
    return Field(grid, arr)


def singular_net(datum: SingularDatum, spec: MollifierSpec, grid: Grid) -> Field:
    """The eps-net realizing a catalog datum directly on ``grid``."""
    datum.check_inside(grid)
    check_resolvable(spec.epsilon, grid)
    amp = datum.amplitude
    if datum.kind in ("delta", "delta_squared", "delta_prime"):
        raw, mass, offs, r2 = _sampled_kernel(spec, grid, datum.center)
        psi = raw / mass
        if datum.kind == "delta":
            return Field(grid, amp * psi)
        if datum.kind == "delta_squared":
            return Field(grid, amp * psi**2)
        # chain rule on profile(|x/eps|^2), same normalization as psi
        dpsi = _profile_slope(spec.kernel, r2) * 2.0 * offs[0] / spec.epsilon**2 / mass
        return Field(grid, amp * dpsi)
    if datum.kind == "heaviside":
        # periodic step: up through the centre, back down at the box edge
        x = grid.coords()[0]
        c = datum.center[0]
        step = np.where(x > c, 1.0, 0.0)
        step[np.isclose(x, c, rtol=0, atol=1e-12 * grid.L)] = 0.5
        return regularize(Field(grid, amp * step), spec)
    wave = plane_wave(grid, datum.mode, axis=0, kind="cos", amplitude=amp, shift=datum.center[0])
    return regularize(Field(grid, wave), spec)


def default_ladder(grid: Grid, k_min: int = 2, k_max: int = 6) -> list:
    """eps_k = 2^-k for k = k_min..k_max, dropping entries below 4 dx."""
    lim = MIN_POINTS_PER_EPS * grid.spacing * (1 - 1e-12)
    return [2.0**-k for k in range(k_min, k_max + 1) if 2.0**-k >= lim]


def moderateness_exponent(norms) -> tuple:
    """Least-squares slope of log(norm) against log(eps), with its r^2.

    A moderate net behaves like eps^{-N}; the slope reported is -N.
    """
    pts = [(float(e), float(v)) for e, v in norms]
    if len(pts) < 4:
        raise ValueError(f"need at least 4 (eps, norm) points, got {len(pts)}")
    eps = np.array([p[0] for p in pts])
    vals = np.array([p[1] for p in pts])
    if np.any(np.diff(eps) >= 0):
        raise ValueError("epsilons must be strictly decreasing")
    if np.any(vals <= 0) or not np.all(np.isfinite(vals)):
        raise ValueError("norms must be positive and finite for a log-log fit")
    x, y = np.log(eps), np.log(vals)
    xc, yc = x - x.mean(), y - y.mean()
    slope = float(np.dot(xc, yc) / np.dot(xc, xc))
    ss_tot = float(np.dot(yc, yc))
    resid = yc - slope * xc
    ss_res = float(np.dot(resid, resid))
    # an exactly flat series is a perfect fit with slope 0
    r2 = 1.0 if ss_tot <= 1e-28 * max(1.0, float(np.dot(y, y))) else 1.0 - ss_res / ss_tot
    return slope, r2
