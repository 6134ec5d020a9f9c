"""Periodic grids, Fourier multipliers and the norms used by the energy estimates.

Everything lives on the torus [0, L)^d sampled at n points per axis. Transforms
are the unnormalized real FFT; Parseval then reads

    sum_i u_i v_i dx^d = (dx^d / n^d) * sum_k u_hat(k) conj(v_hat(k))

which fixes every constant below. Multipliers |k|^{2s} are even in k, so the
Nyquist mode is kept untouched and the operators stay exactly self-adjoint.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
import math

import numpy as np

from .errors import GridMismatch, PositivityViolation


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid:
    dim: int
    n: int
    L: float

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError(f"dim must be 1 or 2, got {self.dim}")
        if int(self.n) != self.n or not _is_power_of_two(int(self.n)) or self.n < 8:
            raise ValueError(f"n must be a power of two >= 8, got {self.n}")
        if not (self.L > 0 and math.isfinite(self.L)):
            raise ValueError(f"box length must be positive, got {self.L}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "L", float(self.L))

    @property
    def spacing(self) -> float:
        return self.L / self.n

    @property
    def cell_volume(self) -> float:
        return self.spacing ** self.dim

    @property
    def volume(self) -> float:
        return self.L ** self.dim

    @property
    def shape(self) -> tuple:
        return (self.n,) * self.dim

    @property
    def size(self) -> int:
        return self.n ** self.dim

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """Per-axis wavenumbers 2*pi*j/L for j = -n/2 .. n/2-1 (ascending)."""
        j = np.arange(-self.n // 2, self.n // 2)
        return 2.0 * np.pi * j / self.L

    @property
    def k_max(self) -> float:
        """Largest |k| on the grid (the Nyquist corner in 2-D)."""
        return math.sqrt(self.dim) * np.pi * self.n / self.L

    @cached_property
    def k_squared(self) -> np.ndarray:
        """|k|^2 laid out like ``np.fft.rfftn`` output."""
        k_full = 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.spacing)
        k_half = 2.0 * np.pi * np.fft.rfftfreq(self.n, d=self.spacing)
        if self.dim == 1:
            return k_half**2
        kx, ky = np.meshgrid(k_full, k_half, indexing="ij")
        return kx**2 + ky**2

    def axis_wavenumber(self, axis: int) -> np.ndarray:
        """Signed wavenumber along ``axis`` in rfftn layout, broadcastable."""
        if self.dim == 1 or axis == self.dim - 1:
            k = 2.0 * np.pi * np.fft.rfftfreq(self.n, d=self.spacing)
        else:
            k = 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.spacing)
        shape = [1] * self.dim
        shape[axis] = k.size
        return k.reshape(shape)

    def coords(self) -> tuple:
        """Sample coordinates, one array per axis, each of ``shape``."""
        x = np.arange(self.n) * self.spacing
        if self.dim == 1:
            return (x,)
        return tuple(np.meshgrid(x, x, indexing="ij"))

    def symbol(self, s: float) -> np.ndarray:
        """Fourier symbol |k|^{2s} of (-Delta)^s in rfftn layout."""
        return self.k_squared**s


def make_grid(dim: int, n: int, L: float) -> Grid:
    return Grid(dim, n, L)


def plane_wave(grid: Grid, mode: int, axis: int = 0, kind: str = "sin",
               amplitude: float = 1.0, shift: float = 0.0) -> np.ndarray:
    """Samples of amplitude * sin/cos(2 pi mode (x_axis - shift) / L).

    Evaluated in extended precision and rounded once, so the samples carry
    no more than half an ulp of noise. High-order multipliers amplify that
    noise by k_max^{2s}, which matters when checking eigenfunction identities.
    """
    ld = np.longdouble
    two_pi = ld(2) * np.arccos(ld(-1))
    x = np.arange(grid.n, dtype=ld) * (ld(grid.L) / grid.n)
    phase = two_pi * mode * (x - ld(shift)) / ld(grid.L)
    wave = np.sin(phase) if kind == "sin" else np.cos(phase)
    wave = (ld(amplitude) * wave).astype(np.float64)
    shape = [1] * grid.dim
    shape[axis] = grid.n
    return np.broadcast_to(wave.reshape(shape), grid.shape).copy()


@dataclass(frozen=True, eq=False)
class Field:
    """Real samples of a periodic function on ``grid`` (read-only)."""

    grid: Grid
    samples: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.array(self.samples, dtype=np.float64)
        if arr.size != self.grid.size:
            raise ValueError(
                f"expected {self.grid.size} samples for {self.grid}, got {arr.size}"
            )
        arr = arr.reshape(self.grid.shape)
        if not np.all(np.isfinite(arr)):
            raise ValueError("field samples must be finite")
        arr.flags.writeable = False
        object.__setattr__(self, "samples", arr)

    @classmethod
    def zeros(cls, grid: Grid) -> "Field":
        return cls(grid, np.zeros(grid.shape))

    @classmethod
    def constant(cls, grid: Grid, value: float) -> "Field":
        return cls(grid, np.full(grid.shape, float(value)))

    @classmethod
    def from_function(cls, grid: Grid, fn) -> "Field":
        return cls(grid, fn(*grid.coords()))

    def _coerce(self, other):
        if isinstance(other, Field):
            _check_same_grid(self, other)
            return other.samples
        return other

    def __add__(self, other):
        return Field(self.grid, self.samples + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return Field(self.grid, self.samples - self._coerce(other))

    def __rsub__(self, other):
        return Field(self.grid, self._coerce(other) - self.samples)

    def __mul__(self, other):
        return Field(self.grid, self.samples * self._coerce(other))

    __rmul__ = __mul__

    def __neg__(self):
        return Field(self.grid, -self.samples)

    def min(self) -> float:
        return float(self.samples.min())

    def max(self) -> float:
        return float(self.samples.max())

    def mean(self) -> float:
        return float(self.samples.mean())


@dataclass(frozen=True)
class FracOrder:
    s: float
    dim: int = 1

    def __post_init__(self):
        if not self.s > 0:
            raise ValueError(f"operator order s must be positive, got {self.s}")

    @property
    def d_over_2s_regime(self) -> bool:
        return self.dim > 2 * self.s


@dataclass(frozen=True)
class CompositeNorms:
    u_l2: float
    frac_u_l2: float
    frac2_u_l2: float
    ut_l2: float
    frac_ut_l2: float

    @property
    def norm1(self) -> float:
        return self.u_l2 + self.frac_u_l2 + self.ut_l2

    @property
    def norm2(self) -> float:
        return self.norm1 + self.frac2_u_l2 + self.frac_ut_l2

    @property
    def norm3(self) -> float:
        return self.norm1 + self.frac_ut_l2

    def select(self, which: int) -> float:
        return {1: self.norm1, 2: self.norm2, 3: self.norm3}[which]


def _check_same_grid(a: Field, b: Field) -> None:
    if a.grid != b.grid:
        raise GridMismatch(f"grid mismatch: {a.grid} vs {b.grid}")


# Array-level kernels. The solver works on raw arrays to avoid re-validating
# every intermediate; the Field-level API below wraps these.

def irfftn(spec: np.ndarray, grid: Grid) -> np.ndarray:
    return np.fft.irfftn(spec, s=grid.shape, axes=tuple(range(grid.dim)))


def apply_multiplier(arr: np.ndarray, grid: Grid, mult: np.ndarray) -> np.ndarray:
    return irfftn(np.fft.rfftn(arr) * mult, grid)


def frac_power_array(arr: np.ndarray, grid: Grid, s: float) -> np.ndarray:
    """(-Delta)^s applied to raw samples."""
    return apply_multiplier(arr, grid, grid.symbol(s))


def dg_array(arr: np.ndarray, grid: Grid, g: np.ndarray, half_symbol: np.ndarray) -> np.ndarray:
    """(-Delta)^{s/2}(g (-Delta)^{s/2} u) given the precomputed |k|^s."""
    inner = apply_multiplier(arr, grid, half_symbol)
    return apply_multiplier(g * inner, grid, half_symbol)


def l2_array(arr: np.ndarray, grid: Grid) -> float:
    return math.sqrt(float(np.sum(arr * arr)) * grid.cell_volume)


def lp_array(arr: np.ndarray, grid: Grid, p: float) -> float:
    a = np.abs(arr)
    top = float(a.max()) if a.size else 0.0
    if math.isinf(p):
        return top
    if top == 0.0:
        return 0.0
    # scale by the max so large p cannot overflow
    return top * (float(np.sum((a / top) ** p)) * grid.cell_volume) ** (1.0 / p)


# Field-level operations

def frac_laplacian(u: Field, s: float) -> Field:
    """(-Delta)^s u, the Fourier multiplier with symbol |k|^{2s}."""
    if not s > 0:
        raise ValueError(f"s must be positive, got {s}")
    return Field(u.grid, frac_power_array(u.samples, u.grid, s))


def apply_Dg(u: Field, g: Field, s: float) -> Field:
    """D_g^s u = (-Delta)^{s/2}(g (-Delta)^{s/2} u); requires min(g) > 0."""
    _check_same_grid(u, g)
    if not s > 0:
        raise ValueError(f"s must be positive, got {s}")
    if g.min() <= 0:
        raise PositivityViolation(f"g must be strictly positive, min(g) = {g.min():.3e}")
    half = u.grid.symbol(s / 2)
    return Field(u.grid, dg_array(u.samples, u.grid, g.samples, half))


def partial_derivative(u: Field, axis: int = 0) -> Field:
    """Spectral first derivative along ``axis``; the odd Nyquist mode is zeroed."""
    grid = u.grid
    k = grid.axis_wavenumber(axis)
    mult = 1j * k
    nyq = np.isclose(np.abs(k), np.pi * grid.n / grid.L)
    mult = np.where(nyq, 0.0, mult)
    return Field(grid, apply_multiplier(u.samples, grid, mult))


def lp_norm(u: Field, p: float) -> float:
    """Rectangle-rule L^p norm; ``p = float('inf')`` gives the max modulus."""
    if not (p >= 1):
        raise ValueError(f"p must be >= 1 or inf, got {p}")
    return lp_array(u.samples, u.grid, p)


def hs_norm(u: Field, s: float) -> tuple:
    """H^s norm in its Fourier form and in the ``L2 + fractional L2`` sum form."""
    grid = u.grid
    uh = np.fft.rfftn(u.samples)
    weight = _rfft_weights(grid)
    spec = float(np.sum(weight * (1.0 + grid.symbol(s)) * np.abs(uh) ** 2))
    fourier_form = math.sqrt(spec * grid.cell_volume / grid.size)
    sum_form = l2_array(u.samples, grid) + l2_array(
        frac_power_array(u.samples, grid, s / 2), grid
    )
    return fourier_form, sum_form


def wsp_norm(u: Field, s: float, p: float) -> float:
    """W^{s,p} norm as ||u||_{L^p} + ||(-Delta)^{s/2} u||_{L^p}."""
    return lp_norm(u, p) + lp_norm(frac_laplacian(u, s / 2), p)


def composite_norms(u: Field, u_t: Field, s: float) -> CompositeNorms:
    _check_same_grid(u, u_t)
    return composite_norms_array(u.samples, u_t.samples, u.grid, s)


def composite_norms_array(u: np.ndarray, ut: np.ndarray, grid: Grid, s: float) -> CompositeNorms:
    uh = np.fft.rfftn(u)
    uth = np.fft.rfftn(ut)
    half = grid.symbol(s / 2)
    full = grid.symbol(s)
    return CompositeNorms(
        u_l2=l2_array(u, grid),
        frac_u_l2=l2_array(irfftn(uh * half, grid), grid),
        frac2_u_l2=l2_array(irfftn(uh * full, grid), grid),
        ut_l2=l2_array(ut, grid),
        frac_ut_l2=l2_array(irfftn(uth * half, grid), grid),
    )


def inner_product(u: Field, v: Field) -> float:
    """Physical-space L^2 inner product sum(u v) dx^d."""
    _check_same_grid(u, v)
    return float(np.sum(u.samples * v.samples)) * u.grid.cell_volume


def spectral_inner_product(u: Field, v: Field) -> float:
    """The same inner product evaluated from the full complex spectra."""
    _check_same_grid(u, v)
    grid = u.grid
    uh = np.fft.fftn(u.samples)
    vh = np.fft.fftn(v.samples)
    return float(np.real(np.sum(uh * np.conj(vh)))) * grid.cell_volume / grid.size


def _rfft_weights(grid: Grid) -> np.ndarray:
    """Multiplicity of each rfftn coefficient in the full spectrum."""
    m = grid.n // 2 + 1
    w = np.full(m, 2.0)
    w[0] = 1.0
    w[-1] = 1.0  # Nyquist, n even
    if grid.dim == 1:
        return w
    return np.broadcast_to(w, (grid.n, m))
