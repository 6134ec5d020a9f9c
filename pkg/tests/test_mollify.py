import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from fracwave.errors import GridMismatch, UnresolvableKernel
from fracwave.mollify import (
    MollifierSpec,
    SingularDatum,
    default_ladder,
    grid_delta,
    kernel_eval,
    moderateness_exponent,
    regularize,
    singular_net,
)
from fracwave.spectral import Field, frac_laplacian, l2_array, lp_norm, make_grid, partial_derivative


def bump(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = np.abs(x) < 1
    out[inside] = np.exp(-1.0 / (1.0 - x[inside] ** 2))
    return out


def quad_lp_of_scaled_bump(eps, p):
    """||eps^-1 psi(x/eps)||_p for the unit-mass 1-d bump, by adaptive quadrature."""
    f = lambda x: float(bump(np.array([x]))[0])
    mass = integrate.quad(f, -1, 1, epsabs=1e-14, limit=200)[0]
    if math.isinf(p):
        return f(0.0) / mass / eps
    # substitute x = eps y so the integrand stays resolved at every eps
    integral = integrate.quad(lambda y: f(y) ** p, -1, 1, epsabs=1e-14, limit=200)[0]
    return (eps * integral / (mass * eps) ** p) ** (1.0 / p)


LADDER = [2.0**-k for k in range(2, 7)]


class TestSpecs:
    def test_epsilon_range(self):
        for bad in (0.0, -0.1, 1.5):
            with pytest.raises(ValueError):
                MollifierSpec(bad)
        assert MollifierSpec(1.0).epsilon == 1.0

    def test_unknown_kernel(self):
        with pytest.raises(ValueError):
            MollifierSpec(0.5, "box")

    def test_datum_center_inside(self):
        grid = make_grid(1, 64, 1.0)
        with pytest.raises(ValueError):
            singular_net(SingularDatum("delta", (1.0,)), MollifierSpec(0.25), grid)
        with pytest.raises(ValueError):
            singular_net(SingularDatum("delta", (0.5, 0.5)), MollifierSpec(0.25), grid)
        with pytest.raises(ValueError):
            SingularDatum("dirac", (0.5,))


class TestKernel:
    @pytest.mark.parametrize("kernel", ["compact_bump", "gaussian"])
    @pytest.mark.parametrize("dim,n", [(1, 256), (2, 64)])
    def test_unit_mass(self, kernel, dim, n):
        grid = make_grid(dim, n, 1.0)
        for eps in default_ladder(grid):
            psi = kernel_eval(MollifierSpec(eps, kernel), grid)
            assert abs(psi.samples.sum() * grid.cell_volume - 1.0) <= 1e-12
            assert psi.min() >= 0

    def test_unresolvable(self):
        grid = make_grid(1, 64, 1.0)
        with pytest.raises(UnresolvableKernel):
            kernel_eval(MollifierSpec(3.9 / 64), grid)
        kernel_eval(MollifierSpec(4 / 64), grid)

    @pytest.mark.parametrize("dim,n", [(1, 512), (2, 128)])
    def test_max_scales_like_eps_to_minus_d(self, dim, n):
        grid = make_grid(dim, n, 1.0)
        hi = kernel_eval(MollifierSpec(0.25), grid).max()
        lo = kernel_eval(MollifierSpec(0.125), grid).max()
        assert abs(lo / hi / 2**dim - 1) <= 0.05

    def test_compact_support(self):
        grid = make_grid(1, 256, 1.0)
        psi = kernel_eval(MollifierSpec(0.125), grid, center=(0.5,))
        x = grid.coords()[0]
        assert np.all(psi.samples[np.abs(x - 0.5) >= 0.125] == 0)
        assert np.all(psi.samples[np.abs(x - 0.5) < 0.12] > 0)

    @pytest.mark.parametrize("eps", [0.15, 0.3, 1.0])
    def test_gaussian_positive(self, eps):
        # exp(-(L / 2 eps)^2) must be representable for strict positivity to be observable
        grid = make_grid(1, 256, 2 * np.pi)
        assert kernel_eval(MollifierSpec(eps, "gaussian"), grid).min() > 0


class TestRegularize:
    @pytest.mark.parametrize("kernel", ["compact_bump", "gaussian"])
    def test_constants_fixed(self, kernel):
        grid = make_grid(2, 32, 1.0)
        out = regularize(Field.constant(grid, 3.5), MollifierSpec(0.25, kernel))
        assert np.max(np.abs(out.samples - 3.5)) <= 1e-12

    @pytest.mark.parametrize("dim,n", [(1, 128), (2, 32)])
    def test_grid_delta_reproduces_kernel(self, dim, n):
        grid = make_grid(dim, n, 1.0)
        spec = MollifierSpec(0.25)
        out = regularize(grid_delta(grid), spec)
        psi = kernel_eval(spec, grid)
        assert np.max(np.abs(out.samples - psi.samples)) <= 1e-12 * psi.max()

    def test_mass_preserved(self):
        rng = np.random.default_rng(1)
        grid = make_grid(1, 128, 2.0)
        f = Field(grid, rng.standard_normal(grid.shape) + 2)
        out = regularize(f, MollifierSpec(0.125))
        assert abs(out.samples.sum() - f.samples.sum()) * grid.cell_volume <= 1e-10 * abs(f.samples.sum() * grid.cell_volume)

    def test_gaussian_damps_modes(self):
        rng = np.random.default_rng(2)
        grid = make_grid(1, 128, 1.0)
        f = Field(grid, rng.standard_normal(grid.shape))
        out = regularize(f, MollifierSpec(0.0625, "gaussian"))
        assert np.all(np.abs(np.fft.rfft(out.samples)) <= np.abs(np.fft.rfft(f.samples)) * (1 + 1e-12) + 1e-12)

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 2**31 - 1), p=st.sampled_from([1.0, 2.0, 3.0, np.inf]), k=st.integers(2, 5))
    def test_young(self, seed, p, k):
        rng = np.random.default_rng(seed)
        grid = make_grid(1, 128, 1.0)
        f = Field(grid, rng.standard_normal(grid.shape))
        spec = MollifierSpec(2.0**-k)
        assert abs(lp_norm(kernel_eval(spec, grid), 1) - 1) <= 1e-12
        assert lp_norm(regularize(f, spec), p) <= lp_norm(f, p) * (1 + 1e-12)

    @pytest.mark.parametrize("s", [0.25, 0.5, 1.0])
    def test_commutes_with_frac_laplacian(self, s):
        rng = np.random.default_rng(3)
        grid = make_grid(2, 32, 1.0)
        f = Field(grid, rng.standard_normal(grid.shape))
        spec = MollifierSpec(0.25)
        a = regularize(frac_laplacian(f, s), spec)
        b = frac_laplacian(regularize(f, spec), s)
        assert np.max(np.abs(a.samples - b.samples)) <= 1e-10 * np.max(np.abs(a.samples))

    def test_grid_mismatch(self):
        f = Field.zeros(make_grid(1, 64, 1.0))
        out = regularize(f, MollifierSpec(0.25))
        with pytest.raises(GridMismatch):
            _ = out + Field.zeros(make_grid(1, 32, 1.0))

    @pytest.mark.parametrize("kernel", ["compact_bump", "gaussian"])
    def test_net_consistency(self, kernel):
        grid = make_grid(1, 256, 1.0)
        x = grid.coords()[0]
        f = Field(grid, np.sin(2 * np.pi * x) + 0.5 * np.cos(6 * np.pi * x))
        errs = [l2_array(regularize(f, MollifierSpec(e, kernel)).samples - f.samples, grid) for e in default_ladder(grid)]
        assert all(b < a for a, b in zip(errs, errs[1:]))
        assert errs[-1] < 0.05 * errs[0]


class TestSingularNets:
    def setup_method(self):
        self.grid = make_grid(1, 256, 1.0)
        self.center = SingularDatum("delta", (0.5,)).center

    def net(self, kind, eps, **kw):
        return singular_net(SingularDatum(kind, (0.5,), **kw), MollifierSpec(eps), self.grid)

    def test_delta_l1_is_amplitude(self):
        for eps in LADDER:
            assert abs(lp_norm(self.net("delta", eps, amplitude=-2.5), 1) - 2.5) <= 1e-12

    def test_delta_matches_quadrature(self):
        for eps in LADDER:
            for p in (1, 2, np.inf):
                num = lp_norm(self.net("delta", eps), p)
                assert abs(num / quad_lp_of_scaled_bump(eps, p) - 1) < 0.02

    @pytest.mark.parametrize("p", [1, 2, np.inf])
    def test_delta_slopes(self, p):
        oracle, _ = moderateness_exponent([(e, quad_lp_of_scaled_bump(e, p)) for e in LADDER])
        assert abs(oracle + (1 - 1 / p)) < 1e-9
        slope, r2 = moderateness_exponent([(e, lp_norm(self.net("delta", e), p)) for e in LADDER])
        assert abs(slope - oracle) <= 0.05
        assert r2 > 0.99

    def test_delta_squared_l1_slope(self):
        oracle, _ = moderateness_exponent([(e, quad_lp_of_scaled_bump(e, 2) ** 2) for e in LADDER])
        slope, _ = moderateness_exponent([(e, lp_norm(self.net("delta_squared", e), 1)) for e in LADDER])
        assert abs(oracle + 1) < 1e-9
        assert abs(slope + 1) <= 0.05

    def test_delta_prime_is_derivative(self):
        grid = make_grid(1, 1024, 1.0)
        spec = MollifierSpec(0.125)
        psi = singular_net(SingularDatum("delta", (0.5,)), spec, grid).samples
        dpsi = singular_net(SingularDatum("delta_prime", (0.5,)), spec, grid).samples
        spec_d = partial_derivative(Field(grid, psi)).samples
        assert np.max(np.abs(dpsi - spec_d)) < 1e-6 * np.max(np.abs(dpsi))
        assert abs(dpsi.sum()) * grid.spacing < 1e-10 * np.max(np.abs(dpsi))

    def test_heaviside_step(self):
        h = self.net("heaviside", 0.0625, amplitude=2.0).samples
        x = self.grid.coords()[0]
        assert abs(h[np.argmin(np.abs(x - 0.5))] - 1.0) < 1e-12
        assert np.max(np.abs(h[(x > 0.6) & (x < 0.9)] - 2.0)) < 1e-12
        assert np.max(np.abs(h[(x > 0.1) & (x < 0.4)])) < 1e-12

    def test_smooth_reference(self):
        eps = 0.0625
        out = self.net("smooth_reference", eps, mode=2)
        x = self.grid.coords()[0]
        raw = np.cos(4 * np.pi * (x - 0.5))
        # a single cosine is an eigenfunction of the convolution
        ratio = out.samples @ raw / (raw @ raw)
        assert np.max(np.abs(out.samples - ratio * raw)) < 1e-12
        assert 0.9 < ratio < 1


class TestModerateness:
    def test_exact_power(self):
        slope, r2 = moderateness_exponent([(e, 3.0 * e**-2) for e in LADDER])
        assert abs(slope + 2) < 1e-12 and abs(r2 - 1) < 1e-12

    def test_constant(self):
        slope, r2 = moderateness_exponent([(e, 7.0) for e in LADDER])
        assert abs(slope) < 1e-12 and r2 == 1.0

    def test_linf_delta(self):
        grid = make_grid(1, 256, 1.0)
        slope, _ = moderateness_exponent([(e, kernel_eval(MollifierSpec(e), grid).max()) for e in LADDER])
        assert abs(slope + 1) <= 0.05

    @pytest.mark.parametrize(
        "pts",
        [
            [(0.5, 1), (0.25, 2), (0.125, 3)],
            [(0.5, 1), (0.25, 2), (0.25, 3), (0.1, 4)],
            [(0.1, 1), (0.2, 2), (0.3, 3), (0.4, 4)],
            [(0.5, 1), (0.25, 0), (0.125, 3), (0.1, 4)],
            [(0.5, 1), (0.25, -1), (0.125, 3), (0.1, 4)],
        ],
    )
    def test_rejects(self, pts):
        with pytest.raises(ValueError):
            moderateness_exponent(pts)

    def test_ladder_clipped(self):
        assert default_ladder(make_grid(1, 256, 1.0)) == LADDER
        assert default_ladder(make_grid(1, 64, 1.0)) == LADDER[:3]
