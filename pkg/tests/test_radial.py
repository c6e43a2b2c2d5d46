import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.special import gamma, j0, j1, jn_zeros

from shapelab import radial
from shapelab._radial_kernels import boundary_functional_numba, boundary_functional_numpy
from shapelab.radial import INF


def bessel_robin_root(beta):
    """Principal Robin eigenvalue of the unit disk: sqrt(l) J1(sqrt l) = beta J0(sqrt l)."""
    j01 = jn_zeros(0, 1)[0]
    f = lambda l: math.sqrt(l) * j1(math.sqrt(l)) - beta * j0(math.sqrt(l))
    return brentq(f, 1e-14, j01**2 * (1 - 1e-15), xtol=1e-15, rtol=1e-15)


def spherical_robin_root(beta):
    """Unit ball in R^3: u = sin(k s)/s, so k cot k = 1 - beta."""
    f = lambda k: k * math.cos(k) - (1.0 - beta) * math.sin(k)
    return brentq(f, 1e-9, math.pi, xtol=1e-15, rtol=1e-15) ** 2


class TestUnitBallVolume:
    def test_low_dims(self):
        assert radial.unit_ball_volume(2) == pytest.approx(math.pi, rel=1e-15)
        assert radial.unit_ball_volume(3) == pytest.approx(4 * math.pi / 3, rel=1e-15)

    @pytest.mark.parametrize("d", range(1, 12))
    def test_against_gamma(self, d):
        assert radial.unit_ball_volume(d) == pytest.approx(math.pi ** (d / 2) / gamma(d / 2 + 1), rel=1e-13)

    def test_d5(self):
        assert radial.unit_ball_volume(5) == pytest.approx(8 * math.pi**2 / 15, rel=1e-14)


class TestTorsion:
    def test_closed_forms(self):
        assert radial.torsion_ball(1, 1, 2) == pytest.approx(5 * math.pi / 8, rel=1e-14)
        assert radial.torsion_ball(1, INF, 2) == pytest.approx(math.pi / 8, rel=1e-14)
        assert radial.torsion_ball(2, 0.5, 3) == pytest.approx(4 * math.pi / 9 * 38.4, rel=1e-14)

    def test_profile(self):
        assert radial.torsion_ball_profile(1, 1, 2, 1.0) == pytest.approx(0.5)
        assert radial.torsion_ball_profile(1, 1, 2, 0.0) == pytest.approx(0.75)
        # Robin residual w'(1) + w(1) with w' = -s/d
        assert -1.0 / 2 + radial.torsion_ball_profile(1, 1, 2, 1.0) == pytest.approx(0.0, abs=1e-15)

    @pytest.mark.parametrize("r,beta,d", [(1, 1, 2), (0.7, 3.0, 3), (2.0, INF, 2), (1.5, 0.2, 4)])
    def test_profile_integrates_to_torsion(self, r, beta, d):
        sig = d * radial.unit_ball_volume(d)
        val, _ = quad(lambda s: radial.torsion_ball_profile(r, beta, d, s) * s ** (d - 1), 0, r, epsabs=1e-14, epsrel=1e-14)
        assert sig * val == pytest.approx(radial.torsion_ball(r, beta, d), rel=1e-12)

    @pytest.mark.parametrize("d", [2, 3])
    def test_monotone_in_beta(self, d):
        vals = [radial.torsion_ball(1.0, b, d) for b in (0.1, 1, 10, 100)]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    @pytest.mark.parametrize("r,beta,d", [(1, 1, 2), (0.5, 10, 3), (2, 0.1, 2)])
    def test_ball_bound(self, r, beta, d):
        w = radial.unit_ball_volume(d)
        lower = max(radial.torsion_ball(r, INF, d), w * r ** (d + 1) / (d * beta))
        assert radial.torsion_ball(r, beta, d) >= lower

    def test_invalid(self):
        with pytest.raises(ValueError):
            radial.torsion_ball(1, -1, 2)
        with pytest.raises(ValueError):
            radial.torsion_ball(0, 1, 2)


class TestEigenvalue:
    def test_dirichlet_disk(self):
        assert radial.eig_ball(1, INF, 2, 1e-8) == pytest.approx(jn_zeros(0, 1)[0] ** 2, abs=1e-8)

    def test_dirichlet_ball3(self):
        assert radial.eig_ball(1, INF, 3) == pytest.approx(math.pi**2, abs=1e-9)

    @pytest.mark.parametrize("beta", [0.01, 0.1, 1.0, 5.0, 50.0])
    def test_robin_disk_bessel(self, beta):
        assert radial.eig_ball(1, beta, 2, 1e-10) == pytest.approx(bessel_robin_root(beta), abs=1e-9)

    @pytest.mark.parametrize("beta", [0.05, 1.0, 7.0])
    def test_robin_ball3_closed_form(self, beta):
        assert radial.eig_ball(1, beta, 3, 1e-10) == pytest.approx(spherical_robin_root(beta), abs=1e-9)

    def test_robin_disk_above_lower_bound(self):
        assert radial.eig_ball(1, 1, 2) > radial.eig_ball_lower_bound(1, 1) == 0.125

    def test_lower_bound_values(self):
        assert radial.eig_ball_lower_bound(2, 0.5) == pytest.approx(0.03125)

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_small_beta_limit(self, d):
        # lambda ~ d*beta for small beta (constant test function)
        for beta in (1e-4, 1e-7):
            assert radial.eig_ball(1, beta, d) == pytest.approx(d * beta, rel=2 * beta)

    def test_series_branch_is_continuous(self):
        b = radial.SERIES_BETA
        lo = radial.eig_ball(1, b * (1 - 1e-9), 2)
        hi = radial.eig_ball(1, b * (1 + 1e-9), 2)
        assert hi == pytest.approx(lo, rel=1e-8)

    @pytest.mark.parametrize("d", [2, 3])
    def test_monotone_in_beta(self, d):
        vals = [radial.eig_ball(1.0, b, d) for b in (0.1, 1, 10, 100)]
        assert all(a < b for a, b in zip(vals, vals[1:]))

    @settings(max_examples=30, deadline=None)
    @given(st.floats(0.05, 20), st.floats(0.01, 100), st.sampled_from([2, 3]))
    def test_bracketing(self, r, beta, d):
        lam = radial.eig_ball(r, beta, d)
        assert radial.eig_ball_lower_bound(r, beta) <= lam
        assert lam <= min(radial.eig_ball(r, INF, d), beta * d / r) * (1 + 1e-10)

    @pytest.mark.parametrize("t", [0.5, 2.0, 5.0])
    @pytest.mark.parametrize("d", [2, 3])
    def test_scaling(self, t, d):
        r, beta = 0.8, 1.3
        assert radial.eig_ball(t * r, beta, d) == pytest.approx(t**-2 * radial.eig_ball(r, t * beta, d), rel=1e-8)
        assert radial.torsion_ball(t * r, beta, d) == pytest.approx(t ** (d + 2) * radial.torsion_ball(r, t * beta, d), rel=1e-12)

    @pytest.mark.parametrize("d", [2, 3])
    def test_dirichlet_limit(self, d):
        assert radial.eig_ball(1, 1e4, d) == pytest.approx(radial.eig_ball(1, INF, d), rel=0.01)
        assert radial.torsion_ball(1, 1e4, d) == pytest.approx(radial.torsion_ball(1, INF, d), rel=0.01)

    def test_extreme_radius(self):
        # beta*r tiny: series branch; large r: scan bracket
        assert radial.eig_ball(1e-12, 1, 2) == pytest.approx(2e12, rel=1e-6)
        assert radial.eig_ball(100.0, 1, 2) == pytest.approx(bessel_robin_root(100.0) / 1e4, rel=1e-6)

    def test_invalid(self):
        for args in ((0, 1, 2), (1, 0, 2), (1, -2, 2), (1, 1, 2, 0.0)):
            with pytest.raises(ValueError):
                radial.eig_ball(*args)


class TestCd:
    def test_singleton(self):
        assert radial.estimate_Cd(2, [(1.0, 1.0)]) == pytest.approx(2 * radial.eig_ball(1, 1, 2), rel=1e-12)

    def test_at_least_quarter(self):
        grid = [(r, b) for r in (0.5, 1, 2) for b in (0.1, 1, 10)]
        for d in (2, 3):
            c = radial.estimate_Cd(d, grid)
            assert math.isfinite(c) and c >= 0.25

    def test_empty(self):
        with pytest.raises(ValueError):
            radial.estimate_Cd(2, [])


class TestKernels:
    @pytest.mark.parametrize("dirichlet,beta", [(True, 0.0), (False, 0.7)])
    def test_backends_agree(self, dirichlet, beta):
        mus = np.linspace(0.1, 30.0, 17)
        a = boundary_functional_numba(mus, beta, 2, 512, dirichlet)
        b = boundary_functional_numpy(mus, beta, 2, 512, dirichlet)
        np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-14)

    def test_dirichlet_functional_is_bessel(self):
        mus = np.array([1.0, 4.0, 9.0])
        got = boundary_functional_numpy(mus, 0.0, 2, 4096, True)
        np.testing.assert_allclose(got, j0(np.sqrt(mus)), atol=1e-10)
