import math

import numpy as np
import pytest

from qvdp import analytic as an
from qvdp.errors import DomainError
from qvdp.liouvillian import SystemParams


class TestSteadyState:
    def test_denominator_example(self):
        # F=1, D=0, k1=1, k2=1: P = 21, R = 21*4 - 12
        assert an.denominator(SystemParams(0, 1, 1)) == pytest.approx(72)
        assert an.denominator(SystemParams(0, 0, 1e3)) == pytest.approx(9 * 3.001)

    def test_undriven_values(self):
        s = an.analytic_steady_state(SystemParams(0, 0, 1e3))
        assert s.rho00 == pytest.approx(0.66644, abs=1e-5)
        lim = an.analytic_steady_state(SystemParams(0, 0, 1e3), deep_limit=True)
        assert (lim.rho00, lim.rho11, lim.rho22) == pytest.approx((2 / 3, 1 / 3, 0), abs=1e-15)

    @pytest.mark.parametrize("F", [0.0, 1.0, 4.0, 10.0])
    @pytest.mark.parametrize("D", [-3.0, 0.0, 2.0])
    @pytest.mark.parametrize("k2", [0.5, 10.0, 1e4])
    def test_trace_identity(self, F, D, k2):
        s = an.analytic_steady_state(SystemParams(D, F, k2))
        assert s.rho00 + s.rho11 + s.rho22 == pytest.approx(1, abs=1e-14)

    @pytest.mark.parametrize("F,D,k2", [(1.0, 0.0, 1.0), (3.0, -2.0, 50.0), (10.0, 5.0, 1e3)])
    def test_stationarity(self, F, D, k2):
        p = SystemParams(D, F, k2)
        s = an.analytic_steady_state(p)
        r = an.stationarity_residuals(s, p)
        assert abs(r[0]) < 1e-12 and abs(r[1]) < 1e-12 and abs(r[3]) < 1e-12
        P = 12 * F**2 + 4 * D**2 + 9
        assert r[2].real == pytest.approx(-3 * P / (k2 * s.R), rel=1e-9)

    def test_rho22_vanishes_at_large_kappa2(self):
        assert abs(an.analytic_steady_state(SystemParams(1.0, 5.0, 1e6)).rho22) < 1e-5
        assert abs(an.analytic_steady_state(SystemParams(1.0, 5.0, 1e12)).rho22) < 1e-9

    def test_zero_kappa2_is_a_domain_error(self):
        with pytest.raises(DomainError):
            an.analytic_steady_state(SystemParams(0, 1, 0.0))
        assert an.analytic_steady_state(SystemParams(0, 1, 0.0), deep_limit=True).rho22 == 0

    def test_ansatz_validity_flag(self):
        assert an.analytic_steady_state(SystemParams(0, 10, 1e3)).valid
        assert not an.analytic_steady_state(SystemParams(0, 11, 1e3)).valid


class TestTomogram:
    @pytest.mark.parametrize("F,D", [(0, 0), (1, 2), (10, -5)])
    def test_normalized(self, F, D):
        X = np.linspace(-8, 8, 2001)
        for theta in (0.0, 1.0, 4.0):
            w = an.analytic_tomogram(SystemParams(D, F, 30.0), X, theta)
            assert np.trapezoid(w, X) == pytest.approx(1, abs=1e-10)

    def test_undriven_matches_fock_sum(self):
        X = np.linspace(-4, 4, 41)
        w = an.analytic_tomogram(SystemParams(0, 0, 1.0), X, 0.3, deep_limit=True)
        assert np.allclose(w, an.undriven_tomogram(X), atol=1e-14)

    def test_closed_form_matches_in_deep_limit(self):
        X, th = np.meshgrid(np.linspace(-5, 5, 31), np.linspace(0, 6, 9))
        p = SystemParams(1.5, 2.0, 1.0)
        assert np.allclose(an.closed_form_tomogram(p, X, th), an.analytic_tomogram(p, X, th, True), atol=1e-14)


class TestCoherence:
    @pytest.mark.parametrize("D,expected", [(0.0, 1.06066), (2.0, 1.76777)])
    def test_critical_drive(self, D, expected):
        assert an.critical_drive(D) == pytest.approx(expected, abs=1e-5)

    @pytest.mark.parametrize("D", [0.0, 1.0, 3.0])
    def test_peak_value(self, D):
        p = SystemParams(D, an.critical_drive(D), math.inf)
        assert an.coherence(p) == pytest.approx(1 / (6 * math.sqrt(2)), abs=1e-14)

    def test_homogeneity(self):
        p = SystemParams(1.0, 2.0, 1e3)
        q = SystemParams(3.0, 6.0, 1e3, kappa1=3.0)
        assert an.coherence(p) == pytest.approx(an.coherence(q))
        assert an.critical_drive(3.0, 3.0) == pytest.approx(3 * an.critical_drive(1.0))

    def test_gradient_changes_sign(self):
        Fc = an.critical_drive(2.0)
        assert an.coherence_gradient(SystemParams(2.0, Fc - 0.1, 1.0)) > 0
        assert an.coherence_gradient(SystemParams(2.0, Fc, 1.0)) == pytest.approx(0, abs=1e-15)
        assert an.coherence_gradient(SystemParams(2.0, Fc + 0.1, 1.0)) < 0

    def test_mean_excitation(self):
        values = [an.mean_excitation(SystemParams(1.0, F, 1.0)) for F in np.linspace(0, 10, 11)]
        assert np.all(np.diff(values) > 0)
        assert values[0] == pytest.approx(1 / 3)
        assert an.mean_excitation(SystemParams(0.0, 1e6, 1.0)) == pytest.approx(0.5, abs=1e-9)
        assert an.mean_excitation(SystemParams(0.0, 2.0, 1.0)) > an.mean_excitation(SystemParams(1.0, 2.0, 1.0))
        assert an.coherence(SystemParams(0.0, 1e8, 1.0)) < 1e-7
