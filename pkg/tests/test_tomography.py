import math

import numpy as np
import pytest

from qvdp import analytic, fock, liouvillian, tomography as tm
from qvdp.errors import NormalizationError
from qvdp.liouvillian import SystemParams


class TestWavefunctions:
    def test_ground_state_peak(self):
        assert tm.quadrature_wavefunction(0, 0.0) == pytest.approx(math.pi ** -0.25)

    def test_orthonormal(self):
        X = np.linspace(-12, 12, 2001)
        psi = tm.quadrature_wavefunctions(20, X)
        gram = np.trapezoid(psi[:, None, :] * psi[None, :, :], X, axis=2)
        assert np.max(np.abs(gram - np.eye(21))) < 1e-10

    @pytest.mark.parametrize("N", range(11))
    def test_series_matches_recurrence(self, N):
        for X, theta in [(0.3, 0.0), (-1.7, 2.1), (2.5, 5.0)]:
            want = tm.quadrature_wavefunction(N, X) * np.exp(1j * N * theta)
            assert tm.quadrature_overlap_series(N, X, theta) == pytest.approx(want, abs=1e-12)


class TestTomogram:
    def test_vacuum(self):
        grid = tm.QuadratureGrid(n_x=81, n_theta=8)
        t = tm.tomogram(fock.vacuum(fock.FockSpace(4)), grid)
        assert np.allclose(t.values, np.exp(-grid.x**2) / math.sqrt(math.pi), atol=1e-15)

    def test_limit_cycle(self):
        grid = tm.QuadratureGrid(n_x=81, n_theta=8)
        t = tm.tomogram(analytic.limit_cycle(5), grid)
        assert np.allclose(t.values, analytic.undriven_tomogram(grid.x), atol=1e-14)

    def test_numeric_deep_quantum_matches_analytic(self):
        p = SystemParams(2.0, 1.0, 1e3)
        rho, _ = liouvillian.solve(p)
        grid = tm.QuadratureGrid(n_x=121, n_theta=16)
        t = tm.tomogram(rho, grid)
        ref = analytic.analytic_tomogram(p, grid.x[None, :], grid.theta[:, None])
        assert np.max(np.abs(t.values - ref)) < 2e-2

    def test_truncated_grid_raises(self):
        grid = tm.QuadratureGrid(-1.0, 1.0, 41, 4)
        with pytest.raises(NormalizationError) as exc:
            tm.tomogram(fock.vacuum(fock.FockSpace(3)), grid)
        assert exc.value.leakage > 0.1
        assert tm.tomogram(fock.vacuum(fock.FockSpace(3)), grid, check=False).values.shape == (4, 41)

    @staticmethod
    def _theta_amplitude(F):
        grid = tm.QuadratureGrid(n_x=121, n_theta=32)
        rho, _ = liouvillian.solve(SystemParams(2.0, F, 1e3))
        v = tm.tomogram(rho, grid).values
        return np.max(v.max(axis=0) - v.min(axis=0)), abs(rho[0, 1])

    @pytest.mark.xfail(strict=True, reason="amplitude follows |rho01|, which peaks at the critical drive")
    def test_oscillation_monotone_in_drive(self):
        amps = [self._theta_amplitude(F)[0] for F in (0.0, 1.0, 10.0)]
        assert amps[0] < amps[1] < amps[2]

    def test_oscillation_tracks_coherence(self):
        # deep-quantum: the theta-dependent part is 2 sqrt2 X Re(rho01 e^{i theta}) psi_0^2
        x_peak = 1 / math.sqrt(2)
        envelope = 4 * math.sqrt(2) * x_peak * math.exp(-x_peak**2) / math.sqrt(math.pi)
        amp0, _ = self._theta_amplitude(0.0)
        assert amp0 < 1e-12
        for F in (1.0, analytic.critical_drive(2.0), 10.0):
            amp, c = self._theta_amplitude(F)
            assert amp == pytest.approx(envelope * c, rel=2e-2)


class TestNonclassicalArea:
    def test_quadrature_std_examples(self):
        assert tm.quadrature_std(fock.vacuum(fock.FockSpace(3)), 0.4) == pytest.approx(1 / math.sqrt(2))
        assert tm.quadrature_std(analytic.limit_cycle(3), 1.1) == pytest.approx(math.sqrt(5 / 6))
        coh = fock.coherent_state(fock.FockSpace(40), 2.0 * np.exp(0.5j))
        assert np.allclose(tm.quadrature_std(coh, np.linspace(0, 6, 7)), 1 / math.sqrt(2), atol=1e-10)

    def test_vacuum_and_limit_cycle(self):
        assert tm.nonclassical_area(fock.vacuum(fock.FockSpace(3))) == pytest.approx(0, abs=1e-13)
        want = 2 * math.pi * (math.sqrt(5 / 6) - 1 / math.sqrt(2))
        assert tm.nonclassical_area(analytic.limit_cycle(3)) == pytest.approx(want, abs=1e-13)

    def test_rotation_invariant(self):
        rho, _ = liouvillian.solve(SystemParams(1.0, 3.0, 5.0))
        assert tm.nonclassical_area(fock.rotate(rho, 0.9)) == pytest.approx(tm.nonclassical_area(rho), abs=1e-12)

    def test_error_estimate(self):
        rho, _ = liouvillian.solve(SystemParams(1.0, 3.0, 5.0))
        value, err = tm.nonclassical_area_with_error(rho)
        assert err < 1e-12 and value == pytest.approx(tm.nonclassical_area(rho), abs=1e-12)

    def test_too_few_angles(self):
        with pytest.raises(ValueError):
            tm.nonclassical_area(fock.vacuum(fock.FockSpace(3)), n_theta=8)


class TestWigner:
    def test_peaks(self):
        assert tm.wigner_at(fock.vacuum(fock.FockSpace(3)), 0.0, 0.0) == pytest.approx(1 / math.pi)
        assert tm.wigner_at(fock.fock_state(fock.FockSpace(3), 1), 0.0, 0.0) == pytest.approx(-1 / math.pi)

    def test_normalized(self):
        rho, _ = liouvillian.solve(SystemParams(1.0, 2.0, 10.0))
        w = tm.wigner(rho, extent=7.0, n_points=161)
        assert w.integral() == pytest.approx(1, abs=1e-6)

    def test_limit_cycle_rotation_symmetry(self):
        r = np.linspace(0, 4, 17)
        rho = analytic.limit_cycle(3)
        a = tm.wigner_at(rho, r, 0 * r)
        for phi in (0.7, 2.0, 4.4):
            b = tm.wigner_at(rho, r * np.cos(phi), r * np.sin(phi))
            assert np.max(np.abs(a - b)) < 1e-10

    def test_marginal_matches_tomogram(self):
        rho, _ = liouvillian.solve(SystemParams(1.0, 2.0, 10.0))
        x = np.linspace(-7, 7, 141)
        w = tm.wigner(rho, x=x, p=x)
        marginal = np.trapezoid(w.values, x, axis=0)
        grid = tm.QuadratureGrid(-7, 7, 141, 4)
        # theta = 0 row: distribution of x
        assert np.max(np.abs(marginal - tm.tomogram(rho, grid).values[0])) < 1e-3

    def test_extent_guard(self):
        with pytest.raises(NormalizationError):
            tm.wigner(fock.fock_state(fock.FockSpace(10), 9), extent=4.0)
