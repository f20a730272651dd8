"""Closed-form steady state of the deep-quantum (large kappa2) oscillator.

The steady state is restricted to the levels |0>, |1>, |2> with coherence only
between |0> and |1>. With ``P = 12F^2 + 4D^2 + 9k1^2`` and the denominator
``R = P (3 + k1/k2) - 12F^2``::

    rho00 = 2 (6F^2 + 4D^2 + 9k1^2) / R
    rho01 = 2F (3i k1 - 2D) / R
    rho11 = P / R
    rho22 = 1 - 3 (8F^2 + 4D^2 + 9k1^2) / R

Every function accepts ``deep_limit=True`` to evaluate ``R`` with
``k1/k2 = 0`` exactly instead of passing a huge ``kappa2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .liouvillian import SystemParams

#: drive strength beyond which the three-level ansatz is not claimed to hold
ANSATZ_MAX_DRIVE = 10.0

_SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class AnalyticSteadyState:
    rho00: float
    rho11: float
    rho22: float
    rho01: complex
    R: float
    valid: bool = True

    def density_matrix(self, dim: int = 3) -> np.ndarray:
        """Embed the three-level state in a ``dim``-level Fock space."""
        if dim < 3:
            raise ValueError("the analytic state needs at least three levels")
        rho = np.zeros((dim, dim), dtype=complex)
        rho[0, 0] = self.rho00
        rho[1, 1] = self.rho11
        rho[2, 2] = self.rho22
        rho[0, 1] = self.rho01
        rho[1, 0] = np.conj(self.rho01)
        return rho


def _ratio(params: SystemParams, deep_limit: bool) -> float:
    if deep_limit:
        return 0.0
    if params.kappa2 == 0:
        raise DomainError("closed-form steady state needs kappa2 > 0 (R contains kappa1/kappa2)")
    return params.kappa1 / params.kappa2


def denominator(params: SystemParams, deep_limit: bool = False) -> float:
    F, D, k1 = params.drive, params.detuning, params.kappa1
    return (12 * F**2 + 4 * D**2 + 9 * k1**2) * (3 + _ratio(params, deep_limit)) - 12 * F**2


def analytic_steady_state(params: SystemParams, deep_limit: bool = False) -> AnalyticSteadyState:
    F, D, k1 = params.drive, params.detuning, params.kappa1
    R = denominator(params, deep_limit)
    return AnalyticSteadyState(
        rho00=2 * (6 * F**2 + 4 * D**2 + 9 * k1**2) / R,
        rho11=(12 * F**2 + 4 * D**2 + 9 * k1**2) / R,
        rho22=1 - 3 * (8 * F**2 + 4 * D**2 + 9 * k1**2) / R,
        rho01=2 * F * complex(-2 * D, 3 * k1) / R,
        R=R,
        valid=F <= ANSATZ_MAX_DRIVE * k1,
    )


def stationarity_residuals(state: AnalyticSteadyState, params: SystemParams) -> np.ndarray:
    """Right-hand sides of the three-level equations of motion at ``state``.

    Order: d rho00/dt, d rho11/dt, d rho22/dt, d rho01/dt. Only the first,
    second and fourth vanish identically; the third carries the leakage of
    the truncated |2> level and equals ``-3 k1^2 P / (k2 R)``.
    """
    F, D, k1, k2 = params.drive, params.detuning, params.kappa1, params.kappa2
    r00, r11, r22, r01 = state.rho00, state.rho11, state.rho22, state.rho01
    r10 = np.conj(r01)
    return np.array([
        -1j * F * (r10 - r01) - k1 * r00 + 2 * k2 * r22,
        1j * F * (r10 - r01) + k1 * (r00 - 2 * r11),
        2 * k1 * r11 - (3 * k1 + 2 * k2) * r22,
        (1j * D - 1.5 * k1) * r01 - 1j * F * (r11 - r00),
    ])


def limit_cycle(space=3) -> np.ndarray:
    """Undriven deep-quantum steady state ``(2/3)|0><0| + (1/3)|1><1|``."""
    dim = space if isinstance(space, int) else space.dim
    if dim < 2:
        raise ValueError("limit cycle needs at least two levels")
    rho = np.zeros((dim, dim), dtype=complex)
    rho[0, 0] = 2.0 / 3.0
    rho[1, 1] = 1.0 / 3.0
    return rho


def analytic_tomogram(params: SystemParams, X, theta, deep_limit: bool = False):
    """Quadrature distribution of the analytic state, summed in the Fock basis.

    ``X`` and ``theta`` broadcast against each other.
    """
    s = analytic_steady_state(params, deep_limit)
    X, theta = np.broadcast_arrays(np.asarray(X, dtype=float), np.asarray(theta, dtype=float))
    gauss = np.exp(-X**2) / _SQRT_PI
    # psi_n(X)^2 / gauss for n = 0, 1, 2 and psi_0 psi_1 / gauss
    cross = np.sqrt(2) * X * 2 * np.real(s.rho01 * np.exp(1j * theta))
    poly = s.rho00 + s.rho11 * 2 * X**2 + s.rho22 * (2 * X**2 - 1) ** 2 / 2 + cross
    return gauss * poly


def closed_form_tomogram(params: SystemParams, X, theta, deep_limit: bool = True):
    """Quartic-times-Gaussian expression for the tomogram.

    Agrees with :func:`analytic_tomogram` only when ``deep_limit`` is set
    (``rho22 = 0``); at finite ``kappa2`` its ``X^2`` and ``X^4`` coefficients
    differ from the Fock-basis sum.
    """
    F, D, k1 = params.drive, params.detuning, params.kappa1
    R = denominator(params, deep_limit)
    X, theta = np.broadcast_arrays(np.asarray(X, dtype=float), np.asarray(theta, dtype=float))
    poly = (X**4 * (R - 24 * F**2 - 12 * D**2 - 27 * k1**2)
            - 2 * X**2 * (R - 48 * F**2 - 20 * D**2 - 45 * k1**2)
            - 8 * np.sqrt(2) * F * X * (3 * k1 * np.sin(theta) + 2 * D * np.cos(theta))
            + (4 * D**2 + 9 * k1**2 + R))
    return np.exp(-X**2) / (2 * _SQRT_PI * R) * poly


def undriven_tomogram(X):
    """Rotation-invariant tomogram of the limit cycle."""
    X = np.asarray(X, dtype=float)
    return 2 / (3 * _SQRT_PI) * (1 + X**2) * np.exp(-X**2)


def _b(params):
    F, D, k1 = params.drive, params.detuning, params.kappa1
    return 24 * F**2 + 12 * D**2 + 27 * k1**2


def mean_excitation(params: SystemParams) -> float:
    """Mean excitation ``rho11 + 2 rho22`` as ``kappa2 -> infinity``."""
    return 1 / 3 + 4 * params.drive**2 / _b(params)


def coherence(params: SystemParams) -> float:
    """``|rho01|`` as ``kappa2 -> infinity``."""
    D, k1 = params.detuning, params.kappa1
    return 2 * params.drive * math.sqrt(4 * D**2 + 9 * k1**2) / _b(params)


def critical_drive(detuning: float, kappa1: float = 1.0) -> float:
    """Drive strength maximizing :func:`coherence`; the peak value is ``1/(6 sqrt 2)``."""
    if not kappa1 > 0:
        raise ValueError("kappa1 must be positive")
    return math.sqrt((9 * kappa1**2 + 4 * detuning**2) / 8)


def coherence_gradient(params: SystemParams) -> float:
    """Partial derivative of :func:`coherence` with respect to the drive."""
    F, D, k1 = params.drive, params.detuning, params.kappa1
    return (2 * math.sqrt(4 * D**2 + 9 * k1**2) * (12 * D**2 + 27 * k1**2 - 24 * F**2)
            / _b(params) ** 2)
