"""Homodyne tomograms, quadrature fluctuations and Wigner functions.

Quadratures are ``X_theta = (a e^{-i theta} + a^dag e^{i theta}) / sqrt 2`` and
the overlap of a Fock state with a quadrature eigenstate is fixed as
``<n|X, theta> = psi_n(X) e^{i n theta}``, with ``psi_n`` the normalized
Hermite functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import eval_genlaguerre, gammaln

from . import fock
from .errors import InvalidDimensionError, NormalizationError

#: quadrature values beyond which exp(-X^2/2) underflows in the recurrence
MAX_ABS_X = 30.0
#: allowed missing probability per tomogram row
LEAKAGE_TOL = 1e-6
#: allowed imaginary residue of tomogram values
IMAG_TOL = 1e-12
DEFAULT_N_THETA = 360
VACUUM_AREA = math.sqrt(2) * math.pi


def quadrature_wavefunctions(n_max: int, X) -> np.ndarray:
    """Hermite functions ``psi_0 .. psi_{n_max}`` at ``X``; shape ``(n_max + 1,) + X.shape``.

    Uses the three-term recurrence on the normalized functions, which stays
    finite for large ``n`` where raw Hermite polynomials overflow.
    """
    X = np.asarray(X, dtype=float)
    if n_max < 0:
        raise InvalidDimensionError("n_max must be non-negative")
    if np.any(np.abs(X) > MAX_ABS_X):
        raise ValueError(f"|X| must not exceed {MAX_ABS_X}")
    psi = np.empty((n_max + 1,) + X.shape)
    psi[0] = math.pi ** -0.25 * np.exp(-0.5 * X**2)
    if n_max >= 1:
        psi[1] = math.sqrt(2.0) * X * psi[0]
    for n in range(1, n_max):
        psi[n + 1] = math.sqrt(2.0 / (n + 1)) * X * psi[n] - math.sqrt(n / (n + 1)) * psi[n - 1]
    return psi


def quadrature_wavefunction(n: int, X, dim: int | None = None):
    if n < 0 or (dim is not None and n >= dim):
        raise InvalidDimensionError(f"level {n} outside truncation {dim}")
    return quadrature_wavefunctions(n, X)[n]


def quadrature_overlap_series(N: int, X: float, theta: float) -> complex:
    """``<N|X, theta>`` from the double-sum expansion of the quadrature eigenstate.

    Independent of :func:`quadrature_wavefunctions`; used as a cross-check for
    small ``N``.
    """
    total = 0j
    for m in range(N // 2 + 1):
        n = N - 2 * m
        coeff = (2 ** (n / 2 - m) * math.sqrt(math.factorial(N))
                 / (math.pi**0.25 * math.factorial(n) * math.factorial(m)))
        total += coeff * X**n * np.exp(1j * (N * theta + m * math.pi) - X**2 / 2)
    return total


@dataclass(frozen=True)
class QuadratureGrid:
    x_min: float = -6.0
    x_max: float = 6.0
    n_x: int = 241
    n_theta: int = 64

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise ValueError("x_min must be below x_max")
        if self.n_x < 2 or self.n_theta < 4:
            raise ValueError("need n_x >= 2 and n_theta >= 4")

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_x)

    @property
    def theta(self) -> np.ndarray:
        return np.linspace(0.0, 2 * np.pi, self.n_theta, endpoint=False)


@dataclass(frozen=True)
class Tomogram:
    grid: QuadratureGrid
    values: np.ndarray  # (n_theta, n_x)

    def row_norms(self) -> np.ndarray:
        return np.trapezoid(self.values, self.grid.x, axis=1)


def tomogram(rho, grid: QuadratureGrid, check: bool = True) -> Tomogram:
    """Evaluate ``<X, theta| rho |X, theta>`` on ``grid``.

    With ``check`` set, every row must integrate to one within ``LEAKAGE_TOL``,
    otherwise :class:`NormalizationError` reports the largest leakage.
    """
    rho = np.asarray(rho, dtype=complex)
    dim = rho.shape[0]
    psi = quadrature_wavefunctions(dim - 1, grid.x)  # (dim, n_x)
    phases = np.exp(1j * np.outer(grid.theta, np.arange(dim)))  # (n_theta, dim)
    amps = phases[:, :, None] * psi[None, :, :]  # c_n(theta, X)
    vals = np.einsum("tmx,mn,tnx->tx", amps.conj(), rho, amps)
    imag = np.max(np.abs(vals.imag))
    if imag > IMAG_TOL * max(1.0, np.max(np.abs(vals.real))):
        raise ValueError(f"tomogram has imaginary residue {imag:.3g}; is rho Hermitian?")
    tomo = Tomogram(grid, vals.real)
    if check:
        leakage = float(np.max(np.abs(1.0 - tomo.row_norms())))
        if leakage > LEAKAGE_TOL:
            raise NormalizationError(
                f"tomogram rows miss up to {leakage:.3g} of probability on [{grid.x_min}, {grid.x_max}]", leakage)
    return tomo


def tomogram_std(tomo: Tomogram) -> np.ndarray:
    """Standard deviation of each tomogram row, by quadrature over the grid."""
    x = tomo.grid.x
    norm = tomo.row_norms()
    mean = np.trapezoid(tomo.values * x, x, axis=1) / norm
    second = np.trapezoid(tomo.values * x**2, x, axis=1) / norm
    return np.sqrt(second - mean**2)


def quadrature_std(rho, theta):
    """Standard deviation of ``X_theta`` from the moments ``<a>``, ``<a^2>``, ``<n>``."""
    rho = np.asarray(rho, dtype=complex)
    space = fock.FockSpace(rho.shape[0])
    a_mean = fock.expectation(rho, fock.annihilation(space))
    a2_mean = fock.expectation(rho, fock.squared_annihilation(space))
    n_mean = fock.expectation(rho, fock.number(space)).real
    theta = np.asarray(theta, dtype=float)
    first = np.sqrt(2) * np.real(a_mean * np.exp(-1j * theta))
    second = np.real(a2_mean * np.exp(-2j * theta)) + n_mean + 0.5
    var = second - first**2
    if np.any(var < -1e-10):
        raise ValueError(f"negative quadrature variance {np.min(var):.3g}")
    return np.sqrt(np.clip(var, 0.0, None))


def _periodic_trapezoid(rho, n_theta):
    theta = np.linspace(0.0, 2 * np.pi, n_theta, endpoint=False)
    return np.sum(quadrature_std(rho, theta)) * (2 * np.pi / n_theta)


def nonclassical_area_with_error(rho, n_theta: int = DEFAULT_N_THETA) -> tuple[float, float]:
    """Nonclassical area and the change observed when ``n_theta`` is doubled."""
    if n_theta < 16:
        raise ValueError("n_theta must be at least 16")
    coarse = _periodic_trapezoid(rho, n_theta)
    fine = _periodic_trapezoid(rho, 2 * n_theta)
    return fine - VACUUM_AREA, abs(fine - coarse)


def nonclassical_area(rho, n_theta: int = DEFAULT_N_THETA) -> float:
    """Integral of ``Delta X_theta`` over a full turn minus the vacuum value ``sqrt(2) pi``.

    The integrand is smooth and periodic, so the uniform trapezoid rule
    converges spectrally.
    """
    if n_theta < 16:
        raise ValueError("n_theta must be at least 16")
    return float(_periodic_trapezoid(rho, n_theta) - VACUUM_AREA)


@dataclass(frozen=True)
class WignerMap:
    x: np.ndarray
    p: np.ndarray
    values: np.ndarray  # (len(p), len(x))

    def integral(self) -> float:
        return float(np.trapezoid(np.trapezoid(self.values, self.x, axis=1), self.p))


def _laguerre_terms(dim, r2):
    """Map ``(m, n) -> W_{|m><n|} / (x - i p)^{m-n}`` for ``m >= n`` at radius squared ``r2``."""
    terms = {}
    gauss = np.exp(-r2) / np.pi
    for k in range(dim):
        for n in range(dim - k):
            m = n + k
            coeff = (-1) ** n * np.exp(0.5 * (k * math.log(2.0) + gammaln(n + 1) - gammaln(m + 1)))
            terms[m, n] = coeff * gauss * eval_genlaguerre(n, k, 2 * r2)
    return terms


def wigner_at(rho, x, p):
    """Wigner function of ``rho`` at broadcast points ``(x, p)``.

    Normalized so that ``int W dx dp = 1``; the vacuum peak is ``1/pi``.
    """
    rho = np.asarray(rho, dtype=complex)
    x, p = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(p, dtype=float))
    dim = rho.shape[0]
    z = x - 1j * p
    terms = _laguerre_terms(dim, x**2 + p**2)
    w = np.zeros(x.shape)
    zk = np.ones(x.shape, dtype=complex)
    for k in range(dim):
        acc = np.zeros(x.shape, dtype=complex)
        for n in range(dim - k):
            acc += rho[n + k, n] * terms[n + k, n]
        # W_{|n><m|} is the conjugate of W_{|m><n|}; rho is Hermitian
        w += np.real(acc * zk) * (1 if k == 0 else 2)
        zk = zk * z
    return w


def effective_dim(rho, threshold: float = 1e-8) -> int:
    """One plus the highest Fock level with population above ``threshold``."""
    pops = np.real(np.diag(rho))
    occupied = np.nonzero(pops > threshold)[0]
    return int(occupied[-1]) + 1 if occupied.size else 1


def wigner(rho, extent: float = 5.0, n_points: int = 201, x=None, p=None) -> WignerMap:
    """Wigner function on a square grid ``[-extent, extent]^2`` (or explicit axes).

    The grid half-width must be at least ``3 + sqrt(n_eff)``, with ``n_eff``
    from :func:`effective_dim`, so that the distribution is not clipped.
    """
    x = np.linspace(-extent, extent, n_points) if x is None else np.asarray(x, dtype=float)
    p = np.linspace(-extent, extent, n_points) if p is None else np.asarray(p, dtype=float)
    need = 3 + math.sqrt(effective_dim(rho))
    have = min(abs(x[0]), abs(x[-1]), abs(p[0]), abs(p[-1]))
    if have < need:
        raise NormalizationError(f"Wigner grid half-width {have:g} below required {need:.3g}", need - have)
    X, P = np.meshgrid(x, p)
    return WignerMap(x, p, wigner_at(rho, X, P))
