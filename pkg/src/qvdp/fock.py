"""Truncated Fock-space operators for a single bosonic mode.

Basis ordering is Fock-number ascending (|0>, |1>, ..., |dim-1>) everywhere in
the package. Operators and density matrices are plain dense ``numpy`` arrays;
:class:`FockSpace` only carries the truncation.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from .errors import InvalidDimensionError, ShapeError

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-10
PSD_TOL = 1e-8


@dataclass(frozen=True)
class FockSpace:
    dim: int

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 2:
            raise InvalidDimensionError(f"Fock dimension must be an integer >= 2, got {self.dim}")


def make_space(dim: int) -> FockSpace:
    return FockSpace(dim)


def _dim(space) -> int:
    if isinstance(space, FockSpace):
        return space.dim
    return FockSpace(space).dim


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@lru_cache(maxsize=64)
def _annihilation(dim: int) -> np.ndarray:
    return _frozen(np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(complex))


def annihilation(space) -> np.ndarray:
    """Lowering operator ``a`` with ``a[n-1, n] = sqrt(n)``."""
    return _annihilation(_dim(space))


def creation(space) -> np.ndarray:
    return _frozen(annihilation(space).conj().T.copy())


def number(space) -> np.ndarray:
    return _frozen(creation(space) @ annihilation(space))


def squared_annihilation(space) -> np.ndarray:
    a = annihilation(space)
    return _frozen(a @ a)


def identity(space) -> np.ndarray:
    return _frozen(np.eye(_dim(space), dtype=complex))


def adjoint(op: np.ndarray) -> np.ndarray:
    return np.conj(op).T


def commutator(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return x @ y - y @ x


def fock_state(space, n: int) -> np.ndarray:
    """Projector |n><n|."""
    dim = _dim(space)
    if not 0 <= n < dim:
        raise InvalidDimensionError(f"level {n} outside truncation of dimension {dim}")
    rho = np.zeros((dim, dim), dtype=complex)
    rho[n, n] = 1.0
    return rho


def vacuum(space) -> np.ndarray:
    return fock_state(space, 0)


def coherent_state(space, alpha: complex) -> np.ndarray:
    """Projector onto the truncated, renormalized coherent state |alpha>."""
    dim = _dim(space)
    n = np.arange(dim)
    mag = np.abs(alpha)
    if mag == 0:
        return vacuum(space)
    # log-amplitudes avoid overflow of alpha**n / sqrt(n!) at large dim
    log_amp = n * np.log(mag) - 0.5 * gammaln(n + 1)
    psi = np.exp(log_amp - log_amp.max()) * np.exp(1j * n * np.angle(alpha))
    psi /= np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def rotate(rho: np.ndarray, phi: float) -> np.ndarray:
    """Phase-space rotation ``exp(-i phi n) rho exp(i phi n)``."""
    phase = np.exp(-1j * phi * np.arange(rho.shape[0]))
    return phase[:, None] * rho * phase.conj()[None, :]


def expectation(rho: np.ndarray, op: np.ndarray) -> complex:
    """Return ``trace(rho @ op)``."""
    rho = np.asarray(rho)
    op = np.asarray(op)
    if rho.shape != op.shape or rho.ndim != 2:
        raise ShapeError(f"shape mismatch: state {rho.shape} vs operator {op.shape}")
    # trace(rho @ op) without forming the product
    return complex(np.sum(rho * op.T))


@dataclass(frozen=True)
class DiagnosticsReport:
    trace_error: float
    hermiticity_error: float
    min_eigenvalue: float
    passed: bool


def validate_density(rho) -> DiagnosticsReport:
    """Check trace, Hermiticity and positivity of ``rho``. Never raises."""
    try:
        rho = np.asarray(rho, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            return DiagnosticsReport(np.inf, np.inf, -np.inf, False)
        trace_error = float(abs(np.trace(rho) - 1.0))
        hermiticity_error = float(np.max(np.abs(rho - rho.conj().T)))
        min_eig = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0])
    except (ValueError, np.linalg.LinAlgError):
        return DiagnosticsReport(np.inf, np.inf, -np.inf, False)
    passed = trace_error <= TRACE_TOL and hermiticity_error <= HERMITICITY_TOL and min_eig >= -PSD_TOL
    return DiagnosticsReport(trace_error, hermiticity_error, min_eig, passed)
