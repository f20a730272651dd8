"""Lindblad generator of the driven quantum van der Pol oscillator.

In the frame rotating with the drive,

    d rho/dt = -i[D a^dag a + F (a + a^dag), rho] + k1 D[a^dag] rho + k2 D[a^2] rho,

with ``D[O] rho = O rho O^dag - (O^dag O rho + rho O^dag O) / 2``.

Density matrices are vectorized by column stacking, ``vec(rho)[m + n*dim] =
rho[m, n]``, so that ``vec(A rho B) = (B^T kron A) vec(rho)``. Both builders
use this convention.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import fock
from .errors import InvalidDimensionError, ShapeError, SolverError, StepSizeError

#: kappa2/kappa1 below which the truncation must be given explicitly
CUTOFF_KAPPA2 = 0.1
#: residual above which the direct solve falls back to an SVD null vector
FALLBACK_RESIDUAL = 1e-8
#: largest Liouville-space size for the dense SVD fallback
_MAX_DENSE_FALLBACK = 4900


def default_dim(drive: float, kappa2: float, kappa1: float = 1.0) -> int:
    """Truncation used when the caller does not fix ``dim``.

    Only defined for ``kappa2/kappa1 >= 0.1``; without two-photon loss the
    steady state is a truncation artifact and the cutoff must be chosen.
    """
    k2 = kappa2 / kappa1
    if k2 < CUTOFF_KAPPA2:
        raise InvalidDimensionError(
            f"kappa2/kappa1 = {k2:g} < {CUTOFF_KAPPA2}: pass dim explicitly (result is cutoff-dependent)"
        )
    return max(12, math.ceil(6 * (1 + (drive / kappa1) / math.sqrt(k2))))


@dataclass(frozen=True)
class SystemParams:
    """Physical parameters, all rates in the same units (usually kappa1 = 1).

    ``dim=None`` selects :func:`default_dim` when a truncation is needed.
    """

    detuning: float
    drive: float
    kappa2: float
    kappa1: float = 1.0
    dim: int | None = None

    def __post_init__(self):
        if not self.kappa1 > 0:
            raise ValueError(f"kappa1 must be positive, got {self.kappa1}")
        if not self.kappa2 >= 0:
            raise ValueError(f"kappa2 must be non-negative, got {self.kappa2}")
        if not self.drive >= 0:
            raise ValueError(f"drive must be non-negative, got {self.drive}")
        if self.dim is not None and (int(self.dim) != self.dim or self.dim < 3):
            raise InvalidDimensionError(f"dim must be an integer >= 3, got {self.dim}")

    @property
    def fock_dim(self) -> int:
        if self.dim is not None:
            return int(self.dim)
        return default_dim(self.drive, self.kappa2, self.kappa1)

    @property
    def cutoff_dependent(self) -> bool:
        return self.kappa2 / self.kappa1 < CUTOFF_KAPPA2

    def with_(self, **changes) -> "SystemParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class Superoperator:
    """Sparse ``dim**2 x dim**2`` generator acting on column-stacked states."""

    dim: int
    matrix: sp.csr_matrix

    def __matmul__(self, vec):
        return self.matrix @ vec

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """Return ``L(rho)`` as a ``dim x dim`` matrix."""
        _check_state(self.dim, rho)
        return (self.matrix @ vec(rho)).reshape(self.dim, self.dim, order="F")

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()


def vec(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v: np.ndarray, dim: int) -> np.ndarray:
    return np.asarray(v).reshape(dim, dim, order="F")


def _check_state(dim, rho):
    if np.shape(rho) != (dim, dim):
        raise ShapeError(f"state of shape {np.shape(rho)} does not match generator dimension {dim}")


def _left(op):
    return sp.kron(sp.identity(op.shape[0], format="csr"), sp.csr_matrix(op))


def _right(op):
    return sp.kron(sp.csr_matrix(op).T, sp.identity(op.shape[0], format="csr"))


def _dissipator(op):
    op = sp.csr_matrix(op)
    op_dag_op = (op.conj().T @ op).tocsr()
    return sp.kron(op.conj(), op) - 0.5 * _left(op_dag_op) - 0.5 * _right(op_dag_op)


def build_operator_form(params: SystemParams) -> Superoperator:
    """Assemble the generator from Kronecker products of truncated operators."""
    dim = params.fock_dim
    space = fock.FockSpace(dim)
    a = fock.annihilation(space)
    adag = fock.creation(space)
    hamiltonian = params.detuning * fock.number(space) + params.drive * (a + adag)
    gen = -1j * (_left(hamiltonian) - _right(hamiltonian))
    gen = gen + params.kappa1 * _dissipator(adag)
    if params.kappa2:
        gen = gen + params.kappa2 * _dissipator(fock.squared_annihilation(space))
    gen = sp.csr_matrix(gen)
    gen.eliminate_zeros()
    return Superoperator(dim, gen)


def build_element_form(params: SystemParams) -> Superoperator:
    """Assemble the generator entry by entry from the Fock-basis equations of motion.

    Terms coupling to a matrix element outside the truncation are dropped. The
    gain outflow of the top level, ``(m + 1)`` in ``-(k1/2)(m + n + 2) rho_mn``,
    is the rate into level ``dim``, so it is dropped there as well.
    """
    dim = params.fock_dim
    delta, drive = params.detuning, params.drive
    k1, k2 = params.kappa1, params.kappa2
    rows, cols, vals = [], [], []

    def add(m, n, i, j, value):
        if 0 <= i < dim and 0 <= j < dim and value != 0:
            rows.append(m + n * dim)
            cols.append(i + j * dim)
            vals.append(value)

    def outflow(k):
        return k + 1 if k + 1 < dim else 0

    for n in range(dim):
        for m in range(dim):
            diag = -1j * delta * (m - n)
            diag -= 0.5 * k1 * (outflow(m) + outflow(n))
            diag -= 0.5 * k2 * (m * m + n * n - m - n)
            add(m, n, m, n, diag)

            add(m, n, m - 1, n, -1j * drive * math.sqrt(m))
            add(m, n, m + 1, n, -1j * drive * math.sqrt(m + 1))
            add(m, n, m, n - 1, 1j * drive * math.sqrt(n))
            add(m, n, m, n + 1, 1j * drive * math.sqrt(n + 1))

            add(m, n, m - 1, n - 1, k1 * math.sqrt(m * n))
            add(m, n, m + 2, n + 2, k2 * math.sqrt((m + 1) * (m + 2) * (n + 1) * (n + 2)))

    size = dim * dim
    gen = sp.csr_matrix((np.array(vals, dtype=complex), (rows, cols)), shape=(size, size))
    gen.sum_duplicates()
    return Superoperator(dim, gen)


def residual(L: Superoperator, rho: np.ndarray) -> float:
    """Infinity norm of ``L vec(rho)``."""
    _check_state(L.dim, rho)
    return float(np.max(np.abs(L.matrix @ vec(rho))))


def _trace_row(dim):
    idx = np.arange(dim) * (dim + 1)
    return sp.csr_matrix((np.ones(dim, dtype=complex), (np.zeros(dim, dtype=int), idx)), shape=(1, dim * dim))


def _svd_null_vector(matrix):
    _, _, vh = scipy.linalg.svd(matrix.toarray())
    return vh[-1].conj()


def steady_state(L: Superoperator) -> np.ndarray:
    """Unit-trace null vector of ``L`` as a Hermitian density matrix.

    One row of ``L`` is replaced by the trace functional and the system is
    solved by sparse LU. If the residual of that solution exceeds
    ``FALLBACK_RESIDUAL``, the right singular vector of the smallest singular
    value is used instead.

    Raises
    ------
    SolverError
        If neither route reaches ``FALLBACK_RESIDUAL``.
    """
    dim = L.dim
    size = dim * dim
    system = sp.vstack([_trace_row(dim), L.matrix[1:]], format="csc")
    rhs = np.zeros(size, dtype=complex)
    rhs[0] = 1.0

    x = None
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("error", spla.MatrixRankWarning)
            x = spla.splu(system).solve(rhs)
    except (RuntimeError, spla.MatrixRankWarning):
        x = None

    def finish(v):
        trace = v[_trace_row(dim).indices].sum()
        if not np.isfinite(trace) or abs(trace) == 0:
            return None, np.inf
        rho = unvec(v / trace, dim)
        rho = 0.5 * (rho + rho.conj().T)
        rho /= np.trace(rho).real
        return rho, residual(L, rho)

    rho, res = (None, np.inf) if x is None or not np.all(np.isfinite(x)) else finish(x)
    if res > FALLBACK_RESIDUAL:
        if size > _MAX_DENSE_FALLBACK:
            raise SolverError(f"direct steady-state solve failed (residual {res:.3g}) and dim={dim} "
                              "is too large for the dense fallback", res)
        rho_fb, res_fb = finish(_svd_null_vector(L.matrix))
        if res_fb < res:
            rho, res = rho_fb, res_fb
    if rho is None or res > FALLBACK_RESIDUAL:
        raise SolverError(f"steady-state residual {res:.3g} exceeds {FALLBACK_RESIDUAL:g}", res)

    min_eig = np.linalg.eigvalsh(rho)[0]
    if min_eig < -fock.PSD_TOL:
        warnings.warn(f"steady state has eigenvalue {min_eig:.3g} below -{fock.PSD_TOL:g}", RuntimeWarning)
    return rho


def solve(params: SystemParams) -> tuple[np.ndarray, float]:
    """Build the operator-form generator and return ``(rho_ss, residual)``."""
    L = build_operator_form(params)
    rho = steady_state(L)
    return rho, residual(L, rho)


def spectral_scale(params: SystemParams) -> float:
    """Rough bound on the generator's spectral radius used by the step-size guard."""
    dim = params.fock_dim
    return (params.kappa2 * dim**2 + params.kappa1 * dim
            + abs(params.detuning) * dim + 2 * params.drive * math.sqrt(dim))


def evolve(rho0: np.ndarray, params: SystemParams, t_final: float, dt: float) -> np.ndarray:
    """Integrate the master equation with fixed-step classical Runge-Kutta.

    The last step is shortened so the run ends exactly at ``t_final``.
    """
    if t_final <= 0 or dt <= 0:
        raise StepSizeError("t_final and dt must be positive")
    scale = spectral_scale(params)
    if dt * scale > 0.1 * (1 + 1e-9):
        raise StepSizeError(f"dt={dt:g} too large for spectral scale {scale:.4g}; use dt <= {0.1 / scale:.3g}")
    L = build_operator_form(params)
    _check_state(L.dim, rho0)
    gen = L.matrix
    y = vec(np.asarray(rho0, dtype=complex)).copy()
    n_steps = math.ceil(t_final / dt - 1e-12)
    h = dt
    for step in range(n_steps):
        if step == n_steps - 1:
            h = t_final - dt * (n_steps - 1)
        k1 = gen @ y
        k2 = gen @ (y + 0.5 * h * k1)
        k3 = gen @ (y + 0.5 * h * k2)
        k4 = gen @ (y + h * k3)
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return unvec(y, L.dim)
