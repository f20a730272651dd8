"""Scalar synchronization diagnostics of a steady state."""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass

import numpy as np

from .tomography import DEFAULT_N_THETA, nonclassical_area

#: mean occupation below which g2(0) is reported as undefined
G2_MIN_OCCUPATION = 1e-9
DEFAULT_REGIME_TOL = 0.1


class RegimeLabel(str, enum.Enum):
    ANTIBUNCHED = "Antibunched"
    SINGLE_QUANTUM = "SingleQuantum"
    COLLECTIVE_BURSTS = "CollectiveBursts"
    UNDEFINED = "Undefined"


def mean_occupation(rho) -> float:
    return float(np.dot(np.arange(rho.shape[0]), np.real(np.diag(rho))))


def g2_zero(rho) -> float:
    """Equal-time second-order correlation ``<a^dag a^dag a a> / <a^dag a>^2``.

    Returns ``nan`` when ``<a^dag a>`` is below ``G2_MIN_OCCUPATION``.
    """
    rho = np.asarray(rho)
    n = np.arange(rho.shape[0])
    pops = np.real(np.diag(rho))
    mean_n = float(np.dot(n, pops))
    if mean_n < G2_MIN_OCCUPATION:
        return math.nan
    # a^dag^2 a^2 is diagonal with entries n(n-1)
    return float(np.dot(n * (n - 1), pops)) / mean_n**2


def numeric_coherence(rho) -> float:
    """Magnitude of the vacuum/one-quantum coherence ``|rho_01|``."""
    return float(abs(rho[0, 1]))


def purity(rho) -> float:
    return float(np.real(np.sum(rho * rho.T)))


def classify_regime(g2: float, tol: float = DEFAULT_REGIME_TOL) -> RegimeLabel:
    """Bin ``g2`` into antibunched (< 1), single-quantum (~ 1) or bunched (> 1)."""
    if not 0 < tol < 0.5:
        raise ValueError("tol must lie in (0, 0.5)")
    if g2 is None or math.isnan(g2):
        return RegimeLabel.UNDEFINED
    if g2 < 1 - tol:
        return RegimeLabel.ANTIBUNCHED
    if g2 > 1 + tol:
        return RegimeLabel.COLLECTIVE_BURSTS
    return RegimeLabel.SINGLE_QUANTUM


@dataclass(frozen=True)
class MetricsRecord:
    g2: float
    mean_n: float
    coherence_01: float
    delta: float
    purity: float
    regime: RegimeLabel
    regime_tol: float = DEFAULT_REGIME_TOL

    def as_dict(self) -> dict:
        d = asdict(self)
        d["regime"] = self.regime.value
        return d


def all_metrics(rho, params=None, n_theta: int = DEFAULT_N_THETA,
                regime_tol: float = DEFAULT_REGIME_TOL) -> MetricsRecord:
    """Every diagnostic of one density matrix.

    ``params`` is accepted for call-site symmetry with the sweep engine; the
    metrics depend on ``rho`` only.
    """
    rho = np.asarray(rho, dtype=complex)
    g2 = g2_zero(rho)
    return MetricsRecord(
        g2=g2,
        mean_n=mean_occupation(rho),
        coherence_01=numeric_coherence(rho),
        delta=nonclassical_area(rho, n_theta),
        purity=purity(rho),
        regime=classify_regime(g2, regime_tol),
        regime_tol=regime_tol,
    )

