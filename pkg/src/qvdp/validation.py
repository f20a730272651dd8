"""End-to-end validation: numerics against closed forms and internal cross-checks.

Each ``check_*`` function returns a :class:`CheckResult`. :func:`run_all`
runs every check and is what ``qvdp validate`` prints.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import analytic, fock, liouvillian, sweep, tomography
from .liouvillian import SystemParams
from .metrics import mean_occupation, numeric_coherence


@dataclass
class CheckResult:
    number: int
    name: str
    measured: str
    tolerance: str
    passed: bool
    seconds: float = 0.0
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"[{status}] {self.number:2d} {self.name:<28s} measured {self.measured:<40s} "
                f"tolerance {self.tolerance:<28s} ({self.seconds:.2f} s)")


def _timed(fn):
    def wrapper(*args, **kwargs):
        start = time.perf_counter()
        result = fn(*args, **kwargs)
        result.seconds = time.perf_counter() - start
        return result
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def _solve(detuning, drive, kappa2, dim=None):
    rho, _ = liouvillian.solve(SystemParams(detuning, drive, kappa2, dim=dim))
    return rho


@_timed
def check_limit_cycle() -> CheckResult:
    start = time.perf_counter()
    rho = _solve(0.0, 0.0, 1e3, dim=8)
    elapsed = time.perf_counter() - start
    pops = np.real(np.diag(rho))
    err = max(abs(pops[0] - 2 / 3), abs(pops[1] - 1 / 3))
    return CheckResult(1, "limit cycle populations", f"max|p-(2/3,1/3)|={err:.2e}, {elapsed:.3f} s",
                       "1e-3, < 1 s", err <= 1e-3 and elapsed < 1.0)


ORACLE_GRID_F = (0.0, 1.0, 5.0, 10.0)
ORACLE_GRID_D = (0.0, 2.0, -2.0, 5.0, -5.0)


def max_analytic_deviation(kappa2: float) -> tuple[float, tuple]:
    """Largest entrywise deviation between numeric and closed-form steady states over the check grid."""
    worst, where = 0.0, None
    for F in ORACLE_GRID_F:
        for D in ORACLE_GRID_D:
            params = SystemParams(D, F, kappa2)
            rho, _ = liouvillian.solve(params)
            ref = analytic.analytic_steady_state(params).density_matrix(rho.shape[0])
            dev = float(np.max(np.abs(rho - ref)))
            if dev > worst:
                worst, where = dev, (F, D)
    return worst, where


@_timed
def check_analytic_oracle() -> CheckResult:
    start = time.perf_counter()
    dev3, at3 = max_analytic_deviation(1e3)
    dev4, at4 = max_analytic_deviation(1e4)
    elapsed = time.perf_counter() - start
    ok = dev3 <= 2e-2 and dev4 <= 2e-3 and elapsed < 30
    return CheckResult(2, "closed-form state oracle",
                       f"k2=1e3: {dev3:.3e} at {at3}; k2=1e4: {dev4:.3e} at {at4}",
                       "2e-2 / 2e-3, < 30 s", ok,
                       detail=f"ratio {dev3 / dev4:.2f}")


@_timed
def check_coherence_peak() -> CheckResult:
    fc = analytic.critical_drive(0.0, 1.0)
    value = numeric_coherence(_solve(0.0, fc, 1e4))
    target = 1 / (6 * math.sqrt(2))
    err = abs(value - target)
    return CheckResult(3, "coherence peak at F_c", f"|rho01|={value:.5f} (err {err:.2e})", "5e-3", err <= 5e-3)


@_timed
def check_mean_excitation() -> CheckResult:
    worst = 0.0
    for F in np.linspace(0, 10, 11):
        for D in np.linspace(-5, 5, 11):
            params = SystemParams(D, F, 1e4)
            rho, _ = liouvillian.solve(params)
            worst = max(worst, abs(mean_occupation(rho) - analytic.mean_excitation(params)))
    at_zero = mean_occupation(_solve(0.0, 0.0, 1e4))
    ok = worst <= 1e-3 and abs(at_zero - 1 / 3) <= 1e-3
    return CheckResult(4, "mean excitation", f"max dev {worst:.2e}; N(F=0)={at_zero:.5f}", "1e-3", ok)


@_timed
def check_delta_saturation() -> CheckResult:
    delta = tomography.nonclassical_area(_solve(0.0, 10.0, 1e3))
    return CheckResult(5, "deep-quantum delta", f"delta={delta:.4f}", "[1.5, 2.1]", 1.5 <= delta <= 2.1)


def deep_quantum_grid(cache: dict | None = None, parallelism: int = 1) -> list:
    """Records of the 51 x 51 grid at kappa2 = 1e3, dim 12 (cached in ``cache``)."""
    if cache is not None and "fig1b" in cache:
        return cache["fig1b"]
    config = sweep.preset("fig1b", metrics=sweep.METRIC_NAMES)
    records = sweep.run(sweep.plan(config), config, parallelism)
    if cache is not None:
        cache["fig1b"] = records
    return records


@_timed
def check_g2_deep(cache=None) -> CheckResult:
    records = deep_quantum_grid(cache)
    g2 = np.array([r.value("g2") for r in records])
    worst = float(np.nanmax(g2))
    ok = all(r.converged for r in records) and worst <= 0.05
    return CheckResult(6, "deep-quantum g2", f"max g2={worst:.4f} over {len(records)} points", "<= 0.05", ok)


CLASSICAL_DIM = 60


@_timed
def check_classical_regime() -> CheckResult:
    dim = CLASSICAL_DIM
    asym = 0.0
    for F in (1.0, 5.0, 10.0):
        for D in (1.0, 2.0, 5.0):
            plus = tomography.nonclassical_area(_solve(D, F, 0.0, dim))
            minus = tomography.nonclassical_area(_solve(-D, F, 0.0, dim))
            asym = max(asym, abs(plus - minus))
    deltas = np.arange(0.0, 5.01, 0.5)
    profile = np.array([tomography.nonclassical_area(_solve(D, 5.0, 0.0, dim)) for D in deltas])
    # falling edge of the tongue: strictly decreasing until the first local minimum
    edge = next((i for i in range(1, len(profile) - 1) if profile[i + 1] >= profile[i]), len(profile) - 1)
    falls = bool(np.all(np.diff(profile[: edge + 1]) < 0)) and 0 < edge < len(profile) - 1
    peak = bool(profile[0] > np.max(profile[1:]))
    at_resonance = tomography.nonclassical_area(_solve(0.0, 10.0, 0.0, dim))
    report = sweep.convergence_check(SystemParams(0.0, 10.0, 0.0, dim=dim), "delta", (20, 40, 60))
    ok = asym <= 1e-6 and falls and peak and at_resonance > 10 and report.cutoff_dependent
    return CheckResult(7, "classical-regime properties",
                       f"asym {asym:.1e}; edge |D|={deltas[edge]:g}; delta(10,0)={at_resonance:.2f}; "
                       f"cutoff-dep={report.cutoff_dependent}",
                       "1e-6; decreasing; > 10; flagged", ok,
                       detail=f"delta(F=5, |D|) = {np.round(profile, 3).tolist()}")


def random_builder_params(n: int = 20, seed: int = 20240607) -> list[SystemParams]:
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        out.append(SystemParams(detuning=rng.uniform(-5, 5), drive=rng.uniform(0, 10),
                                kappa2=rng.uniform(0, 5), kappa1=rng.uniform(0.5, 2),
                                dim=int(rng.integers(3, 21))))
    return out


@_timed
def check_builder_equivalence() -> CheckResult:
    worst = 0.0
    for params in random_builder_params():
        diff = liouvillian.build_operator_form(params).matrix - liouvillian.build_element_form(params).matrix
        worst = max(worst, float(np.max(np.abs(diff.toarray()))) if diff.nnz else 0.0)
    return CheckResult(8, "builder equivalence", f"max entry diff {worst:.2e}", "1e-12", worst <= 1e-12)


@_timed
def check_dynamics() -> CheckResult:
    params = SystemParams(2.0, 1.0, 1.0)
    dt = 0.1 / liouvillian.spectral_scale(params)
    rho_t = liouvillian.evolve(fock.vacuum(params.fock_dim), params, 50.0, dt)
    rho_ss, _ = liouvillian.solve(params)
    err = float(np.max(np.abs(rho_t - rho_ss)))
    drift = abs(np.trace(rho_t) - 1)
    return CheckResult(9, "dynamics vs null space", f"max diff {err:.2e}; trace drift {drift:.1e}",
                       "1e-6", err <= 1e-6 and drift <= 1e-8)


def random_density(rng, dim: int) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


@_timed
def check_tomography() -> CheckResult:
    grid = tomography.QuadratureGrid(-8.0, 8.0, 321, 16)
    x = grid.x
    vac = tomography.tomogram(fock.vacuum(6), grid)
    vac_err = max(float(np.max(np.abs(vac.values - np.exp(-x**2) / math.sqrt(math.pi)))),
                  abs(vac.values[0, grid.n_x // 2] - 1 / math.sqrt(math.pi)))
    lc_rho = analytic.limit_cycle(6)
    lc = tomography.tomogram(lc_rho, grid)
    lc_err = max(float(np.max(np.abs(lc.values - analytic.undriven_tomogram(x)))),
                 abs(lc.values[0, grid.n_x // 2] - 2 / (3 * math.sqrt(math.pi))))
    driven = tomography.tomogram(_solve(2.0, 10.0, 1e3), grid)
    norm_err = max(float(np.max(np.abs(t.row_norms() - 1))) for t in (vac, lc, driven))
    delta_vac = abs(tomography.nonclassical_area(fock.vacuum(6)))
    rng = np.random.default_rng(7)
    worst_neg = 0.0
    for _ in range(100):
        rho = random_density(rng, int(rng.integers(2, 11)))
        delta, err = tomography.nonclassical_area_with_error(rho)
        worst_neg = min(worst_neg, delta + err)
    lc_delta = tomography.nonclassical_area(lc_rho)
    lc_target = 2 * math.pi * (math.sqrt(5 / 6) - 1 / math.sqrt(2))
    ok = (vac_err <= 1e-12 and lc_err <= 1e-12 and norm_err <= 1e-6 and delta_vac <= 1e-9
          and worst_neg >= 0 and abs(lc_delta - lc_target) <= 1e-6)
    return CheckResult(10, "tomography suite",
                       f"vac {vac_err:.1e}; lc {lc_err:.1e}; norm {norm_err:.1e}; "
                       f"dvac {delta_vac:.1e}; lc-delta {abs(lc_delta - lc_target):.1e}; min {worst_neg:.1e}",
                       "1e-12/1e-12/1e-6/1e-9/1e-6/>=0", ok)


@_timed
def check_closed_form_tomogram() -> CheckResult:
    X = np.linspace(-4, 4, 21)[:, None]
    theta = np.linspace(0, 2 * np.pi, 16, endpoint=False)[None, :]
    worst = 0.0
    for F, D in ((0.0, 0.0), (1.0, 2.0), (10.0, 0.0), (3.0, -5.0), (0.5, 1.0)):
        params = SystemParams(D, F, 1.0)
        a = analytic.analytic_tomogram(params, X, theta, deep_limit=True)
        b = analytic.closed_form_tomogram(params, X, theta, deep_limit=True)
        worst = max(worst, float(np.max(np.abs(a - b))))
    return CheckResult(11, "closed-form tomogram limit", f"max diff {worst:.2e}", "1e-10", worst <= 1e-10)


@_timed
def check_gradient() -> CheckResult:
    h = 1e-5
    worst = 0.0
    crossing = 0.0
    for D in (0.0, 2.0, 5.0):
        for F in np.linspace(0, 10, 101):
            p = SystemParams(D, F, 1.0)
            if F == 0:
                # one-sided: the drive cannot go negative
                fd = (analytic.coherence(p.with_(drive=h)) - analytic.coherence(p)) / h
            else:
                fd = (analytic.coherence(p.with_(drive=F + h)) - analytic.coherence(p.with_(drive=F - h))) / (2 * h)
            worst = max(worst, abs(analytic.coherence_gradient(p) - fd))
        fc = analytic.critical_drive(D, 1.0)
        root = brentq(lambda f: analytic.coherence_gradient(SystemParams(D, f, 1.0)), 0.1, 10.0, xtol=1e-14)
        crossing = max(crossing, abs(root - fc))
    return CheckResult(12, "coherence gradient", f"fd dev {worst:.2e}; zero at F_c {crossing:.1e}",
                       "1e-6; 1e-8", worst <= 1e-6 and crossing <= 1e-8)


def _even_deviation(amap) -> float:
    v = amap.values
    if not np.allclose(amap.detuning, -amap.detuning[::-1], atol=1e-12):
        raise ValueError("detuning axis is not symmetric")
    return float(np.nanmax(np.abs(v - v[::-1, :])))


@_timed
def check_symmetry(cache=None) -> CheckResult:
    """Literal check: rho(-D) against the plain conjugate of rho(D).

    The exact symmetry of the generator is conjugation combined with the
    parity (-1)^n, which flips the sign of odd-parity coherences such as
    rho_01. That corrected form is reported alongside.
    """
    worst_plain = 0.0
    worst_parity = 0.0
    for D, F, k2, dim in ((2.0, 1.0, 1.0, None), (3.0, 5.0, 1e3, None), (1.5, 4.0, 0.0, 40)):
        plus = _solve(D, F, k2, dim)
        minus = _solve(-D, F, k2, dim)
        worst_plain = max(worst_plain, float(np.max(np.abs(minus - plus.conj()))))
        worst_parity = max(worst_parity, float(np.max(np.abs(minus - fock.rotate(plus.conj(), math.pi)))))
    records = deep_quantum_grid(cache)
    worst_map = max(_even_deviation(sweep.arnold_map(records, m)) for m in ("delta", "g2", "coherence"))
    return CheckResult(13, "detuning symmetry",
                       f"conj {worst_plain:.1e} (parity-conj {worst_parity:.1e}); maps {worst_map:.1e}",
                       "1e-10; 1e-8", worst_plain <= 1e-10 and worst_map <= 1e-8)


def _metric_array(records):
    return np.array([[r.value(m) for m in ("delta", "g2", "coherence", "mean_n", "purity")] for r in records])


@_timed
def check_engineering(cache=None, parallelism: int = 8) -> CheckResult:
    config = sweep.preset("fig1b", metrics=sweep.METRIC_NAMES)
    tasks = sweep.plan(config)
    start = time.perf_counter()
    serial = sweep.run(tasks, config, 1)
    t_serial = time.perf_counter() - start
    start = time.perf_counter()
    parallel = sweep.run(tasks, config, parallelism)
    t_parallel = time.perf_counter() - start
    if cache is not None:
        cache["fig1b"] = serial
    a, b = _metric_array(serial), _metric_array(parallel)
    identical = a.shape == b.shape and a.tobytes() == b.tobytes()
    ok = identical and max(t_serial, t_parallel) < 180 and len(serial) == 51 * 51
    return CheckResult(14, "51x51 map runtime/determinism",
                       f"{t_serial:.1f} s (p=1), {t_parallel:.1f} s (p={parallelism}), identical={identical}",
                       "< 180 s, bitwise equal", ok)


def run_all(parallelism: int = 8, verbose_print=None) -> list[CheckResult]:
    cache: dict = {}
    checks = [
        check_limit_cycle,
        check_analytic_oracle,
        check_coherence_peak,
        check_mean_excitation,
        check_delta_saturation,
        lambda: check_engineering(cache, parallelism),
        lambda: check_g2_deep(cache),
        check_classical_regime,
        check_builder_equivalence,
        check_dynamics,
        check_tomography,
        check_closed_form_tomogram,
        check_gradient,
        lambda: check_symmetry(cache),
    ]
    results = []
    for check in checks:
        res = check()
        results.append(res)
        if verbose_print is not None:
            verbose_print(res.line())
    return sorted(results, key=lambda r: r.number)

