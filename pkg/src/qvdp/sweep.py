"""Parameter sweeps over (drive, detuning, kappa2) and Arnold-tongue maps.

Each grid point is an independent work unit (build generator, solve, compute
metrics). Points can run in a process pool; results are reordered by task
index, so a sweep's output does not depend on the degree of parallelism.

With a log path, every finished record is appended as one JSON line after a
header carrying the schema version and a hash of the configuration. Rerunning
the same configuration against the same log skips the completed indices.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from . import analytic, liouvillian
from .errors import ConfigError, QvdpError, ShapeError
from .liouvillian import SystemParams
from .metrics import MetricsRecord, RegimeLabel, all_metrics
from .tomography import DEFAULT_N_THETA

log = logging.getLogger(__name__)

CONFIG_SCHEMA = "qvdp.sweep-config/1"
LOG_SCHEMA = "qvdp.sweep-log/1"
METRIC_NAMES = ("delta", "g2", "coherence", "mean_n")
CONVERGED_RESIDUAL = 1e-8
CONVERGENCE_RTOL = 1e-3

_METRIC_FIELDS = {"delta": "delta", "g2": "g2", "coherence": "coherence_01", "coherence_01": "coherence_01",
                  "mean_n": "mean_n", "purity": "purity"}


@dataclass(frozen=True)
class SweepConfig:
    """Axes and options of a sweep.

    ``dim=None`` is the automatic truncation policy. ``mode="analytic"``
    evaluates the closed-form deep-quantum state instead of solving; a
    ``kappa2`` of ``inf`` then selects the exact ``kappa2 -> infinity`` limit.
    """

    drive_values: tuple
    detuning_values: tuple
    kappa2_values: tuple
    kappa1: float = 1.0
    dim: int | None = None
    metrics: tuple = METRIC_NAMES
    n_theta: int = DEFAULT_N_THETA
    mode: str = "numeric"
    output_path: str | None = None

    def __post_init__(self):
        for name in ("drive_values", "detuning_values", "kappa2_values", "metrics"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
            if not getattr(self, name):
                raise ConfigError(f"{name} must not be empty")
        object.__setattr__(self, "drive_values", tuple(float(v) for v in self.drive_values))
        object.__setattr__(self, "detuning_values", tuple(float(v) for v in self.detuning_values))
        object.__setattr__(self, "kappa2_values", tuple(float(v) for v in self.kappa2_values))
        unknown = set(self.metrics) - set(METRIC_NAMES)
        if unknown:
            raise ConfigError(f"unknown metrics {sorted(unknown)}; choose from {METRIC_NAMES}")
        if self.dim is not None and self.dim < 3:
            raise ConfigError("fixed dim must be at least 3")
        if self.mode not in ("numeric", "analytic"):
            raise ConfigError(f"mode must be 'numeric' or 'analytic', got {self.mode!r}")
        if self.mode == "numeric":
            if any(math.isinf(k) for k in self.kappa2_values):
                raise ConfigError("kappa2 = inf is only available in analytic mode")
            if self.dim is None and any(k / self.kappa1 < liouvillian.CUTOFF_KAPPA2 for k in self.kappa2_values):
                raise ConfigError("kappa2/kappa1 < 0.1 requires a fixed dim")
        elif any(k <= 0 for k in self.kappa2_values):
            raise ConfigError("analytic mode needs kappa2 > 0")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["kappa2_values"] = [("inf" if math.isinf(k) else k) for k in self.kappa2_values]
        for key in ("drive_values", "detuning_values", "metrics"):
            d[key] = list(d[key])
        return {"version": CONFIG_SCHEMA, **d}

    @classmethod
    def from_dict(cls, data: dict) -> "SweepConfig":
        data = dict(data)
        version = data.pop("version", None)
        if version != CONFIG_SCHEMA:
            raise ConfigError(f"unsupported sweep config version {version!r}; expected {CONFIG_SCHEMA!r}")
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown sweep config keys {sorted(unknown)}")
        if "kappa2_values" in data:
            data["kappa2_values"] = [float(k) for k in data["kappa2_values"]]
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def load(cls, path) -> "SweepConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def config_hash(self) -> str:
        d = self.to_dict()
        d.pop("output_path")
        blob = json.dumps(d, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


class Task(NamedTuple):
    index: int
    drive: float
    detuning: float
    kappa2: float


@dataclass(frozen=True)
class SweepRecord:
    index: int
    drive: float
    detuning: float
    kappa1: float
    kappa2: float
    dim_used: int
    cutoff_flag: bool
    metrics: MetricsRecord | None
    solver_residual: float
    wall_time_ms: int
    error: str | None = None
    extras: dict = field(default_factory=dict)

    @property
    def converged(self) -> bool:
        return self.error is None and not self.solver_residual > CONVERGED_RESIDUAL

    def value(self, metric_name: str) -> float:
        if metric_name in self.extras:
            return self.extras[metric_name]
        if self.metrics is None:
            return math.nan
        try:
            return float(getattr(self.metrics, _METRIC_FIELDS[metric_name]))
        except KeyError:
            raise KeyError(f"unknown metric {metric_name!r}") from None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["metrics"] = None if self.metrics is None else self.metrics.as_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SweepRecord":
        d = dict(d)
        m = d.get("metrics")
        if m is not None:
            m = dict(m)
            m["regime"] = RegimeLabel(m["regime"])
            d["metrics"] = MetricsRecord(**m)
        return cls(**d)


def plan(config: SweepConfig) -> list[Task]:
    """Cartesian product of the axes: kappa2 outermost, then detuning, drive innermost."""
    tasks = []
    for k2 in config.kappa2_values:
        for delta in config.detuning_values:
            for drive in config.drive_values:
                tasks.append(Task(len(tasks), drive, delta, k2))
    return tasks


def evaluate(task: Task, config: SweepConfig) -> SweepRecord:
    """Run one grid point end to end. Failures are captured in the record."""
    start = time.perf_counter()
    extras = {}
    dim_used = 3
    residual = math.nan
    cutoff = False
    try:
        if config.mode == "analytic":
            deep = math.isinf(task.kappa2)
            params = SystemParams(task.detuning, task.drive, 1.0 if deep else task.kappa2, config.kappa1)
            state = analytic.analytic_steady_state(params, deep_limit=deep)
            rho = state.density_matrix(3)
            extras = {"coherence_gradient": analytic.coherence_gradient(params),
                      "ansatz_valid": state.valid}
        else:
            params = SystemParams(task.detuning, task.drive, task.kappa2, config.kappa1, config.dim)
            dim_used = params.fock_dim
            cutoff = params.cutoff_dependent
            rho, residual = liouvillian.solve(params)
        metrics = all_metrics(rho, params, n_theta=config.n_theta)
        error = None
    except (QvdpError, ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        metrics = None
        error = f"{type(exc).__name__}: {exc}"
        residual = getattr(exc, "residual", math.nan)
        log.warning("sweep point %d failed: %s", task.index, error)
    wall = int(round(1000 * (time.perf_counter() - start)))
    return SweepRecord(task.index, task.drive, task.detuning, config.kappa1, task.kappa2, dim_used, cutoff,
                       metrics, float(residual), wall, error, extras)


def _read_log(path: Path, config_hash: str) -> dict[int, SweepRecord]:
    done = {}
    with open(path) as fh:
        header = json.loads(fh.readline() or "{}")
        if header.get("schema") != LOG_SCHEMA:
            raise ConfigError(f"{path}: not a sweep log of schema {LOG_SCHEMA}")
        if header.get("config_hash") != config_hash:
            raise ConfigError(f"{path}: written by a different configuration "
                              f"({header.get('config_hash')} != {config_hash})")
        for line in fh:
            if not line.strip():
                continue
            try:
                rec = SweepRecord.from_dict(json.loads(line))
            except (json.JSONDecodeError, TypeError, KeyError):
                # a torn final line from an interrupted run
                break
            done[rec.index] = rec
    return done


def read_log(path) -> tuple[dict, list[SweepRecord]]:
    """Header and records of a sweep log, records in task order."""
    with open(path) as fh:
        header = json.loads(fh.readline())
        records = [SweepRecord.from_dict(json.loads(line)) for line in fh if line.strip()]
    return header, sorted(records, key=lambda r: r.index)


def default_parallelism() -> int:
    env = os.environ.get("QVDP_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run(tasks: Sequence[Task], config: SweepConfig, parallelism: int = 1,
        log_path=None) -> list[SweepRecord]:
    """Evaluate ``tasks`` and return one record per task, in task order."""
    if parallelism < 1:
        raise ValueError("parallelism must be at least 1")
    done: dict[int, SweepRecord] = {}
    sink = None
    if log_path is not None:
        log_path = Path(log_path)
        chash = config.config_hash()
        if log_path.exists() and log_path.stat().st_size > 0:
            done = _read_log(log_path, chash)
            log.info("resuming sweep: %d of %d points already done", len(done), len(tasks))
            sink = open(log_path, "a")
        else:
            sink = open(log_path, "w")
            sink.write(json.dumps({"schema": LOG_SCHEMA, "config_hash": chash, "config": config.to_dict()}) + "\n")
            sink.flush()

    todo = [t for t in tasks if t.index not in done]

    def record(rec):
        done[rec.index] = rec
        if sink is not None:
            sink.write(json.dumps(rec.to_dict()) + "\n")
            sink.flush()

    try:
        if parallelism == 1 or len(todo) <= 1:
            for task in todo:
                record(evaluate(task, config))
        else:
            with ProcessPoolExecutor(max_workers=parallelism) as pool:
                futures = [pool.submit(evaluate, task, config) for task in todo]
                for fut in as_completed(futures):
                    record(fut.result())
    finally:
        if sink is not None:
            sink.close()
    return [done[t.index] for t in tasks]


def run_config(config: SweepConfig, parallelism: int = 1) -> list[SweepRecord]:
    return run(plan(config), config, parallelism, config.output_path)


@dataclass(frozen=True)
class ArnoldMap:
    metric: str
    kappa2: float
    detuning: np.ndarray
    drive: np.ndarray
    values: np.ndarray  # (len(detuning), len(drive))


def arnold_map(records: Sequence[SweepRecord], metric_name: str, kappa2: float | None = None) -> ArnoldMap:
    """Arrange one metric of a rectangular sweep as a (detuning x drive) matrix.

    Failed points appear as ``nan``.
    """
    k2_values = sorted({r.kappa2 for r in records})
    if kappa2 is None:
        if len(k2_values) != 1:
            raise ShapeError(f"records span kappa2 values {k2_values}; pick one")
        kappa2 = k2_values[0]
    recs = [r for r in records if r.kappa2 == kappa2]
    if not recs:
        raise ShapeError(f"no records at kappa2={kappa2}")
    deltas = np.array(sorted({r.detuning for r in recs}))
    drives = np.array(sorted({r.drive for r in recs}))
    values = np.full((deltas.size, drives.size), np.nan)
    filled = np.zeros(values.shape, dtype=bool)
    d_index = {d: i for i, d in enumerate(deltas)}
    f_index = {f: j for j, f in enumerate(drives)}
    for r in recs:
        i, j = d_index[r.detuning], f_index[r.drive]
        if not filled[i, j]:
            values[i, j] = r.value(metric_name)
            filled[i, j] = True
    if not filled.all():
        missing = [(float(deltas[i]), float(drives[j])) for i, j in zip(*np.nonzero(~filled))]
        raise ShapeError(f"grid is not rectangular; missing (detuning, drive) points: {missing}")
    return ArnoldMap(metric_name, kappa2, deltas, drives, values)


@dataclass(frozen=True)
class ConvergenceReport:
    metric: str
    dims: tuple
    values: tuple
    relative_changes: tuple
    converged: bool

    @property
    def cutoff_dependent(self) -> bool:
        return not self.converged


def metric_value(params: SystemParams, metric_name: str, n_theta: int = DEFAULT_N_THETA) -> float:
    rho, _ = liouvillian.solve(params)
    rec = all_metrics(rho, params, n_theta=n_theta)
    return float(getattr(rec, _METRIC_FIELDS[metric_name]))


def convergence_check(params: SystemParams, metric_name: str, dim_list: Sequence[int],
                      rtol: float = CONVERGENCE_RTOL) -> ConvergenceReport:
    """Recompute a metric at increasing truncations and compare successive values."""
    dims = tuple(int(d) for d in dim_list)
    if len(dims) < 2 or any(b <= a for a, b in zip(dims, dims[1:])):
        raise ValueError(f"dim_list must be strictly ascending with at least two entries, got {dims}")
    values = tuple(metric_value(params.with_(dim=d), metric_name) for d in dims)
    changes = tuple(abs(b - a) / max(abs(b), 1e-300) for a, b in zip(values, values[1:]))
    return ConvergenceReport(metric_name, dims, values, changes, all(c < rtol for c in changes))


# Figure presets: (drive axis, detuning axis, kappa2 axis, fixed dim, mode, metrics)
_F_AXIS = tuple(np.linspace(0.0, 10.0, 51))

def _symmetric_axis(half_width, n):
    axis = np.linspace(-half_width, half_width, n)
    # exact mirror pairs so that maps can be flipped about zero detuning
    return tuple((axis - axis[::-1]) / 2)


_D_AXIS = _symmetric_axis(5.0, 51)
#: truncation used for the kappa2 = 0 panels; the reference cutoff is unknown
CLASSICAL_DIM = 60

PRESETS = {
    "fig1a": dict(drive_values=_F_AXIS, detuning_values=_D_AXIS, kappa2_values=(0.0,), dim=CLASSICAL_DIM,
                  metrics=("delta",)),
    "fig1b": dict(drive_values=_F_AXIS, detuning_values=_D_AXIS, kappa2_values=(1e3,), dim=12,
                  metrics=("delta",)),
    "fig1c": dict(drive_values=(0.0, 1.0, 2.0, 5.0, 10.0), detuning_values=(2.0,),
                  kappa2_values=tuple(np.logspace(-1, 3, 33)), metrics=("delta",)),
    "fig2a": dict(drive_values=_F_AXIS, detuning_values=_D_AXIS, kappa2_values=(0.0,), dim=CLASSICAL_DIM,
                  metrics=("g2",)),
    "fig2b": dict(drive_values=_F_AXIS, detuning_values=_D_AXIS, kappa2_values=(1.0,), metrics=("g2",)),
    "fig2c": dict(drive_values=_F_AXIS, detuning_values=_D_AXIS, kappa2_values=(1e3,), metrics=("g2",)),
    "fig3": dict(drive_values=(0.0, 1.0, 10.0), detuning_values=(2.0,), kappa2_values=(1e3,),
                 metrics=METRIC_NAMES),
    "fig4": dict(drive_values=_F_AXIS, detuning_values=_D_AXIS, kappa2_values=(1e4,), metrics=("coherence",)),
    "fig5": dict(drive_values=_F_AXIS, detuning_values=_D_AXIS, kappa2_values=(math.inf,), mode="analytic",
                 metrics=("coherence",)),
    "fig6b": dict(drive_values=_F_AXIS, detuning_values=_D_AXIS, kappa2_values=(math.inf,), mode="analytic",
                  metrics=("mean_n",)),
}


def preset(name: str, **overrides) -> SweepConfig:
    """Sweep configuration for one named reference grid."""
    try:
        base = dict(PRESETS[name])
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    base.update({k: v for k, v in overrides.items() if v is not None})
    return SweepConfig(**base)
