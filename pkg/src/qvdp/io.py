"""CSV/JSON serialization of sweep records and long-format grid tables.

Floats are written with 17 significant digits, which round-trips IEEE doubles
exactly.
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from contextlib import contextmanager
from typing import Iterable, Sequence

import numpy as np

RECORD_FIELDS = ("F", "Delta", "kappa1", "kappa2", "dim", "delta", "g2", "coherence", "mean_n", "purity",
                 "residual", "cutoff_flag", "regime")
FORMATS = ("csv", "json")


def fmt_float(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def record_row(rec) -> dict:
    """Flatten a :class:`~qvdp.sweep.SweepRecord` into the output schema."""
    m = rec.metrics
    nan = math.nan
    return {
        "F": rec.drive,
        "Delta": rec.detuning,
        "kappa1": rec.kappa1,
        "kappa2": rec.kappa2,
        "dim": rec.dim_used,
        "delta": m.delta if m else nan,
        "g2": m.g2 if m else nan,
        "coherence": m.coherence_01 if m else nan,
        "mean_n": m.mean_n if m else nan,
        "purity": m.purity if m else nan,
        "residual": rec.solver_residual,
        "cutoff_flag": rec.cutoff_flag,
        "regime": m.regime.value if m else "Failed",
    }


@contextmanager
def _open_out(path):
    if path is None or str(path) == "-":
        yield sys.stdout
        return
    try:
        fh = open(path, "w", newline="")
    except OSError as exc:
        raise OSError(f"cannot write output to {path}: {exc.strerror or exc}") from exc
    with fh:
        yield fh


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return fmt_float(v)
    return str(v)


def _json_value(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        # JSON has no nan/inf literals
        if math.isnan(v):
            return None
        return v if math.isfinite(v) else fmt_float(v)
    return v


def write_table(header: Sequence[str], rows: Iterable[Sequence], fmt: str = "csv", path=None,
                meta: dict | None = None) -> None:
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}; choose from {FORMATS}")
    rows = list(rows)
    with _open_out(path) as fh:
        if fmt == "csv":
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([_cell(v) for v in row])
        else:
            doc = {"meta": meta or {}, "fields": list(header),
                   "rows": [{k: _json_value(v) for k, v in zip(header, row)} for row in rows]}
            text = json.dumps(doc, indent=1, default=_json_value)
            # json.dumps uses repr for floats, which is already shortest round-trip
            fh.write(text + "\n")


def emit_records(records, fmt: str = "csv", path=None, meta: dict | None = None) -> None:
    rows = [record_row(r) for r in records]
    write_table(RECORD_FIELDS, ([row[k] for k in RECORD_FIELDS] for row in rows), fmt, path, meta)


def emit_tomogram(tomo, fmt: str = "csv", path=None, meta: dict | None = None) -> None:
    theta, x = tomo.grid.theta, tomo.grid.x
    rows = ((theta[i], x[j], tomo.values[i, j]) for i in range(theta.size) for j in range(x.size))
    write_table(("theta", "X", "omega"), rows, fmt, path, meta)


def emit_wigner(wmap, fmt: str = "csv", path=None, meta: dict | None = None) -> None:
    rows = ((wmap.x[j], wmap.p[i], wmap.values[i, j]) for i in range(wmap.p.size) for j in range(wmap.x.size))
    write_table(("x", "p", "W"), rows, fmt, path, meta)


def emit_density(rho, fmt: str = "csv", path=None, meta: dict | None = None) -> None:
    dim = rho.shape[0]
    rows = ((m, n, rho[m, n].real, rho[m, n].imag) for m in range(dim) for n in range(dim))
    write_table(("m", "n", "re", "im"), rows, fmt, path, meta)


def _parse(v: str):
    low = v.lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return int(v)
    except ValueError:
        pass
    try:
        return float(v)
    except ValueError:
        return v


def read_table(path_or_text, fmt: str = "csv") -> list[dict]:
    """Read back a table written by :func:`write_table`."""
    if fmt == "json":
        with open(path_or_text) as fh:
            doc = json.load(fh)
        def restore(v):
            if v is None:
                return math.nan
            return float(v) if v in ("inf", "-inf") else v
        return [{k: restore(v) for k, v in row.items()} for row in doc["rows"]]
    if isinstance(path_or_text, io.StringIO):
        reader = csv.DictReader(path_or_text)
        return [{k: _parse(v) for k, v in row.items()} for row in reader]
    with open(path_or_text, newline="") as fh:
        return [{k: _parse(v) for k, v in row.items()} for row in csv.DictReader(fh)]
