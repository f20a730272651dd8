"""Command-line interface: ``qvdp <command> [options]``.

Commands: steady, tomogram, wigner, metrics, sweep, validate.

Exit codes: 0 success, 1 computation failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, field

import numpy as np

from . import io, liouvillian, sweep, tomography, validation
from .errors import QvdpError
from .liouvillian import SystemParams
from .metrics import all_metrics

COMMANDS = ("steady", "tomogram", "wigner", "metrics", "sweep", "validate")
THREADS_ENV = "QVDP_THREADS"

log = logging.getLogger("qvdp")


@dataclass
class RunConfig:
    command: str
    params: SystemParams | None = None
    x_range: tuple = (-6.0, 6.0)
    nx: int = 241
    ntheta: int = 64
    fmt: str = "csv"
    out: str | None = None
    threads: int = 1
    sweep_config: sweep.SweepConfig | None = None
    log_path: str | None = None
    extra: dict = field(default_factory=dict)


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-F", "--drive", type=float, help="drive strength F (units of kappa1)")
    common.add_argument("-D", "--detuning", type=float, help="detuning Delta (units of kappa1)")
    common.add_argument("--kappa2", type=float, help="two-photon loss rate")
    common.add_argument("--kappa1", type=float, default=None, help="gain rate (default 1)")
    common.add_argument("--dim", type=int, help="Fock truncation (default: automatic, required if kappa2 < 0.1)")
    common.add_argument("--x-range", type=float, nargs=2, metavar=("XMIN", "XMAX"),
                        help="quadrature / phase-space range")
    common.add_argument("--nx", type=int, help="grid points along X (or x and p for wigner)")
    common.add_argument("--ntheta", type=int, help="number of quadrature angles")
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--format", choices=io.FORMATS, default="csv")
    common.add_argument("--threads", type=int, help=f"worker processes (env {THREADS_ENV}, default all cores)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="qvdp", description="Driven quantum van der Pol oscillator toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("steady", parents=[common], help="steady-state density matrix")
    sub.add_parser("tomogram", parents=[common], help="steady-state tomogram on an (X, theta) grid")
    sub.add_parser("wigner", parents=[common], help="steady-state Wigner function")
    sub.add_parser("metrics", parents=[common], help="synchronization metrics of the steady state")
    sw = sub.add_parser("sweep", parents=[common], help="parameter sweep / Arnold-tongue data")
    sw.add_argument("--config", help="JSON sweep configuration")
    sw.add_argument("--preset", choices=sorted(sweep.PRESETS), help="named reference grid")
    sw.add_argument("--log", help="append-only record log used for resuming")
    sub.add_parser("validate", parents=[common], help="run the validation suite")
    return parser


def parse_args(argv=None) -> RunConfig:
    parser = _parser()
    ns = parser.parse_args(argv)
    threads = ns.threads if ns.threads is not None else sweep.default_parallelism()
    if threads < 1:
        parser.error("--threads must be at least 1")
    cfg = RunConfig(command=ns.command, fmt=ns.format, out=ns.out, threads=threads)
    cfg.extra["verbose"] = ns.verbose
    if ns.x_range is not None:
        cfg.x_range = tuple(ns.x_range)
    if ns.nx is not None:
        cfg.nx = ns.nx
    if ns.ntheta is not None:
        cfg.ntheta = ns.ntheta
        cfg.extra["ntheta_set"] = True

    if ns.command in ("steady", "tomogram", "wigner", "metrics"):
        missing = [flag for flag, value in (("-F/--drive", ns.drive), ("-D/--detuning", ns.detuning),
                                            ("--kappa2", ns.kappa2)) if value is None]
        if missing:
            parser.error(f"{ns.command} requires {', '.join(missing)}")
        try:
            cfg.params = SystemParams(ns.detuning, ns.drive, ns.kappa2,
                                      1.0 if ns.kappa1 is None else ns.kappa1, ns.dim)
            cfg.params.fock_dim
        except (QvdpError, ValueError) as exc:
            parser.error(str(exc))
    elif ns.command == "sweep":
        if (ns.config is None) == (ns.preset is None):
            parser.error("sweep needs exactly one of --config or --preset")
        overrides = {}
        if ns.drive is not None:
            overrides["drive_values"] = (ns.drive,)
        if ns.detuning is not None:
            overrides["detuning_values"] = (ns.detuning,)
        if ns.kappa2 is not None:
            overrides["kappa2_values"] = (ns.kappa2,)
        if ns.kappa1 is not None:
            overrides["kappa1"] = ns.kappa1
        if ns.dim is not None:
            overrides["dim"] = ns.dim
        if ns.ntheta is not None:
            overrides["n_theta"] = ns.ntheta
        try:
            if ns.config is not None:
                base = sweep.SweepConfig.load(ns.config).to_dict()
                base.update({k: (list(v) if isinstance(v, tuple) else v) for k, v in overrides.items()})
                cfg.sweep_config = sweep.SweepConfig.from_dict(base)
            else:
                cfg.sweep_config = sweep.preset(ns.preset, **overrides)
        except (OSError, ValueError) as exc:
            parser.error(str(exc))
        cfg.log_path = ns.log or cfg.sweep_config.output_path
    return cfg


def _meta(cfg: RunConfig) -> dict:
    meta = {"command": cfg.command}
    if cfg.params is not None:
        p = cfg.params
        meta.update(F=p.drive, Delta=p.detuning, kappa1=p.kappa1, kappa2=p.kappa2, dim=p.fock_dim,
                    cutoff_flag=p.cutoff_dependent)
    return meta


def run_validate(out=None, threads: int = 8) -> int:
    """Run every validation check, print a table, return 0 iff all pass."""
    stream = sys.stdout if out is None else out
    results = validation.run_all(parallelism=threads, verbose_print=lambda line: print(line, file=stream))
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed", file=stream)
    for r in failed:
        if r.detail:
            print(f"  #{r.number} {r.name}: {r.detail}", file=stream)
    return 0 if not failed else 1


def execute(cfg: RunConfig) -> int:
    if cfg.command == "validate":
        return run_validate(threads=cfg.threads)
    if cfg.command == "sweep":
        conf = cfg.sweep_config
        records = sweep.run(sweep.plan(conf), conf, cfg.threads, cfg.log_path)
        failed = sum(not r.converged for r in records)
        if failed:
            log.warning("%d of %d points did not converge", failed, len(records))
        io.emit_records(records, cfg.fmt, cfg.out,
                        meta={"config": conf.to_dict(), "config_hash": conf.config_hash()})
        return 0

    rho, res = liouvillian.solve(cfg.params)
    meta = _meta(cfg) | {"residual": res}
    if cfg.command == "steady":
        io.emit_density(rho, cfg.fmt, cfg.out, meta)
    elif cfg.command == "tomogram":
        grid = tomography.QuadratureGrid(cfg.x_range[0], cfg.x_range[1], cfg.nx, cfg.ntheta)
        io.emit_tomogram(tomography.tomogram(rho, grid), cfg.fmt, cfg.out, meta)
    elif cfg.command == "wigner":
        lo, hi = cfg.x_range
        axis = np.linspace(lo, hi, cfg.nx)
        io.emit_wigner(tomography.wigner(rho, x=axis, p=axis), cfg.fmt, cfg.out, meta)
    elif cfg.command == "metrics":
        n_theta = cfg.ntheta if cfg.extra.get("ntheta_set") else tomography.DEFAULT_N_THETA
        rec = sweep.SweepRecord(0, cfg.params.drive, cfg.params.detuning, cfg.params.kappa1, cfg.params.kappa2,
                                cfg.params.fock_dim, cfg.params.cutoff_dependent,
                                all_metrics(rho, cfg.params, n_theta=n_theta), res, 0)
        io.emit_records([rec], cfg.fmt, cfg.out, meta)
    return 0


def main(argv=None) -> int:
    cfg = parse_args(argv)
    logging.basicConfig(level=logging.INFO if cfg.extra.get("verbose") else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return execute(cfg)
    except (QvdpError, OSError, ValueError, ArithmeticError) as exc:
        print(f"qvdp {cfg.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
