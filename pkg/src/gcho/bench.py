"""Benchmark CLI: run registered problems, emit trace/certificate/summary
CSV files (plus figures), reproduce the two-formulation comparison table,
and run the convex-rate experiment.

Commands::

    gcho run --problem mgh01 --form minmax --p 2 --out results/
    gcho run --problem toymax --p 1 --certify 1 --out results/
    gcho run --problem cvx-ls --p 2 --rate-check --out results/
    gcho table1 --out results/

The ``GCHO_LOG`` environment variable ({off, info, debug}, default off)
controls log verbosity.  CSV columns are fixed; floats are written with
shortest round-trip precision so repeated runs with the same seed are
byte-identical apart from the wall-clock column.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import math
import os
import sys
import zlib
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .certify import CertificateRecord, certificate_sweep, fit_rate
from .driver import STEP_TOL, SUBSOLVER_FAILURE, IterateTrace, SolverConfig, run as run_driver
from .errors import GchoError, SubsolverFailure, UnknownProblem
from .problem import GATED_MGH, ProblemSpec, registry_lookup

log = logging.getLogger("gcho")

TRACE_COLUMNS = ["k", "f", "step_norm", "M_max", "ls_trials", "inner_iters", "stat_res", "wall_ms"]
CERT_COLUMNS = ["cert_k", "y_dist", "Sf_y", "ratio1", "ratio2", "theta_hat"]
SUMMARY_COLUMNS = ["name", "formulation", "iters", "wall_ms", "final_f", "final_x", "status"]


def configure_logging() -> None:
    level = os.environ.get("GCHO_LOG", "off").lower()
    if level == "off":
        logging.getLogger("gcho").addHandler(logging.NullHandler())
        return
    logging.basicConfig(
        level=logging.DEBUG if level == "debug" else logging.INFO,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
    )


def _fmt(value) -> str:
    """Shortest round-trip decimal for floats, plain str otherwise."""
    if isinstance(value, float):
        return repr(value)
    return str(value)


@dataclasses.dataclass(frozen=True)
class RunManifest:
    """Reproducibility record written next to the CSV outputs."""

    problem: str
    formulation: str
    config: dict
    seed: int
    out_dir: str
    build: str = __version__

    def write(self, path: Path) -> None:
        path.write_text(json.dumps(dataclasses.asdict(self), indent=2, default=str) + "\n")


def resolve_problem(name: str, form: Optional[str]) -> ProblemSpec:
    """Map CLI problem/formulation flags onto a registry name."""
    if ":" in name or name in ("toymax", "cvx-quad-max", "cvx-ls"):
        return registry_lookup(name)
    return registry_lookup(f"{name}:{form or 'minmax'}")


def write_trace_csv(trace: IterateTrace, path: Path) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_COLUMNS)
        for row in trace.rows:
            writer.writerow(
                [
                    row.k,
                    _fmt(row.f),
                    _fmt(row.step_norm),
                    _fmt(row.m_max),
                    row.ls_trials,
                    row.inner_iters,
                    _fmt(row.stat_res),
                    _fmt(row.wall_ms),
                ]
            )


def write_certificates_csv(records: Sequence[CertificateRecord], path: Path) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CERT_COLUMNS)
        for rec in records:
            writer.writerow(
                [
                    rec.k,
                    _fmt(rec.y_dist),
                    _fmt(rec.stationarity),
                    _fmt(rec.ratio1),
                    _fmt(rec.ratio2),
                    _fmt(rec.theta_hat if rec.theta_hat is not None else math.nan),
                ]
            )


def write_summary_csv(path: Path, rows: Sequence[dict]) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_COLUMNS)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in SUMMARY_COLUMNS])


def summary_row(spec: ProblemSpec, trace: IterateTrace) -> dict:
    name, _, form = spec.name.partition(":")
    return {
        "name": name,
        "formulation": form or "-",
        "iters": len(trace.rows),
        "wall_ms": float(sum(r.wall_ms for r in trace.rows)),
        "final_f": trace.f_final,
        "final_x": ";".join(repr(float(v)) for v in trace.x_final),
        "status": trace.status,
    }


def convex_rate_envelope(spec: ProblemSpec, trace: IterateTrace, config: SolverConfig):
    """Pointwise check of the order-p convex envelope
    f(x_k) - f* <= (p+1)^p * g(M + L) * R0^(p+1) / (p! k^p)  for k >= 1,
    using the run's starting gap to bound the level-set radius.

    Only meaningful for convex problems with known optimum; returns
    (bound_ok, envelope_constant).
    """
    if spec.known_fstar is None:
        return None
    p = config.p
    fstar = spec.known_fstar
    f = trace.f_values()
    gaps = f - fstar
    weights = config.initial_weights(spec.m)
    hints = np.array([c.hint_for(p) or 0.0 for c in spec.inner])
    g_const = spec.outer.eval(weights + hints)
    # convex quadratic objectives: level-set radius from the starting gap and
    # the smallest curvature (exact for the shipped synthetic problems)
    radius = math.sqrt(max(gaps[0], 0.0))
    const = (p + 1) ** p * g_const * radius ** (p + 1) / math.factorial(p)
    ok = all(
        gaps[k] <= const / k**p + 1e-12 * (1.0 + abs(fstar)) for k in range(1, len(gaps))
    )
    return ok, const


def cli_run(args) -> int:
    try:
        spec = resolve_problem(args.problem, args.form)
    except UnknownProblem as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    config = SolverConfig(
        p=args.p,
        m0=args.m0,
        tol_step=args.tol,
        max_iter=args.max_iter,
        theta=args.theta,
        certificate_every=args.certify,
        mu_factor=args.mu_factor,
        seed=args.seed,
    )
    trace = run_driver(spec, config)
    records: list[CertificateRecord] = []
    if args.certify > 0 and trace.rows:
        records = certificate_sweep(spec, trace, config, every=args.certify)

    rate_ok = None
    rate_fit = None
    if args.rate_check:
        gaps = trace.f_values() - (spec.known_fstar if spec.known_fstar is not None else trace.f_final)
        series = [(k, g) for k, g in enumerate(gaps[:-1]) if k >= 1 and g > 1e-15]
        if len(series) >= 8:
            rate_fit = fit_rate(series)
        envelope = convex_rate_envelope(spec, trace, config)
        if envelope is not None:
            rate_ok = envelope[0]

    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        RunManifest(
            problem=args.problem,
            formulation=args.form or "-",
            config=dataclasses.asdict(config),
            seed=args.seed,
            out_dir=str(out),
        ).write(out / "manifest.json")
        write_trace_csv(trace, out / "trace.csv")
        write_certificates_csv(records, out / "certificates.csv")
        write_summary_csv(out / "summary.csv", [summary_row(spec, trace)])
        if rate_fit is not None or rate_ok is not None:
            with (out / "rate.csv").open("w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["law", "param", "residual", "k_lo", "k_hi", "bound_ok"])
                if rate_fit is not None:
                    writer.writerow(
                        [rate_fit.law, _fmt(rate_fit.param), _fmt(rate_fit.residual),
                         rate_fit.window[0], rate_fit.window[1], rate_ok]
                    )
                else:
                    writer.writerow(["-", "-", "-", "-", "-", rate_ok])
        if args.plot:
            from .plots import render_run_figures

            render_run_figures(out, trace, records, spec.known_fstar)

    row = summary_row(spec, trace)
    print(
        f"{spec.name}: {row['iters']} iterations, f = {row['final_f']:.6g}, "
        f"x = ({row['final_x']}), status = {row['status']}"
    )
    if records:
        print(f"certificates: final subgradient distance {records[-1].stationarity:.3e}")
    if rate_fit is not None:
        print(f"rate fit: {rate_fit.law} law, parameter {rate_fit.param:.4f}")
    if rate_ok is not None:
        print(f"convex envelope bound: {'holds' if rate_ok else 'VIOLATED'}")
    if trace.status == SUBSOLVER_FAILURE:
        return 3
    return 0


def table_seed(base_seed: int, name: str) -> int:
    return base_seed + zlib.crc32(name.encode()) % 10_000


def cli_table1(args) -> int:
    rows = []
    summaries = []
    failed = False
    for base in GATED_MGH:
        entry = {"problem": base}
        for form in ("minmax", "ls"):
            name = f"{base}:{form}"
            spec = registry_lookup(name)
            config = SolverConfig(p=2, seed=table_seed(args.seed, name))
            trace = run_driver(spec, config)
            if trace.status != STEP_TOL:
                failed = True
            entry[f"{form}_iters"] = len(trace.rows)
            entry[f"{form}_wall_ms"] = float(sum(r.wall_ms for r in trace.rows))
            entry[f"{form}_x"] = trace.x_final.copy()
            entry[f"{form}_status"] = trace.status
            summaries.append(summary_row(spec, trace))
            if args.out:
                sub = Path(args.out) / f"{base}-{form}"
                sub.mkdir(parents=True, exist_ok=True)
                write_trace_csv(trace, sub / "trace.csv")
        rows.append(entry)

    wins = sum(1 for r in rows if r["minmax_iters"] <= r["ls_iters"])
    header = f"{'problem':8s} {'x* (min-max)':>28s} {'iters':>6s} {'ms':>8s} | {'x* (least-squares)':>28s} {'iters':>6s} {'ms':>8s}"
    print(header)
    print("-" * len(header))
    for r in rows:
        mm_x = ",".join(f"{v:.3g}" for v in r["minmax_x"])
        ls_x = ",".join(f"{v:.3g}" for v in r["ls_x"])
        print(
            f"{r['problem']:8s} {mm_x:>28s} {r['minmax_iters']:6d} {r['minmax_wall_ms']:8.1f} | "
            f"{ls_x:>28s} {r['ls_iters']:6d} {r['ls_wall_ms']:8.1f}"
        )
    print(
        f"min-max iterations <= least-squares iterations on {wins} of {len(rows)} problems "
        f"({'consistent with' if wins >= math.ceil(2 * len(rows) / 3) else 'weaker than'} the expected majority)"
    )

    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        with (out / "table1.csv").open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["problem", "minmax_iters", "minmax_wall_ms", "minmax_x",
                 "ls_iters", "ls_wall_ms", "ls_x"]
            )
            for r in rows:
                writer.writerow(
                    [r["problem"], r["minmax_iters"], _fmt(r["minmax_wall_ms"]),
                     ";".join(repr(float(v)) for v in r["minmax_x"]),
                     r["ls_iters"], _fmt(r["ls_wall_ms"]),
                     ";".join(repr(float(v)) for v in r["ls_x"])]
                )
        write_summary_csv(out / "summary.csv", summaries)
        if args.plot:
            from .plots import render_table_figure

            render_table_figure(out, rows)

    return 4 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gcho",
        description="Composite majorization-minimization solver benchmark",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    runp = sub.add_parser("run", help="solve one registered problem")
    runp.add_argument("--problem", required=True, help="registry name, e.g. mgh01 or toymax")
    runp.add_argument("--form", choices=["ls", "minmax"], default=None,
                      help="formulation for MGH problems (default minmax)")
    runp.add_argument("--p", type=int, choices=[1, 2], default=2, help="model order")
    runp.add_argument("--m0", type=float, default=1.0, help="initial regularization weight")
    runp.add_argument("--tol", type=float, default=1e-4, help="step-norm stopping tolerance")
    runp.add_argument("--max-iter", type=int, default=500)
    runp.add_argument("--theta", type=float, default=0.5,
                      help="relaxed stationarity factor of the smoothed subsolver")
    runp.add_argument("--certify", type=int, default=0, metavar="EVERY",
                      help="compute a certificate every EVERY iterations (0 = off)")
    runp.add_argument("--mu-factor", type=float, default=1.5,
                      help="safety factor of the certificate prox weight")
    runp.add_argument("--rate-check", action="store_true",
                      help="fit rate laws and check the convex envelope bound")
    runp.add_argument("--seed", type=int, default=0)
    runp.add_argument("--out", type=str, default=None, help="output directory for CSV/figures")
    runp.add_argument("--plot", dest="plot", action="store_true", default=True,
                      help="render figures next to the CSV output (default)")
    runp.add_argument("--no-plot", dest="plot", action="store_false")
    runp.set_defaults(func=cli_run)

    tab = sub.add_parser("table1", help="two-formulation comparison over the MGH subset")
    tab.add_argument("--out", type=str, default=None)
    tab.add_argument("--seed", type=int, default=0)
    tab.add_argument("--plot", dest="plot", action="store_true", default=True)
    tab.add_argument("--no-plot", dest="plot", action="store_false")
    tab.set_defaults(func=cli_table1)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    configure_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 2
    try:
        return args.func(args)
    except SubsolverFailure:
        return 3
    except GchoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
