"""Command line: ``rspbound {validate,bounds,simulate,report} GRAPH [flags]``.

Exit status: 0 success, 1 invalid input (parse error, failed validation,
violated precondition), 2 usage error.
"""

from __future__ import annotations

import argparse
import sys

from . import serialize
from .bounds import FAMILIES, PB_SOURCES, PB_VARIANTS, BoundConfig, build_report
from .errors import RspBoundError
from .graph_model import load_graph, validate
from .montecarlo import SimConfig, estimate_expected_shortest

EXIT_OK, EXIT_INVALID, EXIT_USAGE = 0, 1, 2


class _UsageError(Exception):
    pass


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rspbound", description="Bounds on the expected shortest path "
                                "length in a degradation DAG with Weibull transition times.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("graph", help="graph file ('nodes <n>' / 'edge <t> <h> eta=<x> gamma=<y>')")
        sp.add_argument("--format", choices=("json", "table"), default="json", dest="output_format")

    def sampling(sp):
        sp.add_argument("--seed", type=int, default=1)
        sp.add_argument("--samples", type=int, default=100_000)
        sp.add_argument("--workers", type=int, default=1)
        sp.add_argument("--chunk-size", type=int, default=4096)

    common(sub.add_parser("validate", help="structural and parameter diagnostics"))
    sim = sub.add_parser("simulate", help="Monte Carlo estimate of the expected shortest path")
    common(sim)
    sampling(sim)
    for name, text in (("bounds", "lower/upper bounds without the E[z] simulation"),
                       ("report", "bounds plus Monte Carlo cross-checks")):
        sp = sub.add_parser(name, help=text)
        common(sp)
        sampling(sp)
        sp.add_argument("--beta", type=float, default=1.0)
        sp.add_argument("--family", choices=FAMILIES, default="deterministic-optimal")
        sp.add_argument("--k", type=int, default=1, help="number of cheapest paths for --family k-cheapest-paths")
        sp.add_argument("--pb-variant", choices=PB_VARIANTS, default="rederived-power")
        sp.add_argument("--pb-source", choices=PB_SOURCES, default="formula-mc")
        sp.add_argument("--dfm-set-size", type=int, default=None, help="default: number of nodes")
        sp.add_argument("--no-clamp", action="store_true", help="use raw (possibly negative) closed-form p_B")
    return p


def _check_flags(args) -> None:
    if getattr(args, "beta", 1.0) < 1:
        raise _UsageError("beta must be ≥ 1")
    for name in ("samples", "workers", "chunk_size", "k"):
        if getattr(args, name, 1) < 1:
            raise _UsageError(f"{name.replace('_', '-')} must be ≥ 1")
    if getattr(args, "seed", 0) < 0:
        raise _UsageError("seed must be ≥ 0")
    if getattr(args, "dfm_set_size", None) is not None and args.dfm_set_size < 1:
        raise _UsageError("dfm-set-size must be ≥ 1")


def _report_rows(d: dict) -> list[tuple[str, object]]:
    rows = []
    for key in ("zeta", "dfm_bound", "dfm_set_size", "expectation_lower_bound"):
        rows.append((key, d[key]))
    for src, v in d["lower_bound_by_source"].items():
        rows.append((f"lower_bound[{src}]", v))
    for key in ("lower_bound_status", "beta_condition_holds", "mc_mean", "mc_stderr", "mc_samples"):
        rows.append((key, d[key]))
    if d["mc_ci95"]:
        rows.append(("mc_ci95", "[" + ", ".join(serialize.format_float(v) for v in d["mc_ci95"]) + "]"))
    if d["witness_x"] is not None:
        rows.append(("witness_x", " ".join(serialize.format_float(v) for v in d["witness_x"])))
    rows.append(("family", "; ".join(" ".join(str(j) for j in b) for b in d["family"])))
    for r, b in enumerate(d["per_basis"], start=1):
        for key, v in b.items():
            if isinstance(v, list):
                v = " ".join(str(x) for x in v)
            rows.append((f"basis[{r}].{key}", v))
    for key, v in d["config"].items():
        rows.append((f"config.{key}", v))
    return rows


def run(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        _check_flags(args)
    except _UsageError as exc:
        err.write(f"rspbound: error: {exc}\n")
        return EXIT_USAGE
    try:
        g = load_graph(args.graph)
    except OSError as exc:
        err.write(f"rspbound: cannot read {args.graph}: {exc.strerror or exc}\n")
        return EXIT_INVALID
    except RspBoundError as exc:
        err.write(f"rspbound: {args.graph}: {exc}\n")
        return EXIT_INVALID

    diag = validate(g)
    if args.command == "validate":
        if args.output_format == "json":
            out.write(serialize.dumps({"valid": diag.passed, "checks": diag.checks, "info": diag.info,
                                       "messages": diag.messages}))
        else:
            out.write("\n".join(diag.lines()) + "\n")
        return EXIT_OK if diag.passed else EXIT_INVALID
    if not diag.passed:
        err.write("rspbound: invalid graph:\n" + "\n".join(diag.lines()) + "\n")
        return EXIT_INVALID

    try:
        if args.command == "simulate":
            res = estimate_expected_shortest(g, SimConfig(args.samples, args.seed, args.chunk_size, args.workers))
            d = {"mean": res.mean, "stderr": res.stderr, "ci95": list(res.ci95), "samples": res.samples,
                 "seed": res.seed, "chunk_size": args.chunk_size}
            out.write(serialize.dumps(d) if args.output_format == "json" else serialize.table(
                [(k, " ".join(serialize.format_float(x) for x in v) if isinstance(v, list) else v)
                 for k, v in d.items()]))
            return EXIT_OK
        cfg = BoundConfig(beta=args.beta, family=args.family, k=args.k, pb_variant=args.pb_variant,
                          pb_source=args.pb_source, mc_samples=args.samples, seed=args.seed,
                          clamp_negative_pb=not args.no_clamp, dfm_set_size=args.dfm_set_size,
                          chunk_size=args.chunk_size, workers=args.workers)
        report = build_report(g, cfg, include_mc=args.command == "report").to_dict()
    except RspBoundError as exc:
        err.write(f"rspbound: {exc}\n")
        return EXIT_INVALID
    out.write(serialize.dumps(report) if args.output_format == "json" else serialize.table(_report_rows(report)))
    return EXIT_OK


def main() -> None:
    sys.exit(run())
