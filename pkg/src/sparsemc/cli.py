"""Command-line surface.

Subcommands: generate, stats, decompose, minb, kernelize, check-naive,
check-gnf, experiment, selftest. Exit codes: 0 = success (including a
SAT verdict), 1 = an UNSAT verdict (an answer, not an error), 2 = usage
or input-format error, 3 = internal invariant violation or failing
suite/row.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
import time
from collections import Counter
from dataclasses import replace

from . import decomp, fo, gnf, harness, localcheck, models, selftest
from .graphio import GraphFormatError, format_graph, read_graph, write_graph
from .graphs import as_labeled, triangle_count
from .kernel import KernelConfig, replace_protrusions

EXIT_OK = 0
EXIT_UNSAT = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3


def _one_record_csv(columns, values, out) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(columns)
    writer.writerow(values)


def _read_formula_file(path) -> fo.Formula:
    with open(path, "r", encoding="utf-8") as fh:
        text = "\n".join(line for line in fh
                         if not line.lstrip().startswith("#"))
    return fo.parse_formula(text, expected_free=frozenset())


def _cmd_generate(args) -> int:
    spec = replace(models.parse_model_desc(args.model), seed=args.seed)
    g = models.generate(spec, args.n)
    comments = (f"model={spec.describe()}", f"seed={spec.seed}", f"n={args.n}")
    if args.output:
        write_graph(args.output, as_labeled(g), comments=comments)
    else:
        sys.stdout.write(format_graph(as_labeled(g), comments=comments))
    return EXIT_OK


def _cmd_stats(args) -> int:
    g = read_graph(args.graph)
    degs = [g.degree(v) for v in g.vertices]
    total = sum(degs)
    hist = Counter(degs)
    print(f"vertices={g.n}")
    print(f"edges={g.m}")
    print(f"labels={g.num_labels}")
    print(f"max_degree={max(degs, default=0)}")
    avg2 = sum(d * d for d in degs) / total if total else 0.0
    print(f"degree_avg2={avg2:.6g}")
    print(f"triangles={triangle_count(g)}")
    print("degree_hist=" + ";".join(f"{d}:{hist[d]}" for d in sorted(hist)))
    return EXIT_OK


def _cmd_decompose(args) -> int:
    g = read_graph(args.graph)
    t0 = time.perf_counter()
    b_min = decomp.minimal_b(g, args.r, args.mu)
    sk = decomp.protrusion_skeleton(g, args.r, args.mu)
    seconds = time.perf_counter() - t0
    _one_record_csv(
        ("n", "m", "r", "mu", "b_min", "z_size", "p_size",
         "small_boundaries", "max_part", "seconds"),
        (g.n, g.m, args.r, args.mu, b_min, len(sk.z), len(sk.p),
         len(sk.small_boundaries),
         max((len(c) for c in sk.components), default=0),
         format(seconds, ".6g")),
        sys.stdout)
    return EXIT_OK


def _cmd_kernelize(args) -> int:
    g = read_graph(args.graph)
    cfg = KernelConfig(q=args.q, r=args.r, mu=args.mu,
                       rep_cap=args.rep_cap, tree_chunk=args.tree_chunk)
    t0 = time.perf_counter()
    kern, rep = replace_protrusions(g, cfg)
    seconds = time.perf_counter() - t0
    comments = (f"kernel q={args.q} r={args.r} mu={args.mu}",)
    report_stream = sys.stdout
    if args.output:
        write_graph(args.output, kern, comments=comments)
    else:
        sys.stdout.write(format_graph(kern, comments=comments))
        report_stream = sys.stderr
    _one_record_csv(
        ("vertices_before", "edges_before", "vertices_after", "edges_after",
         "tree_folds", "parts_replaced", "stable_parts", "fallbacks",
         "skipped_parts", "seconds"),
        (rep.vertices_before, rep.edges_before, rep.vertices_after,
         rep.edges_after, rep.tree_folds, rep.parts_replaced,
         rep.stable_parts, rep.fallbacks, rep.skipped_parts,
         format(seconds, ".6g")),
        report_stream)
    return EXIT_OK


def _cmd_check_naive(args) -> int:
    g = read_graph(args.graph)
    phi = _read_formula_file(args.sentence)
    holds = fo.naive_check(g, phi)
    print("SAT" if holds else "UNSAT")
    return EXIT_OK if holds else EXIT_UNSAT


def _cmd_check_gnf(args) -> int:
    g = read_graph(args.graph)
    with open(args.sentence, "r", encoding="utf-8") as fh:
        sentence = gnf.parse_gnf(fh.read())
    result = localcheck.check_gnf(g, sentence, use_kernel=not args.no_kernel)
    print("SAT" if result.holds else "UNSAT")
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(("leaf", "satisfying", "components", "scattered",
                     "holds", "shortcut_fired", "seconds"))
    for o in result.outcomes:
        writer.writerow((o.name, o.satisfying, o.components, o.scattered,
                         "yes" if o.holds else "no",
                         "yes" if o.shortcut_fired else "no",
                         format(o.seconds, ".6g")))
    return EXIT_OK if result.holds else EXIT_UNSAT


def _cmd_experiment(args) -> int:
    with open(args.plan, "r", encoding="utf-8") as fh:
        plan = harness.parse_plan(fh.read())
    out_dir = args.out or "."
    os.makedirs(out_dir, exist_ok=True)
    report_path = os.path.join(out_dir, "report.csv")
    summary = harness.run_experiment(plan, report_path, workers=args.workers)
    rows = harness.read_report(report_path)
    plot_paths = harness.emit_plots(rows, out_dir)
    print(f"report: {report_path} ({summary.written} new rows, "
          f"{summary.skipped} already present, {len(summary.failures)} failed)")
    for p in plot_paths:
        print(f"plot: {p}")
    return EXIT_OK if summary.ok else EXIT_INTERNAL


def _cmd_selftest(args) -> int:
    report = selftest.run_selftest(names=args.suite or None)
    print("\n".join(report.lines()))
    return EXIT_OK if report.ok else EXIT_INTERNAL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparsemc",
        description="First-order model checking on sparse random graphs "
                    "via local kernelization.")
    parser.add_argument("--seed", type=int, default=0,
                        help="random seed for generation (default 0)")
    parser.add_argument("--out", metavar="DIR", default=None,
                        help="output directory for experiment reports/plots")
    parser.add_argument("--workers", type=int, default=None, metavar="K",
                        help="worker processes for the experiment grid "
                             "(default: one per CPU)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="sample a graph from a random model")
    p.add_argument("--model", required=True,
                   help='model description, e.g. "er p=2/n", '
                        '"chung-lu alpha=3 c=1", "config alpha=3 c=1", "pa m=2"')
    p.add_argument("--n", type=int, required=True, help="number of vertices")
    p.add_argument("--output", metavar="FILE", default=None,
                   help="graph file to write (default: stdout)")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("stats", help="basic statistics of a graph file")
    p.add_argument("graph", help="graph file")
    p.set_defaults(func=_cmd_stats)

    for name, help_text in (
            ("decompose", "minimal feasible budget plus skeleton summary"),
            ("minb", "minimal feasible budget plus skeleton summary")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("graph", help="graph file")
        p.add_argument("--r", type=int, default=1, help="locality radius (default 1)")
        p.add_argument("--mu", type=int, default=5, help="robustness (default 5)")
        p.set_defaults(func=_cmd_decompose)

    p = sub.add_parser("kernelize",
                       help="replace protrusions by minimal representatives")
    p.add_argument("graph", help="graph file")
    p.add_argument("--q", type=int, default=2, help="type rank to preserve (default 2)")
    p.add_argument("--r", type=int, default=1, help="locality radius (default 1)")
    p.add_argument("--mu", type=int, default=5, help="boundary bound (default 5)")
    p.add_argument("--rep-cap", type=int, default=6, dest="rep_cap",
                   help="largest representative searched for (default 6)")
    p.add_argument("--tree-chunk", type=int, default=24, dest="tree_chunk",
                   help="pendant-tree batch size (default 24)")
    p.add_argument("--output", metavar="FILE", default=None,
                   help="kernel graph file (default: stdout, report on stderr)")
    p.set_defaults(func=_cmd_kernelize)

    p = sub.add_parser("check-naive",
                       help="evaluate a closed first-order sentence directly")
    p.add_argument("graph", help="graph file")
    p.add_argument("sentence", help="text file with one closed formula")
    p.set_defaults(func=_cmd_check_naive)

    p = sub.add_parser("check-gnf",
                       help="evaluate a local-normal-form sentence via the "
                            "structured pipeline")
    p.add_argument("graph", help="graph file")
    p.add_argument("sentence", help="GNF sentence file")
    p.add_argument("--no-kernel", action="store_true",
                   help="skip per-ball kernelization (slow path)")
    p.set_defaults(func=_cmd_check_gnf)

    p = sub.add_parser("experiment", help="run a measurement plan to CSV + SVG")
    p.add_argument("plan", help="plan file (key=value lines)")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("selftest", help="run the built-in verification suites")
    p.add_argument("--suite", action="append", metavar="NAME",
                   help="run only this suite (repeatable)")
    p.set_defaults(func=_cmd_selftest)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except (GraphFormatError, gnf.GnfFormatError, fo.FormulaError,
            ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except KeyboardInterrupt:
        return EXIT_INTERNAL
    except Exception as e:
        print(f"internal error: {e!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
