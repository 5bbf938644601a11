"""Experiment harness: run a grid of (model, n, seed) measurements into
a CSV report and render deterministic SVG plots from it.

The report file is append-only and resumable: rows already present
(keyed by model description, n, seed) are never recomputed, so rerunning
a completed plan leaves the file byte-identical. Every row carries the
full model description and seed, so any row can be regenerated in
isolation. Wall-time columns are measurements and naturally vary run to
run; every other column is deterministic. Plots read the CSV (never the
reverse) and render with fixed formatting so identical reports give
identical SVG bytes.
"""

from __future__ import annotations

import csv
import io
import math
import os
import sys
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

from . import decomp, gnf, localcheck, models
from .graphs import triangle_count
from .kernel import KernelConfig, replace_protrusions

MEASURES = ("degree", "triangles", "minb", "skeleton", "kernel", "mc-oracle")

# Verdict leaf used by the mc-oracle measure: two scattered isolated
# vertices. Cheap to evaluate, and it separates the thin models (which
# keep isolated vertices) from preferential attachment (connected).
MC_SENTENCE_TEXT = ('bls iso r 1 s 2 omega "forall y. (distgt 1 (x, y) | x = y)"\n'
                    'sentence iso\n')

# Naive cross-evaluation is cubic in n for this sentence; beyond this
# order the verdict column is still filled but the agreement check is
# left blank.
ORACLE_N_CAP = 120

SCHEMA_VERSION = 1

COLUMNS = (
    "model", "n", "seed", "vertices", "edges",
    "max_degree", "degree_avg2", "dhat", "degree_hist",
    "triangles",
    "b_min", "minb_seconds",
    "z_size", "p_size", "parts", "small_boundaries", "max_part",
    "skeleton_seconds",
    "kernel_vertices", "kernel_edges", "kernel_tree_folds",
    "kernel_parts_replaced", "kernel_fallbacks", "kernel_skipped",
    "kernel_seconds",
    "verdict", "oracle_agrees", "mc_seconds",
)

HEADER_COMMENTS = (
    f"sparsemc experiment report schema={SCHEMA_VERSION}",
    "one row per (model, n, seed); columns for measures not in the plan stay empty",
    "kernel input sizes are the vertices/edges columns; oracle_agrees is blank "
    f"for n > {ORACLE_N_CAP}",
)


@dataclass(frozen=True)
class ExperimentPlan:
    """A measurement grid: every model crossed with every order n and
    seeds 0..seeds-1, with shared decomposition/kernel parameters."""

    models: tuple
    ns: tuple
    seeds: int
    r: int = 1
    mu: int = 5
    q: int = 2
    measures: frozenset = frozenset(MEASURES)

    def __post_init__(self):
        if not self.models:
            raise ValueError("plan needs at least one model")
        if not self.ns:
            raise ValueError("plan needs at least one n")
        if any(n < 1 for n in self.ns):
            raise ValueError("orders must be positive")
        if self.seeds < 1:
            raise ValueError("seed count must be at least 1")
        if self.r < 1 or self.mu < 1:
            raise ValueError("r and mu must be at least 1")
        if self.q < 0:
            raise ValueError("q must be nonnegative")
        bad = set(self.measures) - set(MEASURES)
        if bad:
            raise ValueError(f"unknown measures {sorted(bad)}; "
                             f"available: {', '.join(MEASURES)}")
        if not self.measures:
            raise ValueError("plan needs at least one measure")
        for spec in self.models:
            spec.validate()

    def tasks(self) -> list:
        """Grid points in the fixed execution (and report) order."""
        return [(spec.describe(), n, seed)
                for spec in self.models for n in self.ns
                for seed in range(self.seeds)]


def parse_plan(text: str) -> ExperimentPlan:
    """Plan files are key=value lines: repeated ``model=`` entries (same
    syntax as ModelSpec descriptions), ``n=`` comma list, ``seeds=``,
    optional ``r= mu= q=`` and ``measures=`` comma list. ``#`` comments
    and blank lines are ignored."""
    model_list = []
    kv = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"plan line {line_no}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key == "model":
            model_list.append(models.parse_model_desc(value))
        elif key in ("n", "seeds", "r", "mu", "q", "measures"):
            if key in kv:
                raise ValueError(f"plan line {line_no}: duplicate key {key!r}")
            kv[key] = value
        else:
            raise ValueError(f"plan line {line_no}: unknown key {key!r}")
    if "n" not in kv:
        raise ValueError("plan is missing the n= grid")
    ns = tuple(int(part) for part in kv["n"].split(","))
    measures = (frozenset(p.strip() for p in kv["measures"].split(","))
                if "measures" in kv else frozenset(MEASURES))
    return ExperimentPlan(
        models=tuple(model_list), ns=ns,
        seeds=int(kv.get("seeds", "1")),
        r=int(kv.get("r", "1")), mu=int(kv.get("mu", "5")),
        q=int(kv.get("q", "2")), measures=measures)


def format_plan(plan: ExperimentPlan) -> str:
    lines = [f"model={spec.describe()}" for spec in plan.models]
    lines.append("n=" + ",".join(str(n) for n in plan.ns))
    lines.append(f"seeds={plan.seeds}")
    lines.append(f"r={plan.r}")
    lines.append(f"mu={plan.mu}")
    lines.append(f"q={plan.q}")
    lines.append("measures=" + ",".join(m for m in MEASURES if m in plan.measures))
    return "\n".join(lines) + "\n"


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".6g")
    return str(value)


def measure_row(desc: str, n: int, seed: int, r: int, mu: int, q: int,
                measures: frozenset) -> dict:
    """Compute one report row. Pure function of its arguments apart from
    the *_seconds columns."""
    spec = replace(models.parse_model_desc(desc), seed=seed)
    g = models.generate(spec, n)
    row = {c: "" for c in COLUMNS}
    row.update(model=desc, n=str(n), seed=str(seed),
               vertices=str(g.n), edges=str(g.m))
    if "degree" in measures:
        degs = [g.degree(v) for v in g.vertices]
        total = sum(degs)
        row["max_degree"] = str(max(degs, default=0))
        row["degree_avg2"] = _fmt(sum(d * d for d in degs) / total if total else 0.0)
        if spec.alpha is not None:
            row["dhat"] = _fmt(decomp.d_hat(spec.alpha, n))
        hist = Counter(degs)
        row["degree_hist"] = ";".join(f"{d}:{hist[d]}" for d in sorted(hist))
    if "triangles" in measures:
        row["triangles"] = str(triangle_count(g))
    if "minb" in measures:
        t0 = time.perf_counter()
        row["b_min"] = str(decomp.minimal_b(g, r, mu))
        row["minb_seconds"] = _fmt(time.perf_counter() - t0)
    if "skeleton" in measures:
        t0 = time.perf_counter()
        sk = decomp.protrusion_skeleton(g, r, mu)
        row["z_size"] = str(len(sk.z))
        row["p_size"] = str(len(sk.p))
        row["parts"] = str(len(sk.components))
        row["small_boundaries"] = str(len(sk.small_boundaries))
        row["max_part"] = str(max((len(c) for c in sk.components), default=0))
        row["skeleton_seconds"] = _fmt(time.perf_counter() - t0)
    if "kernel" in measures:
        t0 = time.perf_counter()
        kern, rep = replace_protrusions(g, KernelConfig(q=q, r=r, mu=mu))
        row["kernel_vertices"] = str(rep.vertices_after)
        row["kernel_edges"] = str(rep.edges_after)
        row["kernel_tree_folds"] = str(rep.tree_folds)
        row["kernel_parts_replaced"] = str(rep.parts_replaced)
        row["kernel_fallbacks"] = str(rep.fallbacks)
        row["kernel_skipped"] = str(rep.skipped_parts)
        row["kernel_seconds"] = _fmt(time.perf_counter() - t0)
    if "mc-oracle" in measures:
        t0 = time.perf_counter()
        sentence = gnf.parse_gnf(MC_SENTENCE_TEXT)
        got = localcheck.check_gnf(g, sentence).holds
        row["verdict"] = "SAT" if got else "UNSAT"
        if n <= ORACLE_N_CAP:
            want = localcheck.check_gnf_oracle(g, sentence)
            row["oracle_agrees"] = "yes" if got == want else "NO"
        row["mc_seconds"] = _fmt(time.perf_counter() - t0)
    return row


def _row_line(row: dict) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerow([row[c] for c in COLUMNS])
    return buf.getvalue()


def _read_done_keys(path) -> set:
    done = set()
    if not os.path.exists(path):
        return done
    for row in read_report(path):
        try:
            done.add((row["model"], int(row["n"]), int(row["seed"])))
        except (KeyError, ValueError):
            continue
    return done


def read_report(path) -> list:
    """Rows of a report file as dicts keyed by column name; comment
    lines are skipped and short rows ignored."""
    rows = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        data = [line for line in fh if line.strip() and not line.startswith("#")]
    reader = csv.reader(data)
    header = next(reader, None)
    if header is None:
        return rows
    for parts in reader:
        if len(parts) != len(header):
            continue
        rows.append(dict(zip(header, parts)))
    return rows


@dataclass
class RunSummary:
    path: str
    written: int = 0
    skipped: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def _call_measure(args) -> dict:
    return measure_row(*args)


def run_experiment(plan: ExperimentPlan, out_path, workers: int | None = None,
                   log=None) -> RunSummary:
    """Execute the plan grid, appending one CSV row per (model, n, seed)
    in grid order. Rows already in the file are skipped; a failing row
    is reported and withheld, never corrupting the file."""
    log = log if log is not None else sys.stderr
    workers = workers if workers else (os.cpu_count() or 1)
    done = _read_done_keys(out_path)
    tasks = plan.tasks()
    todo = [t for t in tasks if t not in done]
    summary = RunSummary(path=str(out_path), skipped=len(tasks) - len(todo))
    fresh = not os.path.exists(out_path)
    with open(out_path, "a", encoding="utf-8", newline="") as fh:
        if fresh:
            for comment in HEADER_COMMENTS:
                fh.write(f"# {comment}\n")
            fh.write(_row_line(dict(zip(COLUMNS, COLUMNS))))
            fh.flush()
        elif todo:
            with open(out_path, "rb") as check:
                check.seek(0, os.SEEK_END)
                if check.tell() > 0:
                    check.seek(-1, os.SEEK_END)
                    if check.read(1) != b"\n":
                        fh.write("\n")
        args = [(desc, n, seed, plan.r, plan.mu, plan.q, plan.measures)
                for desc, n, seed in todo]
        pool = (ProcessPoolExecutor(max_workers=workers)
                if workers > 1 and len(todo) > 1 else None)
        try:
            items = [pool.submit(_call_measure, a) for a in args] if pool else args
            for task, item in zip(todo, items):
                try:
                    row = item.result() if pool else _call_measure(item)
                except Exception as e:
                    summary.failures.append((task, repr(e)))
                    print(f"row {task} failed: {e!r}", file=log)
                    continue
                fh.write(_row_line(row))
                fh.flush()
                summary.written += 1
        finally:
            if pool:
                pool.shutdown()
    return summary


# --- plotting ---

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
_W, _H = 640, 440
_ML, _MR, _MT, _MB = 70, 20, 40, 50  # margins


def _fnum(x: float) -> str:
    return format(x, ".2f").rstrip("0").rstrip(".")


def _tick_label(x: float) -> str:
    return format(x, ".4g")


def _log_ticks(lo: float, hi: float) -> list:
    out = []
    e = math.floor(math.log10(lo)) if lo > 0 else 0
    while 10 ** e <= hi * 1.0001:
        if 10 ** e >= lo * 0.9999:
            out.append(10.0 ** e)
        e += 1
    return out or [lo, hi]


def _lin_ticks(lo: float, hi: float) -> list:
    if hi <= lo:
        return [lo]
    span = hi - lo
    step = 10 ** math.floor(math.log10(span / 4)) if span > 0 else 1
    for mult in (1, 2, 5, 10):
        if span / (step * mult) <= 5:
            step *= mult
            break
    first = math.ceil(lo / step) * step
    out = []
    t = first
    while t <= hi * 1.0001:
        out.append(t)
        t += step
    return out or [lo, hi]


class _Axes:
    """Fixed-size plot frame mapping data coordinates to pixels."""

    def __init__(self, xlim, ylim, xlog=False, ylog=False):
        self.xlim, self.ylim, self.xlog, self.ylog = xlim, ylim, xlog, ylog

    def _map(self, v, lim, log, lo_px, hi_px):
        lo, hi = lim
        if log:
            v, lo, hi = math.log10(v), math.log10(lo), math.log10(hi)
        frac = 0.5 if hi == lo else (v - lo) / (hi - lo)
        return lo_px + frac * (hi_px - lo_px)

    def x(self, v) -> float:
        return self._map(v, self.xlim, self.xlog, _ML, _W - _MR)

    def y(self, v) -> float:
        return self._map(v, self.ylim, self.ylog, _H - _MB, _MT)


def _svg_frame(title: str, xlabel: str, ylabel: str, axes: _Axes, body: list) -> str:
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W // 2}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="15">{title}</text>',
    ]
    x0, x1 = _ML, _W - _MR
    y0, y1 = _H - _MB, _MT
    parts.append(f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>')
    parts.append(f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>')
    xticks = (_log_ticks if axes.xlog else _lin_ticks)(*axes.xlim)
    yticks = (_log_ticks if axes.ylog else _lin_ticks)(*axes.ylim)
    for t in xticks:
        px = axes.x(t)
        parts.append(f'<line x1="{_fnum(px)}" y1="{y0}" x2="{_fnum(px)}" '
                     f'y2="{y0 + 5}" stroke="black"/>')
        parts.append(f'<text x="{_fnum(px)}" y="{y0 + 20}" text-anchor="middle" '
                     f'font-family="sans-serif" font-size="11">{_tick_label(t)}</text>')
    for t in yticks:
        py = axes.y(t)
        parts.append(f'<line x1="{x0 - 5}" y1="{_fnum(py)}" x2="{x0}" '
                     f'y2="{_fnum(py)}" stroke="black"/>')
        parts.append(f'<text x="{x0 - 8}" y="{_fnum(py + 4)}" text-anchor="end" '
                     f'font-family="sans-serif" font-size="11">{_tick_label(t)}</text>')
    parts.append(f'<text x="{(x0 + x1) // 2}" y="{_H - 12}" text-anchor="middle" '
                 f'font-family="sans-serif" font-size="12">{xlabel}</text>')
    parts.append(f'<text x="18" y="{(y0 + y1) // 2}" text-anchor="middle" '
                 f'font-family="sans-serif" font-size="12" '
                 f'transform="rotate(-90 18 {(y0 + y1) // 2})">{ylabel}</text>')
    parts.extend(body)
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _svg_empty(title: str, note: str) -> str:
    return "\n".join([
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W // 2}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="15">{title}</text>',
        f'<text x="{_W // 2}" y="{_H // 2}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13" fill="#666">{note}</text>',
        "</svg>",
    ]) + "\n"


def _series_order(rows: list) -> list:
    seen = []
    for row in rows:
        if row["model"] not in seen:
            seen.append(row["model"])
    return seen


def _median(values: list) -> float:
    vs = sorted(values)
    k = len(vs)
    return vs[k // 2] if k % 2 else (vs[k // 2 - 1] + vs[k // 2]) / 2


def _legend(names: list) -> list:
    out = []
    for i, name in enumerate(names):
        color = _PALETTE[i % len(_PALETTE)]
        ly = _MT + 14 + 16 * i
        out.append(f'<rect x="{_W - _MR - 160}" y="{ly - 9}" width="10" height="10" '
                   f'fill="{color}"/>')
        out.append(f'<text x="{_W - _MR - 146}" y="{ly}" font-family="sans-serif" '
                   f'font-size="11">{name}</text>')
    return out


def _median_curve_plot(rows: list, column: str, title: str, ylabel: str) -> str:
    usable = [r for r in rows if r.get(column, "") != ""]
    if not usable:
        return _svg_empty(title, "no data rows with this measure")
    names = _series_order(usable)
    series = {}
    for name in names:
        by_n: dict[int, list] = {}
        for r in usable:
            if r["model"] == name:
                by_n.setdefault(int(r["n"]), []).append(float(r[column]))
        series[name] = sorted((n, _median(vals)) for n, vals in by_n.items())
    xs = [n for pts in series.values() for n, _ in pts]
    ys = [y for pts in series.values() for _, y in pts]
    xlog = min(xs) > 0 and max(xs) / max(min(xs), 1) >= 50
    ymax = max(ys + [1.0])
    axes = _Axes((min(xs), max(xs)) if min(xs) < max(xs) else (min(xs) * 0.5, max(xs) * 2 or 1),
                 (0.0, ymax * 1.05), xlog=xlog)
    body = []
    for i, name in enumerate(names):
        color = _PALETTE[i % len(_PALETTE)]
        pts = [(axes.x(n), axes.y(v)) for n, v in series[name]]
        if len(pts) > 1:
            path = " ".join(f"{_fnum(px)},{_fnum(py)}" for px, py in pts)
            body.append(f'<polyline points="{path}" fill="none" stroke="{color}" '
                        f'stroke-width="1.5"/>')
        for px, py in pts:
            body.append(f'<circle cx="{_fnum(px)}" cy="{_fnum(py)}" r="3" '
                        f'fill="{color}"/>')
    body.extend(_legend(names))
    return _svg_frame(title, "n", ylabel, axes, body)


def _ccdf_plot(rows: list, title: str) -> str:
    usable = [r for r in rows if r.get("degree_hist", "") != ""]
    if not usable:
        return _svg_empty(title, "no data rows with the degree measure")
    names = _series_order(usable)
    series = {}
    for name in names:
        biggest = max(int(r["n"]) for r in usable if r["model"] == name)
        hist: Counter = Counter()
        for r in usable:
            if r["model"] == name and int(r["n"]) == biggest:
                for item in r["degree_hist"].split(";"):
                    d, _, cnt = item.partition(":")
                    hist[int(d)] += int(cnt)
        total = sum(hist.values())
        pts = []
        above = total
        for d in sorted(hist):
            if d >= 1:
                pts.append((d, above / total))
            above -= hist[d]
        series[name] = (biggest, pts)
    allpts = [p for _, pts in series.values() for p in pts]
    if not allpts:
        return _svg_empty(title, "all degrees are zero")
    xs = [d for d, _ in allpts]
    ys = [f for _, f in allpts if f > 0]
    axes = _Axes((max(min(xs), 1), max(max(xs), 2)),
                 (max(min(ys), 1e-9), 1.0), xlog=True, ylog=True)
    body = []
    for i, name in enumerate(names):
        color = _PALETTE[i % len(_PALETTE)]
        _, pts = series[name]
        path = " ".join(f"{_fnum(axes.x(d))},{_fnum(axes.y(f))}"
                        for d, f in pts if f > 0)
        if path:
            body.append(f'<polyline points="{path}" fill="none" stroke="{color}" '
                        f'stroke-width="1.5"/>')
    body.extend(_legend([f"{n} (n={series[n][0]})" for n in names]))
    return _svg_frame(title, "degree", "fraction of vertices with at least this degree",
                      axes, body)


def emit_plots(rows: list, out_dir) -> list:
    """Write the four report plots as deterministic static SVG files and
    return their paths."""
    os.makedirs(out_dir, exist_ok=True)
    files = (
        ("degree_ccdf.svg", _ccdf_plot(rows, "degree CCDF (log-log)")),
        ("minb_vs_n.svg", _median_curve_plot(
            rows, "b_min", "minimal feasible budget vs n", "median b_min")),
        ("kernel_vs_n.svg", _median_curve_plot(
            rows, "kernel_vertices", "kernel size vs n", "median kernel vertices")),
        ("triangles_vs_n.svg", _median_curve_plot(
            rows, "triangles", "triangle count vs n", "median triangles")),
    )
    paths = []
    for fname, svg in files:
        path = os.path.join(out_dir, fname)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(svg)
        paths.append(path)
    return paths
