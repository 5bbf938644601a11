"""Structured evaluation of local-normal-form sentences.

A basic local sentence holds iff the satisfying set of its inner
formula contains s vertices pairwise further than 2r apart. That splits
the check into two independent steps:

* ``eval_local``: the satisfying set. By locality, omega holds at v in
  G iff it holds at v inside the induced radius-r ball around v; each
  ball is checked directly, optionally after shrinking it to a
  rank-preserving kernel (the center is marked with a fresh label so
  the per-vertex question becomes a closed sentence the surgery keeps
  intact).

* ``max_scattered``: how many of those vertices can be chosen pairwise
  at distance greater than 2r. Any path of length at most 2r between
  two set members stays inside the union of their radius-r balls, so
  the conflict relation is computed in that induced neighborhood:
  components are independent, a single long-diameter component settles
  the whole question (walking a geodesic of length over 12rs collects s
  witnesses spaced 6r apart, each within r of the set), a greedy
  packing certifies large answers early, and an exact branch-and-bound
  (capped at s) settles the rest.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass

from . import fo
from .fo import naive_check, qrank
from .gnf import GnfSentence, eval_expr, gnf_to_fo
from .graphs import as_labeled, ball, base_graph, bfs_ball_members, connected_components
from .kernel import KernelConfig, replace_protrusions
from .qtypes import TypeContext


def eval_local(g, omega, r: int, use_kernel: bool = True,
               cfg: KernelConfig | None = None) -> frozenset:
    """Vertices whose radius-r ball satisfies omega (free variable x) at
    the center. With ``use_kernel`` each ball is first replaced by its
    rank-preserving kernel; pass ``cfg`` to share one type context (and
    its representative cache) across calls."""
    lg = as_labeled(g)
    if fo.free_vars(omega) != frozenset({"x"}):
        raise ValueError("omega must have exactly the free variable x")
    if r < 0:
        raise ValueError("radius must be nonnegative")
    marker = lg.num_labels + 1
    sentence = fo.Exists("x", fo.And(fo.Label(marker, "x"), omega))
    needed = qrank(sentence)
    if use_kernel:
        if cfg is None:
            cfg = KernelConfig(q=needed)
        elif cfg.q < needed:
            raise ValueError(f"kernel rank {cfg.q} below the sentence rank {needed}")
    out = []
    for v in lg.vertices:
        b = ball(lg, v, r)
        if use_kernel:
            center = b.local_index(v)
            marked = b.induced.with_extra_label({center})
            kernel, _ = replace_protrusions(marked, cfg, protected=frozenset({center}))
            if naive_check(kernel, sentence):
                out.append(v)
        else:
            if naive_check(b.induced, omega, {"x": b.local_index(v)}):
                out.append(v)
    return frozenset(out)


@dataclass(frozen=True)
class ScatterReport:
    """min(s, best scattered-set size) plus how it was settled."""

    value: int
    components: int          # components of the radius-r neighborhood of the set
    shortcut_fired: bool     # one component's certified diameter exceeded 12rs
    greedy_certified: bool   # a greedy packing alone reached s


def _bfs_depths(base, start: int, universe: set) -> dict:
    depth = {start: 0}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for u in base.neighbors(v):
            if u in universe and u not in depth:
                depth[u] = depth[v] + 1
                queue.append(u)
    return depth


def _certified_diameter(base, comp: list) -> int:
    """Lower bound on the component's diameter: a double BFS sweep
    yields the exact distance between two concrete vertices."""
    cs = set(comp)
    d1 = _bfs_depths(base, comp[0], cs)
    far = max(d1, key=lambda v: (d1[v], v))
    d2 = _bfs_depths(base, far, cs)
    return max(d2.values())


def _mis_at_least(verts: list, conflict: dict, cap: int) -> int:
    """Maximum independent-set size in the conflict graph, capped."""
    best = 0

    def grow(cands: list, cur: int):
        nonlocal best
        if cur > best:
            best = cur
        if best >= cap or cur + len(cands) <= best:
            return
        v = cands[0]
        grow([u for u in cands[1:] if u not in conflict[v]], cur + 1)
        if best < cap:
            grow(cands[1:], cur)

    grow(verts, 0)
    return min(best, cap)


def max_scattered(g, w, r: int, s: int, use_shortcut: bool = True) -> ScatterReport:
    """min(s, size of the largest subset of w pairwise at distance
    greater than 2r in g). ``use_shortcut=False`` disables the
    long-diameter certificate so tests can cross-check it against the
    exact search."""
    if s < 1:
        raise ValueError("s must be at least 1")
    if r < 0:
        raise ValueError("radius must be nonnegative")
    base = base_graph(g)
    wset = sorted(set(w))
    for v in wset:
        if not (1 <= v <= base.n):
            raise ValueError(f"vertex {v} outside 1..{base.n}")
    if r == 0:
        ncomp = len(connected_components(base, universe=wset))
        return ScatterReport(value=min(s, len(wset)), components=ncomp,
                             shortcut_fired=False, greedy_certified=len(wset) >= s)
    # induced neighborhood: union of radius-r balls, by multi-source BFS
    depth = dict.fromkeys(wset, 0)
    queue = deque(wset)
    while queue:
        v = queue.popleft()
        if depth[v] == r:
            continue
        for u in base.neighbors(v):
            if u not in depth:
                depth[u] = depth[v] + 1
                queue.append(u)
    hood = set(depth)
    wall = set(wset)
    comps = connected_components(base, universe=hood)
    ncomp = len(comps)
    total = 0
    for comp in comps:
        cs = set(comp)
        wc = sorted(cs & wall)
        if not wc:
            continue
        # a geodesic longer than 12rs yields s set members spaced more
        # than 2r apart (pick path vertices 6r apart; each is within r
        # of the set, and shrinking both ends by r keeps distance > 2r)
        if use_shortcut and _certified_diameter(base, comp) > 12 * r * s:
            return ScatterReport(value=s, components=ncomp,
                                 shortcut_fired=True, greedy_certified=False)
        if len(wc) == 1:
            total += 1
            if total >= s:
                return ScatterReport(value=s, components=ncomp,
                                     shortcut_fired=False, greedy_certified=False)
            continue
        wcs = set(wc)
        conflict = {}
        for v in wc:
            near = bfs_ball_members(base, v, 2 * r, universe=cs)
            conflict[v] = {u for u in near if u in wcs and u != v}
        picked = 0
        excluded = set()
        for v in wc:
            if v not in excluded:
                picked += 1
                excluded.add(v)
                excluded |= conflict[v]
        if total + picked >= s:
            return ScatterReport(value=s, components=ncomp,
                                 shortcut_fired=False, greedy_certified=True)
        total += _mis_at_least(wc, conflict, s - total)
        if total >= s:
            return ScatterReport(value=s, components=ncomp,
                                 shortcut_fired=False, greedy_certified=False)
    return ScatterReport(value=total, components=ncomp,
                         shortcut_fired=False, greedy_certified=False)


@dataclass(frozen=True)
class LocalOutcome:
    """Per-leaf record: satisfying-set size, neighborhood components,
    the scattered count, which certificates fired, and wall time."""

    name: str
    satisfying: int
    components: int
    scattered: int
    holds: bool
    shortcut_fired: bool
    greedy_certified: bool
    seconds: float


@dataclass(frozen=True)
class GnfResult:
    holds: bool
    outcomes: tuple


def check_gnf(g, sentence: GnfSentence, use_kernel: bool = True,
              ctx: TypeContext | None = None) -> GnfResult:
    """Evaluate a local-normal-form sentence: per basic local sentence,
    compute the satisfying set, then how scattered it is; combine the
    answers through the boolean shape. Pass ``ctx`` to share one type
    context (and its representative caches) across many calls."""
    lg = as_labeled(g)
    if ctx is None:
        ctx = TypeContext()
    values = {}
    outcomes = []
    for b in sentence.locals:
        t0 = time.perf_counter()
        needed = qrank(b.omega) + 1
        cfg = KernelConfig(q=needed, ctx=ctx)
        sat = eval_local(lg, b.omega, b.r, use_kernel=use_kernel, cfg=cfg)
        rep = max_scattered(lg, sat, b.r, b.s)
        holds = rep.value >= b.s
        values[b.name] = holds
        outcomes.append(LocalOutcome(
            name=b.name, satisfying=len(sat), components=rep.components,
            scattered=rep.value, holds=holds, shortcut_fired=rep.shortcut_fired,
            greedy_certified=rep.greedy_certified,
            seconds=time.perf_counter() - t0))
    return GnfResult(holds=eval_expr(sentence.expr, values), outcomes=tuple(outcomes))


def check_gnf_oracle(g, sentence: GnfSentence) -> bool:
    """Independent slow path: expand to one closed formula and hand it
    to the naive evaluator."""
    return naive_check(as_labeled(g), gnf_to_fo(sentence))
