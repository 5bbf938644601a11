"""Built-in verification suites over exhaustive small instances.

Each suite cross-checks a production code path against an independent
brute-force oracle on instances small enough to enumerate: degree-one
peeling invariants, rank-2 type equality versus characteristic-sentence
agreement, ball-based partition checks versus all radius-bounded
subsets, scattered-set resolution versus subset brute force, and the
structured model checker versus naive evaluation. ``run_selftest``
returns a pass/fail matrix; the CLI turns any failure into a nonzero
exit. Everything here is deterministic (fixed seeds).
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass

from . import decomp, fo, gnf, localcheck, models
from .decomp import PartitionParams
from .graphs import (Graph, as_labeled, bfs_ball_members, complete_graph,
                     connected_components, cycle_graph, lollipop_graph,
                     path_graph, star_graph)
from .qtypes import TypeContext, compute_qtype
from .smallgraphs import connected_graphs_upto, one_label_graphs_upto


# --- characteristic sentences (the back-and-forth game, written out) ---

def _var(i: int) -> str:
    return f"x{i}"


def _conj(parts: list) -> fo.Formula:
    phi = parts[0]
    for p in parts[1:]:
        phi = fo.And(phi, p)
    return phi


def _disj(parts: list) -> fo.Formula:
    phi = parts[0]
    for p in parts[1:]:
        phi = fo.Or(phi, p)
    return phi


def _atomic_description(lg, u: tuple) -> fo.Formula:
    """Quantifier-free description of the tuple: every label, equality
    and adjacency fact, positive or negated."""
    parts = []
    for i, v in enumerate(u, start=1):
        for c in range(1, lg.num_labels + 1):
            atom = fo.Label(c, _var(i))
            parts.append(atom if lg.has_label(c, v) else fo.Not(atom))
    for i in range(1, len(u) + 1):
        for j in range(i + 1, len(u) + 1):
            a, b = u[i - 1], u[j - 1]
            eq = fo.Eq(_var(i), _var(j))
            parts.append(eq if a == b else fo.Not(eq))
            ed = fo.Edge(_var(i), _var(j))
            parts.append(ed if lg.has_edge(a, b) else fo.Not(ed))
    if not parts:
        parts.append(fo.Eq(_var(1), _var(1)))
    return _conj(parts)


def rank_characteristic(g, u: tuple, q: int) -> fo.Formula:
    """The rank-q characteristic formula of (g, u) with free variables
    x1..x|u|: a structure-with-tuple satisfies it iff its rank-q type
    equals the type of (g, u). Closed when u is empty (then q >= 1 and
    g must be nonempty). Formula size grows with n**q; small inputs only."""
    lg = as_labeled(g)
    u = tuple(u)
    if not u and q == 0:
        raise ValueError("rank 0 with an empty tuple describes nothing")
    if lg.n == 0:
        raise ValueError("empty graph has no characteristic formula")
    if q == 0:
        return _atomic_description(lg, u)
    child_keys = {}
    for v in lg.vertices:
        phi = rank_characteristic(lg, u + (v,), q - 1)
        child_keys.setdefault(fo.print_formula(phi), phi)
    children = [child_keys[k] for k in sorted(child_keys)]
    nxt = _var(len(u) + 1)
    parts = [fo.Exists(nxt, phi) for phi in children]
    parts.append(fo.Forall(nxt, _disj(children)))
    base = _atomic_description(lg, u) if u else None
    body = _conj(parts)
    return fo.And(base, body) if base is not None else body


# --- suites ---

@dataclass(frozen=True)
class SuiteResult:
    name: str
    ok: bool
    detail: str
    seconds: float


def _graph_corpus() -> list:
    corpus = [path_graph(k) for k in range(1, 8)]
    corpus += [cycle_graph(k) for k in range(3, 8)]
    corpus += [star_graph(6), lollipop_graph(4, 4), complete_graph(4)]
    corpus += [models.gen_er(18, 2.0 / 18, seed=s) for s in (1, 2, 3)]
    corpus += [models.gen_pa(18, 2, seed=1), models.gen_chung_lu(18, 3.0, 1.0, seed=1)]
    return corpus


def suite_peel(_rng) -> tuple[bool, str]:
    """Peeling leaves a minimum-degree-2 remainder, and every peeled
    component is a tree with at most one edge back into it."""
    corpus = _graph_corpus()
    for g in corpus:
        z = decomp.peel_degree_one(g)
        rest = [v for v in g.vertices if v not in z]
        rest_set = set(rest)
        for v in rest:
            if sum(1 for w in g.neighbors(v) if w in rest_set) < 2:
                return False, f"remainder vertex {v} has degree < 2 ({g.n} vertices, {g.m} edges)"
        for comp in connected_components(g, universe=sorted(z)):
            cset = set(comp)
            inside = sum(1 for v in comp for w in g.neighbors(v) if w in cset) // 2
            if inside != len(comp) - 1:
                return False, f"peeled component of size {len(comp)} is not a tree"
            out = sum(1 for v in comp for w in g.neighbors(v) if w not in cset)
            if out > 1:
                return False, f"peeled component with {out} outgoing edges"
    return True, f"{len(corpus)} graphs"


def suite_types(_rng) -> tuple[bool, str]:
    """Rank-2 type equality must coincide with agreement on the
    characteristic sentences of every graph in the class (one label,
    up to 4 vertices) — the sentences are evaluated naively."""
    graphs = one_label_graphs_upto(4)
    ctx = TypeContext()
    tids = [compute_qtype(g, (), 2, ctx).tid for g in graphs]
    sentences = {}
    for g, tid in zip(graphs, tids):
        if tid not in sentences:
            sentences[tid] = rank_characteristic(g, (), 2)
    checks = 0
    for g, tid in zip(graphs, tids):
        for ref_tid, tau in sentences.items():
            want = ref_tid == tid
            got = fo.naive_check(g, tau)
            checks += 1
            if got != want:
                return False, (f"graph with {g.n} vertices, {g.m} edges: "
                               f"characteristic sentence and rank-2 type disagree")
    return True, f"{len(graphs)} graphs, {len(sentences)} classes, {checks} checks"


def _radius_bounded_violation(g, universe, radius, cap, head_size=None):
    """Brute-force oracle: scan every connected subset of the universe
    whose induced radius is at most ``radius``; report whether one has
    edge excess above cap (head_size None) or more than cap edges into
    the head prefix (head_size given)."""
    uni = sorted(universe)
    for size in range(1, len(uni) + 1):
        for sub in itertools.combinations(uni, size):
            sset = set(sub)
            comps = connected_components(g, universe=sub)
            if len(comps) != 1:
                continue
            ecc = {}
            for v in sub:
                depth = {v: 0}
                frontier = [v]
                d = 0
                while frontier:
                    d += 1
                    nxt = []
                    for a in frontier:
                        for b in g.neighbors(a):
                            if b in sset and b not in depth:
                                depth[b] = d
                                nxt.append(b)
                    frontier = nxt
                ecc[v] = max(depth.values())
            if min(ecc.values()) > radius:
                continue
            if head_size is None:
                edges = sum(1 for a in sub for b in g.neighbors(a) if b in sset and b > a)
                if edges - len(sub) > cap:
                    return True
            else:
                head = sum(1 for a in sub for b in g.neighbors(a) if b <= head_size)
                if head > cap:
                    return True
    return False


def suite_balls(_rng) -> tuple[bool, str]:
    """Ball-based partition property checks agree with exhaustive
    enumeration of radius-bounded connected subsets."""
    by_n = connected_graphs_upto(5)
    graphs = [g for n in sorted(by_n) for g in by_n[n]]
    cases = 0
    for g in graphs:
        for r, mu in ((1, 1), (2, 1)):
            params = PartitionParams(b=1, r=r, mu=mu)
            for b in (1, 2):
                part = decomp.CanonicalPartition.of(g.n, b, mu)
                tail_universe = list(part.middle) + list(part.tail)
                got = decomp.excess_first_violation(
                    g, tail_universe, params.excess_radius, params.excess_cap) is not None
                want = _radius_bounded_violation(
                    g, tail_universe, params.excess_radius, params.excess_cap)
                cases += 1
                if got != want:
                    return False, (f"excess check mismatch on {g.n}v/{g.m}e "
                                   f"b={b} r={r} mu={mu}")
                tail = list(part.tail)
                got4 = decomp.head_edges_first_violation(
                    g, tail, params.head_edge_radius, mu, b) is not None
                want4 = _radius_bounded_violation(
                    g, tail, params.head_edge_radius, mu, head_size=b)
                cases += 1
                if got4 != want4:
                    return False, (f"head-edge check mismatch on {g.n}v/{g.m}e "
                                   f"b={b} r={r} mu={mu}")
    return True, f"{len(graphs)} graphs, {cases} checks"


def _scattered_brute(g, w, r, s) -> int:
    wl = sorted(set(w))
    far = {}
    for a, b in itertools.combinations(wl, 2):
        near = set(bfs_ball_members(g, a, 2 * r))
        far[(a, b)] = b not in near
    best = 0
    for size in range(min(len(wl), s), 0, -1):
        for sub in itertools.combinations(wl, size):
            if all(far[p] for p in itertools.combinations(sub, 2)):
                return size
    return best


def suite_scattered(rng) -> tuple[bool, str]:
    """max_scattered equals subset brute force; the long-diameter
    certificate agrees with the exact search whenever it fires."""
    fired = 0
    for trial in range(150):
        n = rng.randint(2, 20)
        mmax = n * (n - 1) // 2
        m = rng.randint(0, min(2 * n, mmax))
        g = Graph(n, rng.sample(list(itertools.combinations(range(1, n + 1), 2)), m))
        w = rng.sample(range(1, n + 1), rng.randint(0, min(9, n)))
        r = rng.choice([0, 1, 2])
        s = rng.choice([1, 2, 3])
        got = localcheck.max_scattered(g, w, r, s)
        want = min(s, _scattered_brute(g, w, r, s)) if w else 0
        if got.value != want:
            return False, f"value {got.value} != {want} on n={n} r={r} s={s}"
        fired += got.shortcut_fired
    for n, r, s in ((40, 1, 2), (60, 1, 3), (50, 2, 2)):
        g = path_graph(n)
        got = localcheck.max_scattered(g, range(1, n + 1), r, s)
        exact = localcheck.max_scattered(g, range(1, n + 1), r, s, use_shortcut=False)
        if not got.shortcut_fired:
            return False, f"certificate did not fire on the {n}-path r={r} s={s}"
        fired += 1
        if got.value != exact.value:
            return False, f"certificate disagrees with exact search on the {n}-path"
    return True, f"150 random + 3 constructed instances, certificate fired {fired}x"


def suite_oracle(rng) -> tuple[bool, str]:
    """Structured evaluation (kernelized balls + scattering) agrees
    with naive evaluation of the expanded sentence."""
    sentences = [
        gnf.parse_gnf('bls a r 1 s 1 omega "exists y. E(x, y)"\nsentence a'),
        gnf.parse_gnf('bls a r 1 s 2 omega "forall y. (distgt 1 (x, y) | x = y)"\n'
                      'sentence ~ a'),
        gnf.parse_gnf('bls a r 1 s 2 omega "exists y. E(x, y)"\n'
                      'bls b r 2 s 1 omega "exists y. (E(x, y) & exists z. '
                      '(E(y, z) & ~ x = z))"\nsentence (a & b)'),
    ]
    count = 0
    for sent in sentences:
        for seed in (1, 2):
            for gen in (lambda s=seed: models.gen_er(16, 2.5 / 16, seed=s),
                        lambda s=seed: models.gen_pa(16, 2, seed=s)):
                g = gen()
                fast = localcheck.check_gnf(g, sent, use_kernel=True).holds
                slow = localcheck.check_gnf_oracle(g, sent)
                count += 1
                if fast != slow:
                    return False, f"verdicts diverge (sentence {count})"
    return True, f"{count} graph/sentence pairs"


SUITES = (
    ("peel-idempotence", suite_peel),
    ("type-sentence-agreement", suite_types),
    ("ball-reduction-soundness", suite_balls),
    ("scattered-brute-force", suite_scattered),
    ("oracle-equivalence", suite_oracle),
)


@dataclass(frozen=True)
class SelftestReport:
    results: tuple

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    def lines(self) -> list[str]:
        out = []
        for r in self.results:
            mark = "PASS" if r.ok else "FAIL"
            out.append(f"{mark}  {r.name:28s} {r.seconds:6.1f}s  {r.detail}")
        out.append(f"{'all suites passed' if self.ok else 'FAILURES PRESENT'}")
        return out


def run_selftest(names=None) -> SelftestReport:
    """Run the verification suites (all by default; or a subset by
    name) and collect the pass/fail matrix."""
    chosen = [(n, f) for n, f in SUITES if names is None or n in set(names)]
    if names is not None:
        known = {n for n, _ in SUITES}
        bad = set(names) - known
        if bad:
            raise ValueError(f"unknown suites: {sorted(bad)}; available: {sorted(known)}")
    results = []
    for name, func in chosen:
        rng = random.Random(20240601)
        t0 = time.perf_counter()
        try:
            ok, detail = func(rng)
        except Exception as e:  # a crashing suite is a failing suite
            ok, detail = False, f"crashed: {e!r}"
        results.append(SuiteResult(name=name, ok=ok, detail=detail,
                                   seconds=time.perf_counter() - t0))
    return SelftestReport(results=tuple(results))
