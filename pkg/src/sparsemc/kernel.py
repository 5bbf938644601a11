"""Type-preserving graph surgery.

A *part* is an induced subgraph together with a tuple of designated
boundary vertices; the rest of the part is its interior. Two parts with
equal rank-q boundary types (see ``qtypes``) satisfy the same rank-q
sentences after gluing into any host graph along the boundary, so a
part may be swapped for a smaller one of the same type without changing
any rank-q property of the whole graph.

``minimal_representative`` finds the canonical smallest such swap: the
first graph, in a fixed enumeration order (vertex count, then edge
count, then edge positions, then label assignment — so the sparse
representatives that dominate in practice are reached early), whose
boundary type matches. When the interior carries a single label mask,
interior vertices are interchangeable, so only one edge layout per
isomorphism class is tried (precomputed orbit minima, cached per
geometry). Candidates are rejected as soon as one vertex extension
yields a child type the target lacks, which settles most mismatches
after a single extension. Searches are cached twice in the shared
``TypeContext``: by exact part shape (skipping even the target type
computation on repeats) and by target type id. The search is exact but
budgeted: when no representative of at most ``rep_cap`` vertices is
found (or the candidate budget runs out), the caller keeps the original
part and the report counts a fallback.

``reduce_trees`` folds the pendant forest (the complement of the
2-core) bottom-up in bounded chunks, batching sibling subtrees so that
high-degree attachment points shrink geometrically. ``replace_protrusions``
runs the full pipeline: fold trees, extract the low-degree skeleton,
replace each small-boundary region by its representative, fold again.
All surgery happens on one mutable workspace; graphs are rebuilt once
at the end, keeping the pipeline near linear in the input size.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .decomp import protrusion_skeleton
from .graphs import Graph, LabeledGraph, as_labeled, base_graph, connected_components
from .qtypes import TypeContext, _graph_bits, tuple_type_id


@dataclass
class KernelConfig:
    """Knobs for the surgery pipeline; ``ctx`` carries the type interning
    table and the representative cache across calls."""

    q: int
    r: int = 1
    mu: int = 5
    rep_cap: int = 6
    tree_chunk: int = 24
    part_cap: int = 150
    search_budget: int = 50_000
    type_nodes_cap: int = 250_000
    ctx: TypeContext = field(default_factory=TypeContext)

    def __post_init__(self):
        if self.q < 0:
            raise ValueError("rank q must be nonnegative")
        if self.r < 1 or self.mu < 1:
            raise ValueError("r and mu must be at least 1")
        if self.rep_cap < 1 or self.tree_chunk < 2 or self.part_cap < 1:
            raise ValueError("caps must be positive (tree_chunk at least 2)")
        if self.search_budget < 1 or self.type_nodes_cap < 1:
            raise ValueError("budgets must be positive")


def _part_searchable(nh: int, cfg: KernelConfig) -> bool:
    """Typing a part costs about nh**q tuple extensions; parts over
    either cap are skipped rather than searched."""
    if nh > cfg.part_cap:
        return False
    nodes = 1
    for _ in range(cfg.q):
        nodes *= max(nh, 1)
        if nodes > cfg.type_nodes_cap:
            return False
    return True


def _effective_chunk(cfg: KernelConfig) -> int:
    """Largest pendant batch whose part (batch plus attachment vertex)
    stays under the type-cost caps."""
    chunk = min(cfg.tree_chunk, cfg.part_cap - 1)
    while chunk > 1 and not _part_searchable(chunk + 1, cfg):
        chunk -= 1
    return max(chunk, 1)


@dataclass
class KernelReport:
    vertices_before: int = 0
    edges_before: int = 0
    vertices_after: int = 0
    edges_after: int = 0
    tree_folds: int = 0      # pendant batches successfully shrunk
    parts_replaced: int = 0  # skeleton regions successfully shrunk
    stable_parts: int = 0    # parts already minimal, left in place
    fallbacks: int = 0       # representative search missed (cap or budget)
    skipped_parts: int = 0   # parts over part_cap, never searched


@dataclass(frozen=True)
class Rep:
    """A search result: graph on vertices 1..n as bitmask rows, with the
    first k vertices designated."""

    n: int
    k: int
    adj_bits: tuple
    lab_bits: tuple

    def to_labeled(self, alphabet: int) -> LabeledGraph:
        edges = []
        for v in range(1, self.n + 1):
            bits = self.adj_bits[v]
            while bits:
                low = bits & -bits
                w = low.bit_length()
                if w > v:
                    edges.append((v, w))
                bits ^= low
        classes = [set() for _ in range(alphabet)]
        for v in range(1, self.n + 1):
            for c in range(alphabet):
                if self.lab_bits[v] >> c & 1:
                    classes[c].add(v)
        return LabeledGraph(Graph(self.n, edges), tuple(frozenset(c) for c in classes))


_MISS = object()

# orbit enumeration is precomputed only for geometries this small
# (free! permutations over at most C(6,2) pair slots)
_CANON_LIMIT = 6
_canon_cache: dict[tuple[int, int], tuple[tuple[int, ...], list]] = {}

# per-context cap on memoized candidate boundary types (a few hundred
# bytes each; the cap bounds the context at tens of megabytes)
_CAND_CACHE_MAX = 200_000


def _pair_slots(n: int, k: int) -> list[tuple[int, int]]:
    """Vertex pairs whose adjacency a candidate chooses freely: every
    pair except those inside the designated block 1..k."""
    return [(a, b) for a in range(1, n + 1) for b in range(a + 1, n + 1) if b > k]


def _canonical_masks(n: int, k: int, group_sizes: tuple[int, ...]):
    """Edge bitmasks over the free pair slots, one per isomorphism
    class under the interior permutations that respect the consecutive
    interior groups (vertices k+1..n split into runs of the given
    sizes — one run per label mask, so only label-preserving symmetry
    is quotiented), ordered by (edge count, value). Pure combinatorics,
    cached per geometry."""
    key = (n, k, group_sizes)
    got = _canon_cache.get(key)
    if got is not None:
        return got
    pairs = _pair_slots(n, k)
    slot = {pq: i for i, pq in enumerate(pairs)}
    masks = np.arange(1 << len(pairs), dtype=np.int64)
    best = masks.copy()
    groups = []
    start = k + 1
    for size in group_sizes:
        groups.append(tuple(range(start, start + size)))
        start += size
    identity = tuple(v for group in groups for v in group)
    for parts in itertools.product(*(itertools.permutations(g) for g in groups)):
        perm = tuple(v for part in parts for v in part)
        if perm == identity:
            continue
        sigma = dict(zip(identity, perm))
        out = np.zeros_like(masks)
        for p, (a, b) in enumerate(pairs):
            a2 = sigma.get(a, a)
            b2 = sigma[b]
            image = slot[(a2, b2) if a2 < b2 else (b2, a2)]
            out |= ((masks >> p) & 1) << image
        np.minimum(best, out, out=best)
    canon = [int(m) for m in np.nonzero(best == masks)[0]]
    canon.sort(key=lambda m: (m.bit_count(), m))
    got = (tuple(canon), pairs)
    _canon_cache[key] = got
    return got


def _compositions(total: int, parts: int):
    """Ordered tuples of `parts` positive integers summing to `total`."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _search_representative(nh, adj_bits, lab_bits, designated, cfg: KernelConfig):
    """First boundaried graph, in the canonical order (vertex count,
    edge count, edge positions, label assignment), on at most
    min(rep_cap, nh) vertices whose rank-q boundary type matches the
    given part; None when none exists within the caps. Cached both by
    exact part shape and by target type id."""
    ctx = cfg.ctx
    k = len(designated)
    if len(set(designated)) != k:
        raise ValueError("designated vertices must be distinct")
    adj_bits = tuple(adj_bits)
    lab_bits = tuple(lab_bits)
    designated = tuple(designated)
    shape_key = (adj_bits, lab_bits, designated,
                 cfg.q, cfg.rep_cap, cfg.search_budget)
    hit = ctx.shape_cache.get(shape_key, _MISS)
    if hit is not _MISS:
        return hit
    target = tuple_type_id(nh, adj_bits, lab_bits, designated, cfg.q, ctx)
    key = (target, k, cfg.rep_cap, min(cfg.rep_cap, nh))
    hit = ctx.rep_cache.get(key, _MISS)
    if hit is _MISS:
        hit = _enumerate_candidates(nh, adj_bits, lab_bits, designated, target, cfg)
        ctx.rep_cache[key] = hit
    ctx.shape_cache[shape_key] = hit
    return hit


def _enumerate_candidates(nh, adj_bits, lab_bits, designated, target, cfg):
    ctx = cfg.ctx
    k = len(designated)
    # fixed data shared by every candidate: the designated block
    dd_lab = tuple(lab_bits[v] for v in designated)
    dd_adj = [0] * (k + 1)
    for i in range(k):
        for j in range(i + 1, k):
            if adj_bits[designated[i]] >> (designated[j] - 1) & 1:
                dd_adj[i + 1] |= 1 << j
                dd_adj[j + 1] |= 1 << i
    des_set = set(designated)
    # sound prunes for q >= 1: the interior-realized label-mask set and
    # each designated vertex's has-an-interior-neighbor bit are rank-1
    # properties of a boundaried part ("some non-designated vertex
    # carries mask m" needs one quantifier), hence equal in any
    # rank->=1 match
    masks = {lab_bits[v] for v in range(1, nh + 1) if v not in des_set}
    pattern = []
    for v in designated:
        bits = adj_bits[v]
        has_out = False
        while bits:
            low = bits & -bits
            if low.bit_length() not in des_set:
                has_out = True
                break
            bits ^= low
        pattern.append(has_out)
    allowed = sorted(masks)

    target_children = ctx.children_of(target) if cfg.q >= 1 else None
    des_local = tuple(range(1, k + 1))
    budget = cfg.search_budget

    def matches(n, adj, labs):
        """True/False, or None once the candidate budget is spent.

        The candidate's boundary type is target-independent, so it is
        cached on the context: repeated searches over the same
        candidate space (the common case when many parts share a
        geometry) pay for typing once. When the cache is saturated,
        extensions are typed one vertex at a time instead, so a
        foreign child type rejects the candidate before the full type
        is built."""
        nonlocal budget
        budget -= 1
        if budget < 0:
            return None
        key = (tuple(adj), tuple(labs), k, cfg.q)
        tid = ctx.cand_cache.get(key, _MISS)
        if tid is not _MISS:
            return tid == target
        if len(ctx.cand_cache) < _CAND_CACHE_MAX:
            tid = tuple_type_id(n, adj, labs, des_local, cfg.q, ctx)
            ctx.cand_cache[key] = tid
            return tid == target
        if target_children is None:
            return tuple_type_id(n, adj, labs, des_local, cfg.q, ctx) == target
        memo: dict = {}
        seen = set()
        for w in range(1, n + 1):
            ch = tuple_type_id(n, adj, labs, des_local + (w,), cfg.q - 1, ctx, memo)
            if ch not in target_children:
                return False
            seen.add(ch)
        if len(seen) != len(target_children):
            return False
        return tuple_type_id(n, adj, labs, des_local, cfg.q, ctx, memo) == target

    # a candidate on n vertices realizes at most n distinct child types,
    # so the target's child count is a hard lower bound on n
    n_floor = k
    if cfg.q >= 1:
        n_floor = max(n_floor, len(target_children))
    for n in range(n_floor, min(cfg.rep_cap, nh) + 1):
        free = n - k
        base_adj = [0] * (n + 1)
        for i in range(1, k + 1):
            base_adj[i] = dd_adj[i]
        # interior label assignments, canonically one sorted run per
        # mask: every multiset realizing exactly the part's mask set
        # (at rank 0 labels are invisible, one all-zero run suffices)
        if cfg.q >= 1:
            if free == 0:
                shapes = [()] if not masks else []
            else:
                shapes = list(_compositions(free, len(allowed)))
        else:
            shapes = [(free,)] if free else [()]
        if n <= _CANON_LIMIT:
            for shape in shapes:
                if cfg.q >= 1:
                    fills = [m for m, c in zip(allowed, shape) for _ in range(c)]
                else:
                    fills = [0] * free
                labs = [0] + list(dd_lab) + fills
                canon, pairs = _canonical_masks(n, k, shape)
                for mask in canon:
                    adj = list(base_adj)
                    m = mask
                    while m:
                        low = m & -m
                        a, b = pairs[low.bit_length() - 1]
                        adj[a] |= 1 << (b - 1)
                        adj[b] |= 1 << (a - 1)
                        m ^= low
                    if cfg.q >= 1 and any(bool(adj[i] >> k) != pattern[i - 1]
                                          for i in range(1, k + 1)):
                        continue
                    verdict = matches(n, adj, labs)
                    if verdict is None:
                        return None
                    if verdict:
                        return Rep(n=n, k=k, adj_bits=tuple(adj), lab_bits=tuple(labs))
        else:
            pairs = _pair_slots(n, k)
            for edge_count in range(len(pairs) + 1):
              for chosen in itertools.combinations(range(len(pairs)), edge_count):
                adj = list(base_adj)
                for pos in chosen:
                    a, b = pairs[pos]
                    adj[a] |= 1 << (b - 1)
                    adj[b] |= 1 << (a - 1)
                if cfg.q >= 1:
                    if any(bool(adj[i] >> k) != pattern[i - 1] for i in range(1, k + 1)):
                        continue
                for shape in shapes:
                    if cfg.q >= 1:
                        assign = [m for m, c in zip(allowed, shape) for _ in range(c)]
                        for perm in set(itertools.permutations(assign)):
                            labs = [0] + list(dd_lab) + list(perm)
                            verdict = matches(n, adj, labs)
                            if verdict is None:
                                return None
                            if verdict:
                                return Rep(n=n, k=k, adj_bits=tuple(adj),
                                           lab_bits=tuple(labs))
                    else:
                        labs = [0] + list(dd_lab) + [0] * free
                        verdict = matches(n, adj, labs)
                        if verdict is None:
                            return None
                        if verdict:
                            return Rep(n=n, k=k, adj_bits=tuple(adj),
                                       lab_bits=tuple(labs))
    return None


@dataclass(frozen=True)
class RepResult:
    graph: LabeledGraph
    designated: tuple
    fallback: bool


def minimal_representative(h, designated, cfg: KernelConfig) -> RepResult:
    """Canonical smallest part with the same rank-q boundary type as
    (h, designated); on a search miss returns the input flagged as a
    fallback. The result's designated vertices are 1..k."""
    lg = as_labeled(h)
    designated = tuple(designated)
    for v in designated:
        if not (1 <= v <= lg.n):
            raise ValueError(f"designated vertex {v} outside 1..{lg.n}")
    adj_bits, lab_bits = _graph_bits(lg)
    rep = _search_representative(lg.n, adj_bits, lab_bits, designated, cfg)
    if rep is None:
        return RepResult(graph=lg, designated=designated, fallback=True)
    return RepResult(graph=rep.to_labeled(lg.num_labels),
                     designated=tuple(range(1, rep.k + 1)), fallback=False)


class _Workspace:
    """Mutable graph under surgery: adjacency sets plus label masks,
    vertex ids grow monotonically, frozen back to a graph once."""

    def __init__(self, g):
        lg = as_labeled(g)
        self.alphabet = lg.num_labels
        self.adj = {v: set(lg.neighbors(v)) for v in lg.vertices}
        self.lab = dict.fromkeys(lg.vertices, 0)
        for c, cls in enumerate(lg.labels):
            for v in cls:
                self.lab[v] |= 1 << c
        self._next = lg.n + 1

    def vertex_count(self) -> int:
        return len(self.adj)

    def edge_count(self) -> int:
        return sum(len(s) for s in self.adj.values()) // 2

    def add_vertex(self, mask: int) -> int:
        v = self._next
        self._next += 1
        self.adj[v] = set()
        self.lab[v] = mask
        return v

    def add_edge(self, u: int, v: int):
        self.adj[u].add(v)
        self.adj[v].add(u)

    def remove(self, verts):
        vs = set(verts)
        for v in vs:
            for w in self.adj[v]:
                if w not in vs:
                    self.adj[w].discard(v)
            del self.adj[v]
            del self.lab[v]

    def part_bits(self, members_sorted, designated):
        """Induced-subgraph bitmask rows with local ids 1..len(members)
        (ascending by workspace id) and the designated tuple relocated."""
        idx = {v: i + 1 for i, v in enumerate(members_sorted)}
        nh = len(members_sorted)
        adj_bits = [0] * (nh + 1)
        lab_bits = [0] * (nh + 1)
        for v in members_sorted:
            li = idx[v]
            lab_bits[li] = self.lab[v]
            mask = 0
            for w in self.adj[v]:
                j = idx.get(w)
                if j is not None:
                    mask |= 1 << (j - 1)
            adj_bits[li] = mask
        return nh, adj_bits, lab_bits, tuple(idx[d] for d in designated)

    def splice(self, interior, boundary, rep: Rep) -> list[int]:
        """Remove the interior, install rep with its designated vertices
        identified with ``boundary``; returns the new interior ids."""
        self.remove(interior)
        ids = {i + 1: b for i, b in enumerate(boundary)}
        fresh = []
        for i in range(rep.k + 1, rep.n + 1):
            v = self.add_vertex(rep.lab_bits[i])
            ids[i] = v
            fresh.append(v)
        for i in range(1, rep.n + 1):
            bits = rep.adj_bits[i]
            while bits:
                low = bits & -bits
                j = low.bit_length()
                bits ^= low
                if j > i and (i > rep.k or j > rep.k):
                    self.add_edge(ids[i], ids[j])
        return fresh

    def freeze(self):
        ids = sorted(self.adj)
        ren = {v: i + 1 for i, v in enumerate(ids)}
        edges = [(ren[v], ren[w]) for v in ids for w in self.adj[v] if v < w]
        g = Graph(len(ids), edges)
        classes = [set() for _ in range(self.alphabet)]
        for v in ids:
            m = self.lab[v]
            for c in range(self.alphabet):
                if m >> c & 1:
                    classes[c].add(ren[v])
        return LabeledGraph(g, tuple(frozenset(cl) for cl in classes)), ren


def replace_part(g, interior, boundary, rep: LabeledGraph, rep_k: int):
    """Swap the induced part (interior plus boundary) of g for ``rep``,
    whose first ``rep_k`` vertices are identified with ``boundary`` in
    order. Returns (new graph, old-id to new-id map). The rep's
    designated block must match the host boundary block exactly."""
    lg = as_labeled(g)
    rep = as_labeled(rep)
    boundary = tuple(boundary)
    interior = sorted(set(interior))
    if rep_k != len(boundary):
        raise ValueError("rep designates a different number of vertices than the boundary")
    if set(interior) & set(boundary):
        raise ValueError("interior and boundary overlap")
    if rep.num_labels != lg.num_labels:
        raise ValueError("label alphabets differ")
    for i, b in enumerate(boundary, start=1):
        for c in range(lg.num_labels):
            if rep.has_label(c + 1, i) != lg.has_label(c + 1, b):
                raise ValueError(f"label mismatch on designated vertex {i}")
        for j in range(i + 1, rep_k + 1):
            if rep.has_edge(i, j) != lg.has_edge(b, boundary[j - 1]):
                raise ValueError("designated block adjacency differs from the boundary block")
    ws = _Workspace(lg)
    adj_bits, lab_bits = _graph_bits(rep)
    ws.splice(interior, boundary, Rep(rep.n, rep_k, tuple(adj_bits), tuple(lab_bits)))
    return ws.freeze()


# --- pendant forest folding ---

@dataclass
class _Unit:
    size: int
    verts: tuple
    settled: bool


def _ws_peel(ws: _Workspace, protected=frozenset()) -> set:
    """Iterated degree-<=1 removal, never removing protected vertices.
    Removed components are still trees with at most one outgoing edge:
    in reverse removal order each vertex has at most one edge to later
    vertices and survivors."""
    deg = {v: len(s) for v, s in ws.adj.items()}
    queue = deque(v for v, d in deg.items() if d <= 1 and v not in protected)
    removed = set()
    while queue:
        v = queue.popleft()
        if v in removed:
            continue
        removed.add(v)
        for w in ws.adj[v]:
            if w not in removed:
                deg[w] -= 1
                if deg[w] <= 1 and w not in protected:
                    queue.append(w)
    return removed


def _ws_components(ws: _Workspace, verts: set) -> list[list[int]]:
    seen = set()
    comps = []
    for start in sorted(verts):
        if start in seen:
            continue
        comp = [start]
        seen.add(start)
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for w in ws.adj[v]:
                if w in verts and w not in seen:
                    seen.add(w)
                    comp.append(w)
                    queue.append(w)
        comps.append(sorted(comp))
    return comps


def _merge_units(ws, v, units, cfg, report) -> list:
    """Batch the pendant units hanging at v (boundary (v,)) through the
    representative search until no batch shrinks; returns the survivors."""
    chunk = _effective_chunk(cfg)
    queue = deque(units)
    frozen = []
    while queue:
        first = queue.popleft()
        if first.size > chunk:
            frozen.append(first)
            continue
        batch = [first]
        total = first.size
        while queue and total + queue[0].size <= chunk:
            nxt = queue.popleft()
            batch.append(nxt)
            total += nxt.size
        if len(batch) == 1 and first.settled:
            frozen.append(first)
            continue
        interior = [w for u in batch for w in u.verts]
        members = sorted(interior + [v])
        nh, abits, lbits, des = ws.part_bits(members, (v,))
        rep = _search_representative(nh, abits, lbits, des, cfg)
        if rep is None:
            report.fallbacks += 1
            frozen.extend(batch)
        elif rep.n < nh:
            fresh = ws.splice(interior, (v,), rep)
            report.tree_folds += 1
            if fresh:
                queue.append(_Unit(size=len(fresh), verts=tuple(fresh), settled=True))
        else:
            report.stable_parts += 1
            frozen.extend(batch)
    return frozen


def _rooted_order(ws, root, allverts):
    """BFS orientation: parent map and vertices by decreasing depth."""
    parent = {root: None}
    depth = {root: 0}
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for w in ws.adj[v]:
            if w in allverts and w not in parent:
                parent[w] = v
                depth[w] = depth[v] + 1
                queue.append(w)
    order = sorted((v for v in parent if v != root), key=lambda v: (-depth[v], v))
    return parent, order


def _fold_rooted(ws, root, allverts, cfg, report) -> list:
    """Fold the tree hanging under ``root`` bottom-up; returns the units
    left pendant at the root."""
    parent, order = _rooted_order(ws, root, allverts)
    pending: dict[int, list] = {}
    for v in order:
        survivors = _merge_units(ws, v, pending.pop(v, []), cfg, report)
        size = 1 + sum(u.size for u in survivors)
        verts = (v,) + tuple(w for u in survivors for w in u.verts)
        pending.setdefault(parent[v], []).append(_Unit(size, verts, settled=False))
    return _merge_units(ws, root, pending.pop(root, []), cfg, report)


def reduce_trees_ws(ws: _Workspace, cfg: KernelConfig, report: KernelReport,
                    protected=frozenset()):
    """Fold the complement of the 2-core: pendant trees batch into their
    attachment vertices; whole tree components shrink to their minimal
    rank-q equivalent graphs. Protected vertices are never removed."""
    peel = _ws_peel(ws, protected)
    if not peel:
        return
    attached: dict[int, list] = {}
    free_comps = []
    for comp in _ws_components(ws, peel):
        outs = [(v, w) for v in comp for w in ws.adj[v] if w not in peel]
        if len(outs) > 1:
            raise RuntimeError("peeled component with two outgoing edges; peel is broken")
        if outs:
            attached.setdefault(outs[0][1], []).append(comp)
        else:
            free_comps.append(comp)
    for a in sorted(attached):
        allverts = {a}
        for comp in attached[a]:
            allverts.update(comp)
        _fold_rooted(ws, a, allverts, cfg, report)
    for comp in free_comps:
        root = comp[0]
        survivors = _fold_rooted(ws, root, set(comp), cfg, report)
        members = sorted([root] + [w for u in survivors for w in u.verts])
        if len(members) > _effective_chunk(cfg):
            report.skipped_parts += 1
            continue
        nh, abits, lbits, des = ws.part_bits(members, ())
        rep = _search_representative(nh, abits, lbits, des, cfg)
        if rep is None:
            report.fallbacks += 1
        elif rep.n < nh:
            ws.splice(members, (), rep)
            report.tree_folds += 1
        else:
            report.stable_parts += 1


def reduce_trees(g, cfg: KernelConfig, protected=frozenset()):
    """Fold pendant trees of g; returns (reduced graph, report)."""
    lg = as_labeled(g)
    report = KernelReport(vertices_before=lg.n, edges_before=lg.m)
    ws = _Workspace(lg)
    reduce_trees_ws(ws, cfg, report, frozenset(protected))
    out, _ = ws.freeze()
    report.vertices_after = out.n
    report.edges_after = out.m
    return out, report


# --- the full pipeline ---

def _attempt_part(ws, interior, boundary, cfg, report):
    interior = sorted(set(interior))
    if not _part_searchable(len(interior) + len(boundary), cfg):
        report.skipped_parts += 1
        return
    members = sorted(interior + list(boundary))
    nh, abits, lbits, des = ws.part_bits(members, boundary)
    rep = _search_representative(nh, abits, lbits, des, cfg)
    if rep is None:
        report.fallbacks += 1
    elif rep.n < nh:
        ws.splice(interior, boundary, rep)
        report.parts_replaced += 1
    else:
        report.stable_parts += 1


def replace_protrusions(g, cfg: KernelConfig, protected=frozenset()):
    """Shrink g to a rank-q equivalent kernel: fold pendant trees,
    extract the low-degree skeleton, replace every region with at most
    mu boundary vertices by its minimal representative, fold once more.
    Protected vertices survive with their identity intact (they are
    kept out of every replaced interior). Returns (kernel, report)."""
    lg = as_labeled(g)
    protected = frozenset(protected)
    report = KernelReport(vertices_before=lg.n, edges_before=lg.m)
    ws = _Workspace(lg)
    reduce_trees_ws(ws, cfg, report, protected)
    mid, ren = ws.freeze()
    protected = frozenset(ren[v] for v in protected)
    ws = _Workspace(mid)
    z_mid = frozenset(_ws_peel(ws, protected))
    sk = protrusion_skeleton(mid, cfg.r, cfg.mu, z=z_mid, excluded=protected)
    comp_of = {}
    for ci, comp in enumerate(sk.components):
        for v in comp:
            comp_of[v] = ci
    hung: dict[int, list] = {}
    for zc in connected_components(base_graph(mid), universe=sk.z):
        outs = {w for v in zc for w in mid.neighbors(v) if w not in sk.z}
        if len(outs) == 1:
            ci = comp_of.get(next(iter(outs)))
            if ci is not None:
                hung.setdefault(ci, []).extend(zc)
    by_boundary: dict[tuple, list] = {}
    for ci, bd in enumerate(sk.boundaries):
        if len(bd) <= cfg.mu:
            by_boundary.setdefault(tuple(sorted(bd)), []).append(ci)
    for bnd in sorted(by_boundary):
        cis = by_boundary[bnd]
        if not bnd:
            for ci in cis:
                _attempt_part(ws, list(sk.components[ci]) + hung.get(ci, []), (), cfg, report)
        else:
            interior = []
            for ci in cis:
                interior.extend(sk.components[ci])
                interior.extend(hung.get(ci, []))
            _attempt_part(ws, interior, bnd, cfg, report)
    reduce_trees_ws(ws, cfg, report, protected)
    kernel, _ = ws.freeze()
    report.vertices_after = kernel.n
    report.edges_after = kernel.m
    return kernel, report
