"""Exhaustive enumeration of small graphs up to isomorphism.

Canonical forms come from refinement plus individualization (the classic
canonical-labeling search, sized for <= 10 vertices): iterate neighbor-
color refinement; when the coloring is not discrete, branch on every
vertex of the first non-singleton cell and take the minimum leaf
encoding. Cell choice is isomorphism-invariant, so isomorphic (color-
preserving isomorphic, when colors are given) graphs get equal forms.

Enumeration is by vertex augmentation: every connected graph on k+1
vertices is a connected graph on k vertices plus one vertex with a
nonempty neighborhood (delete a non-cut vertex, e.g. a DFS-tree leaf),
and dropping the nonempty restriction covers all graphs. Tests validate
the class counts against the known sequences (connected: 1, 1, 2, 6,
21, 112, 853, 11117 for n = 1..8).
"""

from __future__ import annotations

from .graphs import Graph, LabeledGraph


def _refine(adj: tuple[int, ...], colors: list[int]) -> list[int]:
    n = len(adj)
    while True:
        sigs = []
        for v in range(n):
            nbr = []
            mask = adj[v]
            while mask:
                low = mask & -mask
                nbr.append(colors[low.bit_length() - 1])
                mask ^= low
            nbr.sort()
            sigs.append((colors[v], tuple(nbr)))
        order = {s: i for i, s in enumerate(sorted(set(sigs)))}
        new = [order[s] for s in sigs]
        if new == colors:
            return new
        colors = new


def canonical_form(n: int, adj: tuple[int, ...], colors=None) -> tuple:
    """Canonical encoding of a colored graph given 0-based neighbor
    bitmasks. Equal encodings iff color-preserving isomorphic."""
    if n == 0:
        return ((), 0)
    base_colors = list(colors) if colors is not None else [0] * n

    best: list[tuple | None] = [None]

    def encode(final: list[int]) -> tuple:
        perm = sorted(range(n), key=lambda v: final[v])
        pos = [0] * n
        for i, v in enumerate(perm):
            pos[v] = i
        bits = 0
        idx = 0
        for i in range(n):
            vi = perm[i]
            for j in range(i + 1, n):
                if adj[vi] >> perm[j] & 1:
                    bits |= 1 << idx
                idx += 1
        return (tuple(base_colors[v] for v in perm), bits)

    def search(colors_now: list[int]) -> None:
        colors_now = _refine(adj, colors_now)
        cells: dict[int, list[int]] = {}
        for v, c in enumerate(colors_now):
            cells.setdefault(c, []).append(v)
        target = None
        for c in sorted(cells):
            if len(cells[c]) > 1:
                target = cells[c]
                break
        if target is None:
            enc = encode(colors_now)
            if best[0] is None or enc < best[0]:
                best[0] = enc
            return
        for v in target:
            branched = [c * 2 for c in colors_now]
            branched[v] += 1
            search(branched)

    search(base_colors)
    return best[0]


def _as_graph(n: int, adj: tuple[int, ...]) -> Graph:
    edges = []
    for v in range(n):
        mask = adj[v]
        while mask:
            low = mask & -mask
            w = low.bit_length() - 1
            if w > v:
                edges.append((v + 1, w + 1))
            mask ^= low
    return Graph(n, edges)


def _augmentations(reps: list[tuple[int, ...]], k: int, require_edge: bool):
    """All (k+1)-vertex adjacency tuples from k-vertex parents."""
    start = 1 if require_edge else 0
    for adj in reps:
        for nb in range(start, 1 << k):
            rows = list(adj)
            for w in range(k):
                if nb >> w & 1:
                    rows[w] |= 1 << k
            rows.append(nb)
            yield tuple(rows)


def _enumerate(max_n: int, connected: bool) -> dict[int, list[Graph]]:
    by_n: dict[int, list[tuple[int, ...]]] = {1: [(0,)]}
    for k in range(1, max_n):
        seen: set[tuple] = set()
        fresh: list[tuple[int, ...]] = []
        for adj in _augmentations(by_n[k], k, require_edge=connected):
            cf = canonical_form(k + 1, adj)
            if cf not in seen:
                seen.add(cf)
                fresh.append(adj)
        by_n[k + 1] = fresh
    return {n: [_as_graph(n, adj) for adj in reps] for n, reps in by_n.items()}


def connected_graphs_upto(max_n: int) -> dict[int, list[Graph]]:
    """Connected graphs on 1..max_n vertices, one per isomorphism class."""
    return _enumerate(max_n, connected=True)


def all_graphs_upto(max_n: int) -> dict[int, list[Graph]]:
    """All graphs (disconnected included), one per isomorphism class."""
    return _enumerate(max_n, connected=False)


def one_label_graphs_upto(max_n: int) -> list[LabeledGraph]:
    """All graphs on 1..max_n vertices with one unary label class, one
    representative per label-preserving isomorphism class."""
    out: list[LabeledGraph] = []
    for n, reps in sorted(all_graphs_upto(max_n).items()):
        seen: set[tuple] = set()
        for g in reps:
            adj = tuple(
                sum(1 << (w - 1) for w in g.neighbors(v + 1)) for v in range(n)
            )
            for mask in range(1 << n):
                colors = [(mask >> v) & 1 for v in range(n)]
                cf = canonical_form(n, adj, colors)
                if cf in seen:
                    continue
                seen.add(cf)
                members = [v + 1 for v in range(n) if colors[v]]
                out.append(LabeledGraph(g, [members]))
    return out
