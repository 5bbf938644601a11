"""Immutable vertex-labeled graphs and the small toolbox built on them.

Vertices are the integers 1..n; the numbering is significant (generators
emit vertices in decreasing expected-degree order and the decomposition
code peels prefixes of it). Graphs are simple: no self-loops, no parallel
edges. A ``LabeledGraph`` adds l unary label classes, indexed 1..l.
"""

from __future__ import annotations

from bisect import bisect_left
from collections import deque
from dataclasses import dataclass, field


class Graph:
    """Simple undirected graph on vertices 1..n with sorted adjacency."""

    __slots__ = ("n", "m", "_adj")

    def __init__(self, n: int, edges):
        if n < 0:
            raise ValueError("vertex count must be nonnegative")
        adj: list[list[int]] = [[] for _ in range(n + 1)]
        seen: set[tuple[int, int]] = set()
        m = 0
        for u, v in edges:
            if not (1 <= u <= n and 1 <= v <= n):
                raise ValueError(f"edge ({u},{v}) out of range 1..{n}")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise ValueError(f"duplicate edge ({u},{v})")
            seen.add(key)
            adj[u].append(v)
            adj[v].append(u)
            m += 1
        self.n = n
        self.m = m
        self._adj = tuple(tuple(sorted(neighbors)) for neighbors in adj)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        row = self._adj[u]
        i = bisect_left(row, v)
        return i < len(row) and row[i] == v

    def edges(self):
        """Edges as (u, v) with u < v, sorted."""
        for u in range(1, self.n + 1):
            for v in self._adj[u]:
                if u < v:
                    yield (u, v)

    @property
    def vertices(self) -> range:
        return range(1, self.n + 1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self._adj == other._adj

    def __hash__(self):
        return hash((self.n, self._adj))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


class LabeledGraph:
    """A Graph plus label classes: labels[k-1] is the set carrying label k."""

    __slots__ = ("graph", "labels")

    def __init__(self, graph: Graph, labels=()):
        checked = []
        for k, cls in enumerate(labels, start=1):
            cls = frozenset(cls)
            for v in cls:
                if not (1 <= v <= graph.n):
                    raise ValueError(f"label {k} names vertex {v} out of range")
            checked.append(cls)
        self.graph = graph
        self.labels = tuple(checked)

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def m(self) -> int:
        return self.graph.m

    @property
    def num_labels(self) -> int:
        return len(self.labels)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.graph.neighbors(v)

    def degree(self, v: int) -> int:
        return self.graph.degree(v)

    def has_edge(self, u: int, v: int) -> bool:
        return self.graph.has_edge(u, v)

    def edges(self):
        return self.graph.edges()

    @property
    def vertices(self) -> range:
        return self.graph.vertices

    def has_label(self, k: int, v: int) -> bool:
        return v in self.labels[k - 1]

    def with_extra_label(self, members) -> "LabeledGraph":
        """New graph with one more label class (index num_labels+1)."""
        return LabeledGraph(self.graph, self.labels + (frozenset(members),))

    def induced(self, vertices) -> tuple["LabeledGraph", tuple[int, ...]]:
        """Induced subgraph on the given vertices, renumbered 1..k in
        ascending order of the original indices. Returns (subgraph,
        back_map) where back_map[i-1] is the original index of vertex i."""
        members = sorted(set(vertices))
        index = {v: i for i, v in enumerate(members, start=1)}
        edges = []
        for v in members:
            for w in self.graph.neighbors(v):
                if v < w and w in index:
                    edges.append((index[v], index[w]))
        labels = [frozenset(index[v] for v in cls if v in index) for cls in self.labels]
        return LabeledGraph(Graph(len(members), edges), labels), tuple(members)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LabeledGraph):
            return NotImplemented
        return self.graph == other.graph and self.labels == other.labels

    def __hash__(self):
        return hash((self.graph, self.labels))

    def __repr__(self):
        return f"LabeledGraph(n={self.n}, m={self.m}, l={self.num_labels})"


def as_labeled(g) -> LabeledGraph:
    return g if isinstance(g, LabeledGraph) else LabeledGraph(g)


def base_graph(g) -> Graph:
    return g.graph if isinstance(g, LabeledGraph) else g


@dataclass(frozen=True)
class Ball:
    """Radius-r ball around a center: members plus the induced subgraph.

    ``members`` are original indices in ascending order; ``induced`` is
    renumbered 1..|members| in that order and ``back_map[i-1]`` recovers
    the original index of induced vertex i.
    """

    center: int
    radius: int
    members: tuple[int, ...]
    induced: LabeledGraph
    back_map: tuple[int, ...]

    def local_index(self, original: int) -> int:
        i = bisect_left(self.back_map, original)
        if i == len(self.back_map) or self.back_map[i] != original:
            raise KeyError(f"vertex {original} not in ball")
        return i + 1


def bfs_ball_members(g, center: int, radius: int, universe=None) -> list[int]:
    """Vertices within distance ``radius`` of ``center``; BFS restricted to
    ``universe`` (a set) when given. Sorted ascending."""
    base = base_graph(g)
    if not (1 <= center <= base.n):
        raise ValueError(f"center {center} out of range 1..{base.n}")
    if universe is not None and center not in universe:
        raise ValueError(f"center {center} not in the restricted universe")
    seen = {center}
    frontier = deque([(center, 0)])
    while frontier:
        v, d = frontier.popleft()
        if d == radius:
            continue
        for w in base.neighbors(v):
            if w not in seen and (universe is None or w in universe):
                seen.add(w)
                frontier.append((w, d + 1))
    return sorted(seen)


def ball(g, center: int, radius: int) -> Ball:
    """The radius-``radius`` ball around ``center`` with induced subgraph."""
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    lg = as_labeled(g)
    members = bfs_ball_members(lg, center, radius)
    induced, back_map = lg.induced(members)
    return Ball(center, radius, tuple(members), induced, back_map)


def connected_components(g, universe=None) -> list[list[int]]:
    """Components (as sorted vertex lists) ordered by smallest member.

    Restricted to ``universe`` when given, otherwise all vertices.
    """
    base = base_graph(g)
    verts = sorted(universe) if universe is not None else list(base.vertices)
    inside = set(verts) if universe is not None else None
    seen: set[int] = set()
    comps = []
    for s in verts:
        if s in seen:
            continue
        comp = [s]
        seen.add(s)
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for w in base.neighbors(v):
                if w not in seen and (inside is None or w in inside):
                    seen.add(w)
                    comp.append(w)
                    queue.append(w)
        comp.sort()
        comps.append(comp)
    return comps


def is_connected(g) -> bool:
    base = base_graph(g)
    if base.n <= 1:
        return True
    return len(bfs_ball_members(base, 1, base.n)) == base.n


def induced_edge_count(g, vertices) -> int:
    base = base_graph(g)
    inside = set(vertices)
    total = 0
    for v in inside:
        for w in base.neighbors(v):
            if w in inside and v < w:
                total += 1
    return total


def edge_excess(g, vertices) -> int:
    """|E| - |V| of the induced subgraph (cycle rank minus component count)."""
    members = set(vertices)
    return induced_edge_count(g, members) - len(members)


def triangle_count(g) -> int:
    """Number of triangles, by neighbor intersection on ordered wedges."""
    base = base_graph(g)
    total = 0
    adj = base._adj
    for u in range(1, base.n + 1):
        row = adj[u]
        higher = [w for w in row if w > u]
        hs = set(higher)
        for v in higher:
            for w in adj[v]:
                if w > v and w in hs:
                    total += 1
    return total


@dataclass(frozen=True)
class DegreeStats:
    """Degree summary: histogram, complementary CDF, second-order average.

    ``ccdf`` lists (d, fraction of vertices with degree ≥ d) for each
    distinct degree d ascending. ``second_order`` is Σdeg²/Σdeg (0 when
    the graph has no edges) — the size-biased mean degree.
    """

    histogram: dict = field(default_factory=dict)
    ccdf: tuple = ()
    second_order: float = 0.0


def degree_stats(g) -> DegreeStats:
    base = base_graph(g)
    degs = [base.degree(v) for v in base.vertices]
    hist: dict[int, int] = {}
    for d in degs:
        hist[d] = hist.get(d, 0) + 1
    n = base.n
    ccdf = []
    above = n
    for d in sorted(hist):
        ccdf.append((d, above / n))
        above -= hist[d]
    s1 = sum(degs)
    s2 = sum(d * d for d in degs)
    return DegreeStats(histogram=hist, ccdf=tuple(ccdf), second_order=(s2 / s1 if s1 else 0.0))


# --- small constructors used across tests, demos and the CLI selftest ---

def path_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(1, n)])


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("cycle needs at least 3 vertices")
    return Graph(n, [(i, i + 1) for i in range(1, n)] + [(n, 1)])


def complete_graph(n: int) -> Graph:
    return Graph(n, [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)])


def star_graph(leaves: int) -> Graph:
    return Graph(leaves + 1, [(1, i) for i in range(2, leaves + 2)])


def lollipop_graph(clique: int, tail: int) -> Graph:
    """A complete graph on ``clique`` vertices with a pendant path of
    ``tail`` extra vertices hanging off vertex ``clique``."""
    edges = [(i, j) for i in range(1, clique + 1) for j in range(i + 1, clique + 1)]
    prev = clique
    for t in range(clique + 1, clique + tail + 1):
        edges.append((prev, t))
        prev = t
    return Graph(clique + tail, edges)
