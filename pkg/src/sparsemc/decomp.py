"""Prefix partitions of sparse graphs and their exact verifiers.

The canonical partition of a graph on vertices 1..n (heaviest first)
with budget b and robustness mu splits the vertex order into a head
A = {1..b}, a middle B = {b+1..b^mu} and a tail C (all saturating at n).
The partition is (b, r, mu)-admissible when

* property 3: every radius-(40*mu*r) neighborhood of G[B∪C] has
  edge-excess (|E| - |V|) at most mu^2, and
* property 4: every radius-(20*mu*r) neighborhood of G[C] has at most
  mu edges into A.

Neighborhood checks reduce exactly to per-center balls: a connected
subgraph of a connected graph has no larger cycle space, so the ball
around a neighborhood's center dominates its excess, and edge counts
into A are monotone under taking subsets. One level up, whole
components dominate their balls the same way, which gives a cheap exact
screen: only components with excess (or A-edge count) over the cap need
per-vertex balls at all.

``minimal_b`` scans b = 1, 2, ... (pass/fail is not monotone in b
because growing A can add new edges into A). The scan is made
affordable by two exact facts: the maximum component excess of G minus
a prefix is non-increasing in the prefix length b (computed for all b
in one reverse union-find sweep), and the maximum ball excess is
likewise non-increasing in b (shrinking universes shrink balls), so the
property-3 pass region is a suffix of the b axis found by walking down
from the screen threshold.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

from .graphs import Graph, base_graph, bfs_ball_members, connected_components


def saturating_power(b: int, mu: int, cap: int) -> int:
    """min(b**mu, cap) without forming huge intermediates."""
    out = 1
    for _ in range(mu):
        out *= b
        if out >= cap:
            return cap
    return out


@dataclass(frozen=True)
class PartitionParams:
    b: int
    r: int
    mu: int

    def __post_init__(self):
        if self.b < 1:
            raise ValueError("budget b must be at least 1")
        if self.r < 1:
            raise ValueError("radius r must be at least 1")
        if self.mu < 1:
            raise ValueError("robustness mu must be at least 1")

    @property
    def excess_radius(self) -> int:
        return 40 * self.mu * self.r

    @property
    def head_edge_radius(self) -> int:
        return 20 * self.mu * self.r

    @property
    def excess_cap(self) -> int:
        return self.mu * self.mu


@dataclass(frozen=True)
class CanonicalPartition:
    """Prefix split: A = {1..b}, B = {b+1..b_mu}, C = {b_mu+1..n}."""

    n: int
    b: int
    b_mu: int

    @classmethod
    def of(cls, n: int, b: int, mu: int) -> "CanonicalPartition":
        return cls(n=n, b=min(b, n), b_mu=saturating_power(b, mu, n))

    @property
    def head(self) -> range:
        return range(1, self.b + 1)

    @property
    def middle(self) -> range:
        return range(self.b + 1, self.b_mu + 1)

    @property
    def tail(self) -> range:
        return range(self.b_mu + 1, self.n + 1)


@dataclass(frozen=True)
class BrmuVerdict:
    ok: bool
    partition: CanonicalPartition
    failed_property: int | None = None  # 3 or 4
    center: int | None = None
    value: int | None = None


def _restricted_ball(adj, inside, center: int, radius: int) -> list[int]:
    """BFS ball members within the ``inside`` boolean table."""
    seen = {center}
    frontier = deque([(center, 0)])
    while frontier:
        v, d = frontier.popleft()
        if d == radius:
            continue
        for w in adj[v]:
            if w not in seen and inside[w]:
                seen.add(w)
                frontier.append((w, d + 1))
    return list(seen)


def _excess(adj, inside_members: set, members) -> int:
    edges = 0
    for v in members:
        for w in adj[v]:
            if w in inside_members and w > v:
                edges += 1
    return edges - len(members)


def excess_first_violation(g, universe, radius: int, cap: int):
    """First center (ascending) in ``universe`` whose radius-ball induced
    in the universe has edge-excess > cap, with that excess; None if no
    violation. Exact, with the component screen as a fast path."""
    base = base_graph(g)
    adj = base._adj
    inside = [False] * (base.n + 1)
    for v in universe:
        inside[v] = True
    comps = connected_components(base, universe=universe)
    bad: list[list[int]] = []
    for comp in comps:
        cs = set(comp)
        if _excess(adj, cs, comp) > cap:
            bad.append(comp)
    if not bad:
        return None
    candidates = sorted(v for comp in bad for v in comp)
    for v in candidates:
        members = _restricted_ball(adj, inside, v, radius)
        exc = _excess(adj, set(members), members)
        if exc > cap:
            return (v, exc)
    return None


def head_edges_first_violation(g, universe, radius: int, cap: int, head_size: int):
    """First center (ascending) in ``universe`` whose radius-ball induced
    in the universe touches more than ``cap`` edges into {1..head_size}."""
    base = base_graph(g)
    adj = base._adj
    inside = [False] * (base.n + 1)
    for v in universe:
        inside[v] = True
    head_deg = {v: sum(1 for w in adj[v] if w <= head_size) for v in universe}
    comps = connected_components(base, universe=universe)
    bad = [comp for comp in comps if sum(head_deg[v] for v in comp) > cap]
    if not bad:
        return None
    candidates = sorted(v for comp in bad for v in comp)
    for v in candidates:
        members = _restricted_ball(adj, inside, v, radius)
        count = sum(head_deg[w] for w in members)
        if count > cap:
            return (v, count)
    return None


def verify_brmu_partition(g, params: PartitionParams) -> BrmuVerdict:
    """Check the canonical prefix partition; on failure report the first
    violating center (property 3 centers before property 4, ascending)."""
    base = base_graph(g)
    part = CanonicalPartition.of(base.n, params.b, params.mu)
    hit = excess_first_violation(
        base, range(part.b + 1, base.n + 1), params.excess_radius, params.excess_cap)
    if hit is not None:
        return BrmuVerdict(False, part, failed_property=3, center=hit[0], value=hit[1])
    if part.b_mu < base.n:
        hit = head_edges_first_violation(
            base, range(part.b_mu + 1, base.n + 1), params.head_edge_radius,
            params.mu, part.b)
        if hit is not None:
            return BrmuVerdict(False, part, failed_property=4, center=hit[0], value=hit[1])
    return BrmuVerdict(True, part)


def _suffix_max_component_excess(base: Graph) -> list:
    """sweep[b] = max component edge-excess of G[{b+1..n}] for b = 0..n,
    by adding vertices in decreasing order into a union-find."""
    n = base.n
    parent = list(range(n + 1))
    verts = [0] * (n + 1)
    edges = [0] * (n + 1)

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    sweep = [-math.inf] * (n + 1)
    cur = -math.inf
    for v in range(n, 0, -1):
        verts[v] = 1
        cur = max(cur, -1)
        for w in base.neighbors(v):
            if w > v:
                rv, rw = find(v), find(w)
                if rv == rw:
                    edges[rv] += 1
                else:
                    parent[rw] = rv
                    verts[rv] += verts[rw]
                    edges[rv] += edges[rw] + 1
                cur = max(cur, edges[find(v)] - verts[find(v)])
        sweep[v - 1] = cur
    return sweep


def minimal_b(g, r: int, mu: int) -> int:
    """Smallest b whose canonical partition passes, by linear scan.

    Worst case O(n*m) (per-b fallbacks on adversarial shapes); on the
    intended random instances the sweep plus screens make it near
    linear. mu = 1 keeps property 4 alive for every b and is the slow
    case (documented, not used by the harness defaults).
    """
    base = base_graph(g)
    n = base.n
    if n == 0:
        return 1
    params0 = PartitionParams(b=1, r=r, mu=mu)
    cap = params0.excess_cap
    sweep = _suffix_max_component_excess(base)
    b_screen = next(b for b in range(n + 1) if sweep[b] <= cap)
    b_screen = max(1, b_screen)
    # exact property-3 boundary: walk down while balls still pass
    b_p3 = b_screen
    while b_p3 > 1 and excess_first_violation(
            base, range(b_p3, n + 1), params0.excess_radius, cap) is None:
        b_p3 -= 1
    for b in range(b_p3, n + 1):
        b_mu = saturating_power(b, mu, n)
        if b_mu >= n:
            return b
        if head_edges_first_violation(
                base, range(b_mu + 1, n + 1), params0.head_edge_radius, mu, b) is None:
            return b
    return n


# --- peeling and the protrusion skeleton ---

def peel_degree_one(g) -> frozenset:
    """Iterated removal of vertices of degree <= 1 (isolated remnants
    included): the complement of the 2-core. Order-independent; every
    component of G[Z] is a tree with at most one edge to the rest."""
    base = base_graph(g)
    deg = [0] * (base.n + 1)
    queue = deque()
    for v in base.vertices:
        deg[v] = base.degree(v)
        if deg[v] <= 1:
            queue.append(v)
    removed = [False] * (base.n + 1)
    while queue:
        v = queue.popleft()
        if removed[v]:
            continue
        removed[v] = True
        for w in base.neighbors(v):
            if not removed[w]:
                deg[w] -= 1
                if deg[w] <= 1:
                    queue.append(w)
    return frozenset(v for v in base.vertices if removed[v])


@dataclass(frozen=True)
class ProtrusionSkeleton:
    """Peel set Z, low-degree set P, the components of G[P] with their
    outside boundaries, and the family of small boundaries."""

    z: frozenset
    p: frozenset
    degree_threshold: int
    components: tuple            # tuple of sorted vertex tuples
    boundaries: tuple            # aligned tuple of frozensets (subsets of V minus P,Z)
    small_boundaries: frozenset  # deduped boundaries of size <= mu


def protrusion_skeleton(g, r: int, mu: int, z: frozenset | None = None,
                        excluded=frozenset()) -> ProtrusionSkeleton:
    """``excluded`` vertices are kept out of the low-degree set P (they
    end up in boundaries instead), so surgery never touches them."""
    base = base_graph(g)
    if z is None:
        z = peel_degree_one(base)
    threshold = r * mu ** 7 + mu
    rest = [v for v in base.vertices if v not in z]
    rest_set = set(rest)
    p = frozenset(
        v for v in rest
        if v not in excluded
        and sum(1 for w in base.neighbors(v) if w in rest_set) <= threshold)
    comps = connected_components(base, universe=p)
    boundaries = []
    for comp in comps:
        bd = set()
        for v in comp:
            for w in base.neighbors(v):
                if w not in p and w not in z:
                    bd.add(w)
        boundaries.append(frozenset(bd))
    small = frozenset(bd for bd in boundaries if len(bd) <= mu)
    return ProtrusionSkeleton(
        z=frozenset(z), p=p, degree_threshold=threshold,
        components=tuple(tuple(c) for c in comps),
        boundaries=tuple(boundaries), small_boundaries=small)


@dataclass(frozen=True)
class PartitionCheck:
    ok: bool
    failed_property: int | None = None
    detail: str = ""


def verify_protrusion_partition(g, x, y, z, b: int, r: int, mu: int) -> PartitionCheck:
    """Check the five defining properties of a local protrusion
    partition (X, Y, Z), reporting the first failure (1: cover or
    overlap, 2: |X| budget, 3: Y components, 4: Z components, 5:
    boundary family size)."""
    base = base_graph(g)
    xs, ys, zs = frozenset(x), frozenset(y), frozenset(z)
    if xs & ys or xs & zs or ys & zs:
        return PartitionCheck(False, 1, "parts overlap")
    if xs | ys | zs != frozenset(base.vertices):
        return PartitionCheck(False, 1, "parts do not cover the vertex set")
    budget = saturating_power(b, mu, base.n + 1)
    if len(xs) > budget:
        return PartitionCheck(False, 2, f"|X| = {len(xs)} exceeds {budget}")
    size_cap = r * mu ** 7
    for comp in connected_components(base, universe=ys):
        if len(comp) > size_cap:
            return PartitionCheck(False, 3, f"Y component of size {len(comp)} exceeds {size_cap}")
        touched = {w for v in comp for w in base.neighbors(v) if w in xs}
        if len(touched) > mu:
            return PartitionCheck(False, 3, f"Y component sees {len(touched)} X-vertices, cap {mu}")
    for comp in connected_components(base, universe=zs):
        cs = set(comp)
        inner = sum(1 for v in comp for w in base.neighbors(v) if w in cs and w > v)
        if inner != len(comp) - 1:
            return PartitionCheck(False, 4, f"Z component on {len(comp)} vertices has {inner} edges (not a tree)")
        out = sum(1 for v in comp for w in base.neighbors(v) if w in xs or w in ys)
        if out > 1:
            return PartitionCheck(False, 4, f"Z component has {out} outgoing edges")
    bds = set()
    for comp in connected_components(base, universe=ys | zs):
        bds.add(frozenset(w for v in comp for w in base.neighbors(v) if w in xs))
    if len(bds) > budget:
        return PartitionCheck(False, 5, f"{len(bds)} distinct boundaries exceed {budget}")
    return PartitionCheck(True)


# --- degree-regime reference quantities ---

def d_hat(alpha: float, n: int) -> float:
    """Reference second-order degree scale: 2 above exponent 3, ln n at
    exactly 3, n^(3-alpha) below 3. Natural logarithm by convention."""
    if alpha <= 2:
        raise ValueError("exponent must exceed 2")
    if n < 1:
        raise ValueError("n must be positive")
    if alpha > 3:
        return 2.0
    if alpha == 3:
        return math.log(n)
    return float(n) ** (3.0 - alpha)


def d_tilde_exponent_class(alpha: float) -> str:
    if alpha <= 2:
        raise ValueError("exponent must exceed 2")
    if alpha > 3:
        return "constant"
    if alpha == 3:
        return "logarithmic"
    return "polynomial"
