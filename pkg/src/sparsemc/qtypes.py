"""Rank-q equivalence types of tuples, as hash-consed nested sets.

The rank-q type of (G, u) is defined back-and-forth style:

* rank 0: the atomic table of the tuple u — per-vertex label sets plus,
  for each pair of positions, whether the entries are equal or adjacent;
* rank q+1: the pair (atomic table of u, set of rank-q types of u.v over
  all vertices v of G).

Two tuples satisfy exactly the same formulas of quantifier rank <= q
with the tuple's arity of free variables iff their rank-q types agree
(the standard Ehrenfeucht–Fraïssé correspondence over finite relational
structures with equality).

Types are interned in a ``TypeContext``: structurally equal types get
the same small integer id, so equality tests are O(1) and type
computation over a graph memoizes on (tuple, rank). Ids are only
meaningful within one context; ``canonical()`` gives a context-free
nested form (sorted, so stable across runs) for persistence tests —
its size grows with the number of distinct child types per level, so
use it on small instances only.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .graphs import LabeledGraph, base_graph


class TypeContext:
    """Interning table for types plus a shared representative cache."""

    def __init__(self):
        self._intern: dict[tuple, int] = {}
        self._children: dict[int, tuple] = {}  # tid -> (rank, atomic, frozenset of child tids)
        self._canon: dict[int, tuple] = {}
        self.rep_cache: dict = {}    # keyed by target type id
        self.shape_cache: dict = {}  # keyed by exact part shape
        self.cand_cache: dict = {}   # candidate graph -> boundary type id

    def intern(self, rank: int, atomic: tuple, children: frozenset | None) -> int:
        key = (rank, atomic, children)
        tid = self._intern.get(key)
        if tid is None:
            tid = len(self._intern)
            self._intern[key] = tid
            self._children[tid] = key
        return tid

    def children_of(self, tid: int):
        """Child-type ids of an interned rank>=1 type (None at rank 0)."""
        return self._children[tid][2]

    def canonical(self, tid: int) -> tuple:
        got = self._canon.get(tid)
        if got is None:
            rank, atomic, children = self._children[tid]
            if children is None:
                got = ("atom", atomic)
            else:
                got = ("node", atomic, tuple(sorted(self.canonical(c) for c in children)))
            self._canon[tid] = got
        return got


@dataclass(frozen=True, eq=False)
class QType:
    """A rank-q type handle; compare with ``qtype_equal``."""

    rank: int
    arity: int
    alphabet: int
    tid: int
    ctx: TypeContext = field(repr=False)

    def canonical(self) -> tuple:
        """Context-free nested form (exponential in rank; test-sized only)."""
        return (self.rank, self.arity, self.alphabet, self.ctx.canonical(self.tid))


def qtype_equal(a: QType, b: QType) -> bool:
    """Id equality after guarding comparability.

    Raises ValueError when ranks, arities, alphabets or contexts differ —
    such types are not comparable, and silently returning False would
    mask bugs.
    """
    if a.ctx is not b.ctx:
        raise ValueError("types from different contexts are not comparable; share a TypeContext")
    if a.rank != b.rank:
        raise ValueError(f"rank mismatch: {a.rank} vs {b.rank}")
    if a.arity != b.arity:
        raise ValueError(f"arity mismatch: {a.arity} vs {b.arity}")
    if a.alphabet != b.alphabet:
        raise ValueError(f"alphabet mismatch: {a.alphabet} vs {b.alphabet}")
    return a.tid == b.tid


def _graph_bits(g: LabeledGraph) -> tuple[list[int], list[int]]:
    base = base_graph(g)
    n = base.n
    adj_bits = [0] * (n + 1)
    for v in range(1, n + 1):
        mask = 0
        for w in base.neighbors(v):
            mask |= 1 << (w - 1)
        adj_bits[v] = mask
    labels = g.labels if isinstance(g, LabeledGraph) else ()
    lab_bits = [0] * (n + 1)
    for k, cls in enumerate(labels):
        bit = 1 << k
        for v in cls:
            lab_bits[v] |= bit
    return adj_bits, lab_bits


def _atomic(adj_bits, lab_bits, tup: tuple) -> tuple:
    labs = tuple(lab_bits[v] for v in tup)
    rel = []
    for i in range(len(tup)):
        vi = tup[i]
        for j in range(i + 1, len(tup)):
            vj = tup[j]
            if vi == vj:
                rel.append(1)
            elif adj_bits[vi] >> (vj - 1) & 1:
                rel.append(2)
            else:
                rel.append(0)
    return (labs, tuple(rel))


def tuple_type_id(n: int, adj_bits, lab_bits, u: tuple, q: int,
                  ctx: TypeContext, memo: dict | None = None) -> int:
    """Raw-array core: type id of tuple u in the graph given as bitmask
    rows (index 0 unused). Callers that test many candidate graphs
    against one target use this directly to skip Graph construction;
    pass a fresh memo per graph."""
    if memo is None:
        memo = {}

    def typ(tup: tuple, rank: int) -> int:
        key = (tup, rank)
        tid = memo.get(key)
        if tid is not None:
            return tid
        if rank == 0:
            tid = ctx.intern(0, _atomic(adj_bits, lab_bits, tup), None)
        else:
            children = frozenset(typ(tup + (v,), rank - 1) for v in range(1, n + 1))
            tid = ctx.intern(rank, _atomic(adj_bits, lab_bits, tup), children)
        memo[key] = tid
        return tid

    return typ(tuple(u), q)


def compute_qtype(g, u: tuple, q: int, ctx: TypeContext | None = None) -> QType:
    """Rank-q type of the tuple u in g (memoized over subtuples).

    Cost is O(n^q) tuple extensions, each O(arity + n). The empty tuple
    gives the rank-q theory of the whole graph.
    """
    if q < 0:
        raise ValueError("rank must be nonnegative")
    lg = g if isinstance(g, LabeledGraph) else LabeledGraph(g)
    n = lg.n
    u = tuple(u)
    for v in u:
        if not (1 <= v <= n):
            raise ValueError(f"tuple entry {v} outside 1..{n}")
    if ctx is None:
        ctx = TypeContext()
    adj_bits, lab_bits = _graph_bits(lg)
    tid = tuple_type_id(n, adj_bits, lab_bits, u, q, ctx)
    return QType(rank=q, arity=len(u), alphabet=lg.num_labels, tid=tid, ctx=ctx)
