"""Rank-q types against a direct back-and-forth game decider."""

import itertools
import random

import pytest

from sparsemc.graphs import (Graph, LabeledGraph, as_labeled, complete_graph,
                             cycle_graph, path_graph)
from sparsemc.qtypes import TypeContext, compute_qtype, qtype_equal, tuple_type_id


def game_equivalent(g, u, h, v, q) -> bool:
    """Reference decider: the duplicator wins the q-round game iff the
    tuples agree atomically and every single-vertex extension on either
    side can be matched on the other."""
    atomic_g = _atomic(g, u)
    atomic_h = _atomic(h, v)
    if atomic_g != atomic_h:
        return False
    if q == 0:
        return True
    for a in g.vertices:
        if not any(game_equivalent(g, u + (a,), h, v + (b,), q - 1)
                   for b in h.vertices):
            return False
    for b in h.vertices:
        if not any(game_equivalent(g, u + (a,), h, v + (b,), q - 1)
                   for a in g.vertices):
            return False
    return True


def _atomic(g, u):
    labs = tuple(tuple(g.has_label(k, x) for k in range(1, g.num_labels + 1))
                 for x in u)
    rel = tuple((u[i] == u[j], g.has_edge(u[i], u[j]))
                for i in range(len(u)) for j in range(i + 1, len(u)))
    return labs, rel


def random_labeled(rng, max_n=4, labels=1):
    n = rng.randint(1, max_n)
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    edges = [p for p in pairs if rng.random() < 0.5]
    labs = [{v for v in range(1, n + 1) if rng.random() < 0.4}
            for _ in range(labels)]
    return LabeledGraph(Graph(n, edges), labs)


class TestAgainstGameOracle:
    def test_random_pairs_all_ranks(self):
        rng = random.Random(424242)
        ctx = TypeContext()
        for _ in range(160):
            g = random_labeled(rng)
            h = random_labeled(rng)
            q = rng.randint(0, 3)
            ku = rng.randint(0, 2)
            u = tuple(rng.randint(1, g.n) for _ in range(ku))
            v = tuple(rng.randint(1, h.n) for _ in range(ku))
            want = game_equivalent(g, u, h, v, q)
            got = compute_qtype(g, u, q, ctx).tid == compute_qtype(h, v, q, ctx).tid
            assert got == want, (g, u, h, v, q)

    def test_unlabeled_pairs(self):
        rng = random.Random(77)
        ctx = TypeContext()
        for _ in range(60):
            g = as_labeled(random_labeled(rng, max_n=4, labels=0))
            h = as_labeled(random_labeled(rng, max_n=4, labels=0))
            q = rng.randint(0, 3)
            want = game_equivalent(g, (), h, (), q)
            got = qtype_equal(compute_qtype(g, (), q, ctx),
                              compute_qtype(h, (), q, ctx))
            assert got == want


class TestInvariance:
    def test_isomorphic_relabelings_same_type(self):
        rng = random.Random(5)
        ctx = TypeContext()
        for _ in range(40):
            g = random_labeled(rng, max_n=6)
            perm = list(range(1, g.n + 1))
            rng.shuffle(perm)
            mapping = {v: perm[v - 1] for v in g.vertices}
            h = LabeledGraph(
                Graph(g.n, [(mapping[a], mapping[b]) for a, b in g.edges()]),
                [{mapping[v] for v in cls} for cls in g.labels])
            for q in range(3):
                assert qtype_equal(compute_qtype(g, (), q, ctx),
                                   compute_qtype(h, (), q, ctx))
            u = tuple(rng.randint(1, g.n) for _ in range(2))
            vu = tuple(mapping[x] for x in u)
            assert (compute_qtype(g, u, 2, ctx).tid
                    == compute_qtype(h, vu, 2, ctx).tid)

    def test_types_refine_with_rank(self):
        # equal rank-q types imply equal rank-(q-1) types
        rng = random.Random(11)
        ctx = TypeContext()
        for _ in range(60):
            g, h = random_labeled(rng), random_labeled(rng)
            for q in (1, 2, 3):
                same_q = (compute_qtype(g, (), q, ctx).tid
                          == compute_qtype(h, (), q, ctx).tid)
                same_prev = (compute_qtype(g, (), q - 1, ctx).tid
                             == compute_qtype(h, (), q - 1, ctx).tid)
                assert not same_q or same_prev


class TestKnownSeparations:
    def test_path_vs_clique(self):
        ctx = TypeContext()
        p3 = as_labeled(path_graph(3))
        k3 = as_labeled(complete_graph(3))
        assert qtype_equal(compute_qtype(p3, (), 1, ctx),
                           compute_qtype(k3, (), 1, ctx))
        assert not qtype_equal(compute_qtype(p3, (), 2, ctx),
                               compute_qtype(k3, (), 2, ctx))

    def test_cycle_vs_two_triangles(self):
        c6 = as_labeled(cycle_graph(6))
        two_k3 = as_labeled(Graph(6, [(1, 2), (2, 3), (1, 3),
                                      (4, 5), (5, 6), (4, 6)]))
        ctx = TypeContext()
        for q in range(4):
            want = game_equivalent(c6, (), two_k3, (), q)
            got = qtype_equal(compute_qtype(c6, (), q, ctx),
                              compute_qtype(two_k3, (), q, ctx))
            assert got == want
        # triangles are locally distinguishable with three moves
        assert not qtype_equal(compute_qtype(c6, (), 3, ctx),
                               compute_qtype(two_k3, (), 3, ctx))

    def test_tuple_order_matters(self):
        g = as_labeled(path_graph(3))
        ctx = TypeContext()
        assert (compute_qtype(g, (1, 2), 1, ctx).tid
                != compute_qtype(g, (2, 1), 1, ctx).tid)


class TestContract:
    def test_handle_fields(self):
        g = as_labeled(path_graph(4))
        t = compute_qtype(g, (2,), 2)
        assert (t.rank, t.arity, t.alphabet) == (2, 1, 0)

    def test_cross_context_comparison_rejected(self):
        g = as_labeled(path_graph(3))
        a = compute_qtype(g, (), 1, TypeContext())
        b = compute_qtype(g, (), 1, TypeContext())
        with pytest.raises(ValueError):
            qtype_equal(a, b)

    def test_mismatched_rank_or_arity_rejected(self):
        g = as_labeled(path_graph(3))
        ctx = TypeContext()
        with pytest.raises(ValueError):
            qtype_equal(compute_qtype(g, (), 1, ctx),
                        compute_qtype(g, (), 2, ctx))
        with pytest.raises(ValueError):
            qtype_equal(compute_qtype(g, (1,), 1, ctx),
                        compute_qtype(g, (), 1, ctx))

    def test_negative_rank_rejected(self):
        with pytest.raises(ValueError):
            compute_qtype(as_labeled(path_graph(2)), (), -1)

    def test_tuple_type_id_matches_compute_qtype(self):
        g = as_labeled(path_graph(5))
        ctx = TypeContext()
        adj = [0] * (g.n + 1)
        for u, v in g.edges():
            adj[u] |= 1 << (v - 1)
            adj[v] |= 1 << (u - 1)
        labs = [0] * (g.n + 1)
        tid = tuple_type_id(g.n, tuple(adj), tuple(labs), (3,), 2, ctx)
        assert tid == compute_qtype(g, (3,), 2, ctx).tid
