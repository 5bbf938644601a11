"""Formula AST, parser, and the memoized evaluator against a direct one."""

import itertools
import random

import pytest

from sparsemc import fo
from sparsemc.fo import (And, Edge, Eq, EvalError, Exists, Forall, Formula,
                         FormulaError, Label, Not, Or, distance_at_most,
                         distance_greater, distance_qrank, formula_size,
                         free_vars, naive_check, parse_formula, print_formula,
                         qrank, relativize, rename_bound_apart,
                         substitute_free)
from sparsemc.graphs import (Graph, LabeledGraph, as_labeled, ball,
                             cycle_graph, path_graph)


def direct_eval(g, phi, env):
    """Reference evaluator: plain recursion, no sharing, no memo."""
    match phi:
        case Edge(x, y):
            return g.has_edge(env[x], env[y])
        case Label(k, x):
            return g.has_label(k, env[x])
        case Eq(x, y):
            return env[x] == env[y]
        case Not(sub):
            return not direct_eval(g, sub, env)
        case And(a, b):
            return direct_eval(g, a, env) and direct_eval(g, b, env)
        case Or(a, b):
            return direct_eval(g, a, env) or direct_eval(g, b, env)
        case Exists(v, sub):
            return any(direct_eval(g, sub, {**env, v: w}) for w in g.vertices)
        case Forall(v, sub):
            return all(direct_eval(g, sub, {**env, v: w}) for w in g.vertices)
    raise TypeError(phi)


def random_formula(rng, variables, depth):
    if depth == 0 or rng.random() < 0.3:
        kind = rng.choice(["edge", "eq", "label"])
        x, y = rng.choice(variables), rng.choice(variables)
        if kind == "edge":
            return Edge(x, y)
        if kind == "eq":
            return Eq(x, y)
        return Label(1, x)
    kind = rng.choice(["not", "and", "or", "exists", "forall"])
    if kind == "not":
        return Not(random_formula(rng, variables, depth - 1))
    if kind in ("and", "or"):
        cls = And if kind == "and" else Or
        return cls(random_formula(rng, variables, depth - 1),
                   random_formula(rng, variables, depth - 1))
    cls = Exists if kind == "exists" else Forall
    v = rng.choice(variables)
    return cls(v, random_formula(rng, variables, depth - 1))


def random_labeled_graph(rng, max_n=6):
    n = rng.randint(1, max_n)
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    edges = [p for p in pairs if rng.random() < 0.4]
    labels = [{v for v in range(1, n + 1) if rng.random() < 0.5}]
    return LabeledGraph(Graph(n, edges), labels)


class TestStructure:
    def test_qrank(self):
        assert qrank(Edge("x", "y")) == 0
        assert qrank(Exists("x", Forall("y", Edge("x", "y")))) == 2
        assert qrank(And(Exists("x", Eq("x", "x")), Eq("y", "y"))) == 1

    def test_free_vars(self):
        phi = Exists("x", And(Edge("x", "y"), Label(1, "z")))
        assert free_vars(phi) == frozenset({"y", "z"})
        assert free_vars(Forall("y", phi)) == frozenset({"z"})

    def test_formula_size_counts_printed_tokens(self):
        assert formula_size(Edge("x", "y")) == 6  # E ( x , y )
        assert formula_size(Eq("x", "y")) == 3
        assert formula_size(Not(Eq("x", "y"))) == 4
        small, big = Edge("x", "y"), Exists("v", And(Edge("x", "v"), Eq("v", "y")))
        assert formula_size(big) > formula_size(small)


class TestParser:
    @pytest.mark.parametrize("text", [
        "E(x, y)",
        "x = y",
        "P1(x)",
        "~ E(x, x)",
        "(E(x, y) & P2(y))",
        "(E(x, y) | ~ x = y)",
        "exists v. E(v, v)",
        "forall a. exists b. (E(a, b) & ~ a = b)",
        "distgt 3 (x, y)",
    ])
    def test_parse_print_round_trip(self, text):
        phi = parse_formula(text)
        assert parse_formula(print_formula(phi)) == phi

    def test_distance_sugar_matches_builder_semantics(self):
        parsed = parse_formula("distgt 2 (x, y)")
        built = distance_greater(2, "x", "y")
        g = as_labeled(path_graph(5))
        for u, v in itertools.product(g.vertices, repeat=2):
            env = {"x": u, "y": v}
            assert naive_check(g, parsed, env) == naive_check(g, built, env)
            assert naive_check(g, parsed, env) == (abs(u - v) > 2)

    @pytest.mark.parametrize("text", [
        "", "E(x)", "E(x, y) &", "(E(x, y)", "exists x E(x, x)",
        "exists E. E(x, y)", "P0(x)", "Q(x)", "distgt x (y, z)",
        "x == y", "(E(x,y) & E(y,z) & E(z,x))", "forall x.",
    ])
    def test_parse_errors(self, text):
        with pytest.raises(FormulaError):
            parse_formula(text)

    def test_expected_free_enforced(self):
        parse_formula("E(x, y)", expected_free=frozenset({"x", "y"}))
        with pytest.raises(FormulaError):
            parse_formula("E(x, y)", expected_free=frozenset({"x"}))

    def test_error_carries_position(self):
        with pytest.raises(FormulaError) as err:
            parse_formula("exists v E(v, v)")
        assert "position" in str(err.value)


class TestEvaluation:
    def test_memoized_matches_direct_on_random_inputs(self):
        rng = random.Random(99)
        for _ in range(120):
            g = random_labeled_graph(rng)
            phi = random_formula(rng, ["x", "y", "z"], rng.randint(1, 4))
            env = {v: rng.randint(1, g.n) for v in free_vars(phi)}
            assert naive_check(g, phi, env) == direct_eval(g, phi, env)

    def test_closed_sentences_need_no_assignment(self):
        g = as_labeled(path_graph(3))
        assert naive_check(g, parse_formula("exists x. exists y. E(x, y)"))
        assert not naive_check(g, parse_formula("forall x. forall y. E(x, y)"))

    def test_unassigned_free_variable_raises(self):
        with pytest.raises(EvalError):
            naive_check(as_labeled(path_graph(2)), Edge("x", "y"), {"x": 1})

    def test_bad_label_index_raises(self):
        with pytest.raises(EvalError):
            naive_check(as_labeled(path_graph(2)), Label(1, "x"), {"x": 1})

    def test_empty_graph_quantifiers(self):
        g = as_labeled(Graph(0, []))
        assert not naive_check(g, Exists("x", Eq("x", "x")))
        assert naive_check(g, Forall("x", Edge("x", "x")))


class TestDistanceEncoding:
    def test_qrank_table(self):
        assert [distance_qrank(k) for k in range(7)] == [0, 0, 1, 2, 2, 3, 3]

    @pytest.mark.parametrize("k", range(5))
    def test_distance_at_most_on_path(self, k):
        g = as_labeled(path_graph(6))
        phi = distance_at_most(k, "x", "y")
        assert qrank(phi) == distance_qrank(k)
        for u in g.vertices:
            for v in g.vertices:
                want = abs(u - v) <= k
                assert naive_check(g, phi, {"x": u, "y": v}) == want

    def test_distance_greater_is_negation(self):
        g = as_labeled(cycle_graph(7))
        gt = distance_greater(2, "x", "y")
        le = distance_at_most(2, "x", "y")
        for u, v in [(1, 2), (1, 4), (3, 3), (2, 7)]:
            env = {"x": u, "y": v}
            assert naive_check(g, gt, env) == (not naive_check(g, le, env))


class TestTransforms:
    def test_substitute_free_semantics(self):
        g = as_labeled(path_graph(4))
        phi = Exists("z", And(Edge("x", "z"), Edge("z", "y")))
        swapped = substitute_free(phi, {"x": "y", "y": "x"})
        for u, v in itertools.product(g.vertices, repeat=2):
            assert (naive_check(g, phi, {"x": u, "y": v})
                    == naive_check(g, swapped, {"x": v, "y": u}))

    def test_substitute_refuses_capture(self):
        phi = Exists("y", Edge("x", "y"))
        with pytest.raises(FormulaError):
            substitute_free(phi, {"x": "y"})
        # renaming bound variables apart first makes the same substitution legal
        safe = substitute_free(rename_bound_apart(phi, avoid=frozenset({"y"})),
                               {"x": "y"})
        g = as_labeled(Graph(2, [(1, 2)]))
        # "y has a neighbor" must not collapse to "exists y. E(y, y)"
        assert naive_check(g, safe, {"y": 1})

    def test_rename_bound_apart(self):
        phi = And(Exists("v", Edge("v", "x")), Exists("v", Eq("v", "x")))
        renamed = rename_bound_apart(phi, avoid=frozenset({"x"}))
        g = as_labeled(path_graph(3))
        for u in g.vertices:
            assert (naive_check(g, phi, {"x": u})
                    == naive_check(g, renamed, {"x": u}))

    def test_relativize_equals_ball_evaluation(self):
        rng = random.Random(7)
        for _ in range(60):
            g = random_labeled_graph(rng, max_n=7)
            body = random_formula(rng, ["x", "y", "z"], rng.randint(1, 3))
            # close y and z so x is the only possible free variable
            phi = Exists("y", Exists("z", body))
            r = rng.randint(0, 2)
            rel = relativize(phi, "x", r)
            for v in g.vertices:
                b = ball(g, v, r)
                want = naive_check(b.induced, phi, {"x": b.local_index(v)})
                got = naive_check(g, rel, {"x": v})
                assert got == want, (g, print_formula(phi), r, v)
