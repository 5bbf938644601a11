"""Random graph generators with reproducible seeded streams.

All generators draw from ``numpy.random.Generator(PCG64(seed))`` so runs
are platform-independent. For the independent-pair models (uniform and
weighted-pair) edge decisions consume exactly one double per vertex pair
in lexicographic (i < j) order; blockwise draws produce the same stream
as scalar draws, so vectorization does not change results.

Conventions fixed here:

* power-law weights: w_i = c * (n/i)^(1/(alpha-1)), heaviest first.
* stub matching: a uniform perfect matching on the stub multiset via one
  seeded shuffle, consecutive pairs matched; an odd stub total is fixed
  by incrementing the last (lightest) weight by one, which is logged.
* preferential attachment: the single-edge process grows mn vertices,
  where at step t the new vertex attaches to an endpoint chosen with
  probability proportional to degree with the new vertex's own pending
  stub counted (so a self-loop forms with probability 1/(2t-1)); blocks
  of m consecutive vertices are then collapsed into one.
* erasure: self-loops dropped, parallel edges merged.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .graphs import Graph

logger = logging.getLogger(__name__)


def power_law_weights(n: int, alpha: float, c: float = 1.0) -> np.ndarray:
    """Weights w_i = c * (n/i)^(1/(alpha-1)) for i = 1..n (index 0 is w_1)."""
    if alpha <= 2:
        raise ValueError("power-law exponent must exceed 2")
    if n < 1:
        raise ValueError("n must be positive")
    if c <= 0:
        raise ValueError("weight scale c must be positive")
    i = np.arange(1, n + 1, dtype=np.float64)
    return c * (n / i) ** (1.0 / (alpha - 1.0))


def integer_power_law_weights(n: int, alpha: float, c: float = 1.0) -> list[int]:
    """Power-law weights rounded to integers, floored at 1 (stub counts)."""
    w = power_law_weights(n, alpha, c)
    return [max(1, int(round(x))) for x in w]


def chung_lu_precondition_ok(n: int, alpha: float, c: float = 1.0) -> bool:
    """True when max w_i^2 <= sum w_k, the regime where min(1, .) never clips."""
    w = power_law_weights(n, alpha, c)
    return bool(w[0] * w[0] <= w.sum())


def _erase(n: int, endpoint_pairs) -> Graph:
    """Simple graph from multigraph edge list: drop loops, merge multiedges."""
    keys = set()
    for u, v in endpoint_pairs:
        if u == v:
            continue
        keys.add((u, v) if u < v else (v, u))
    return Graph(n, sorted(keys))


def _pair_model(n: int, row_prob, seed: int) -> Graph:
    """Independent pairs in lexicographic order; row_prob(i) gives the
    probability vector for pairs (i, i+1..n)."""
    rng = np.random.Generator(np.random.PCG64(seed))
    edges = []
    for i in range(1, n):
        draws = rng.random(n - i)
        hits = np.nonzero(draws < row_prob(i))[0]
        for off in hits:
            edges.append((i, i + 1 + int(off)))
    return Graph(n, edges)


def gen_er(n: int, p: float, seed: int) -> Graph:
    """Uniform model: every pair independently an edge with probability p."""
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"edge probability {p} outside [0,1]")
    return _pair_model(n, lambda i: p, seed)


def gen_chung_lu(n: int, alpha: float, c: float, seed: int) -> Graph:
    """Weighted-pair model: pair (i,j) is an edge with probability
    min(1, w_i w_j / sum w)."""
    w = power_law_weights(n, alpha, c)
    total = w.sum()
    if w[0] * w[0] > total:
        logger.warning(
            "weighted-pair model outside its precondition: max w^2 = %.3f > sum w = %.3f "
            "(probabilities clipped at 1)", float(w[0] * w[0]), float(total))

    def row(i: int) -> np.ndarray:
        return np.minimum(1.0, w[i - 1] * w[i:] / total)

    return _pair_model(n, row, seed)


def gen_config(n: int, weights, seed: int) -> tuple[Graph, list[int]]:
    """Stub-matching model: ``weights[i-1]`` stubs at vertex i, matched by
    one seeded shuffle into a uniform perfect matching, then erased.

    Returns (graph, pre_erasure_degrees). The pre-erasure degree of
    vertex i equals its (parity-fixed) weight by construction.
    """
    ws = [int(x) for x in weights]
    if len(ws) != n:
        raise ValueError(f"expected {n} weights, got {len(ws)}")
    if any(x < 0 for x in ws):
        raise ValueError("weights must be nonnegative integers")
    if sum(ws) % 2 == 1:
        logger.info("odd stub total; incrementing the last weight to pair up")
        ws[-1] += 1
    stubs = np.repeat(np.arange(1, n + 1, dtype=np.int64), ws)
    rng = np.random.Generator(np.random.PCG64(seed))
    rng.shuffle(stubs)
    pairs = stubs.reshape(-1, 2)
    return _erase(n, ((int(a), int(b)) for a, b in pairs)), ws


def pa_multigraph(n: int, m: int, seed: int) -> list[tuple[int, int]]:
    """The collapsed multigraph edge list of the attachment process:
    exactly m*n edges on vertices 1..n (loops and repeats included)."""
    if n < 1 or m < 1:
        raise ValueError("n and m must be positive")
    steps = m * n
    rng = np.random.Generator(np.random.PCG64(seed))
    uniforms = rng.random(steps)
    # endpoint pool: each fine-grained vertex appears once per unit of degree
    pool: list[int] = []
    fine_edges: list[tuple[int, int]] = []
    for t in range(1, steps + 1):
        k = int(uniforms[t - 1] * (2 * t - 1))
        target = pool[k] if k < len(pool) else t
        fine_edges.append((t, target))
        pool.append(t)
        pool.append(target)
    return [((a + m - 1) // m, (b + m - 1) // m) for a, b in fine_edges]


def gen_pa(n: int, m: int, seed: int) -> Graph:
    """Preferential attachment with parameter m, collapsed and erased."""
    return _erase(n, pa_multigraph(n, m, seed))


def parse_probability_expr(expr: str, n: int) -> float:
    """Evaluate an edge-probability expression: FLOAT or FLOAT/n."""
    text = expr.strip()
    try:
        if text.endswith("/n"):
            value = float(text[:-2]) / n
        else:
            value = float(text)
    except ValueError:
        raise ValueError(f"bad probability expression {expr!r}: use FLOAT or FLOAT/n") from None
    if not (0.0 <= value <= 1.0):
        raise ValueError(f"probability expression {expr!r} evaluates to {value} outside [0,1] at n={n}")
    return value


@dataclass(frozen=True)
class ModelSpec:
    """A generator choice with its parameters and seed.

    kind: "er" (p_expr), "chung-lu" (alpha, c), "config" (alpha, c for
    integer weights), or "pa" (m).
    """

    kind: str
    seed: int = 0
    p_expr: str | None = None
    alpha: float | None = None
    c: float = 1.0
    m: int | None = None

    def validate(self) -> None:
        if self.kind == "er":
            if self.p_expr is None:
                raise ValueError("er model needs p")
        elif self.kind in ("chung-lu", "config"):
            if self.alpha is None:
                raise ValueError(f"{self.kind} model needs alpha")
            if self.alpha <= 2:
                raise ValueError("alpha must exceed 2")
        elif self.kind == "pa":
            if self.m is None or self.m < 1:
                raise ValueError("pa model needs m >= 1")
        else:
            raise ValueError(f"unknown model kind {self.kind!r}")

    def describe(self) -> str:
        self.validate()
        if self.kind == "er":
            return f"er p={self.p_expr}"
        if self.kind == "chung-lu":
            return f"chung-lu alpha={self.alpha:g} c={self.c:g}"
        if self.kind == "config":
            return f"config alpha={self.alpha:g} c={self.c:g}"
        return f"pa m={self.m}"


def parse_model_desc(text: str, seed: int = 0) -> ModelSpec:
    """Inverse of ModelSpec.describe(): parse "er p=2/n",
    "chung-lu alpha=3 c=1", "config alpha=2.5 c=2", "pa m=2"."""
    parts = text.split()
    if not parts:
        raise ValueError("empty model description")
    kind, kv = parts[0], {}
    for item in parts[1:]:
        if "=" not in item:
            raise ValueError(f"expected key=value, got {item!r} in {text!r}")
        key, _, value = item.partition("=")
        if key in kv:
            raise ValueError(f"duplicate key {key!r} in {text!r}")
        kv[key] = value
    def take(key, conv):
        return conv(kv.pop(key)) if key in kv else None
    if kind == "er":
        spec = ModelSpec(kind="er", seed=seed, p_expr=take("p", str))
    elif kind in ("chung-lu", "config"):
        c = take("c", float)
        spec = ModelSpec(kind=kind, seed=seed, alpha=take("alpha", float),
                         c=1.0 if c is None else c)
    elif kind == "pa":
        spec = ModelSpec(kind="pa", seed=seed, m=take("m", int))
    else:
        raise ValueError(f"unknown model kind {kind!r}")
    if kv:
        raise ValueError(f"unknown keys {sorted(kv)} for model {kind!r}")
    spec.validate()
    return spec


def generate(spec: ModelSpec, n: int) -> Graph:
    """Generate a graph of order n from the model spec (seed from spec)."""
    spec.validate()
    if spec.kind == "er":
        return gen_er(n, parse_probability_expr(spec.p_expr, n), spec.seed)
    if spec.kind == "chung-lu":
        return gen_chung_lu(n, spec.alpha, spec.c, spec.seed)
    if spec.kind == "config":
        g, _ = gen_config(n, integer_power_law_weights(n, spec.alpha, spec.c), spec.seed)
        return g
    return gen_pa(n, spec.m, spec.seed)
