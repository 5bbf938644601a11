"""First-order formulas over graphs: AST, parser, printer, evaluator.

Signature: binary edge relation ``E``, unary labels ``P1..Pl``, equality.
Concrete syntax (ASCII)::

    E(x,y)   Pk(x)   x=y   ~f   (f & g)   (f | g)
    exists v. f      forall v. f      distgt k (x,y)

``distgt k (x,y)`` is sugar for "distance greater than k": it expands at
parse time into the negation of a midpoint-split distance formula

    d_0(x,y) := x=y
    d_1(x,y) := (x=y | E(x,y))
    d_k(x,y) := exists z. (d_ceil(k/2)(x,z) & d_floor(k/2)(z,y))

so the expansion's quantifier rank is ceil(log2 k) for k >= 2 and 0 for
k in {0, 1} (see ``distance_qrank``).

``naive_check`` evaluates by recursive enumeration of vertices at each
quantifier, memoizing each subformula on the values of its free
variables, which leaves semantics untouched but caps the cost at
O(#nodes * n^(max free vars + 1)) instead of n^(quantifier count).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from math import ceil, log2


@dataclass(frozen=True)
class Edge:
    x: str
    y: str


@dataclass(frozen=True)
class Label:
    k: int
    x: str


@dataclass(frozen=True)
class Eq:
    x: str
    y: str


@dataclass(frozen=True)
class Not:
    sub: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    sub: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    sub: "Formula"


Formula = Edge | Label | Eq | Not | And | Or | Exists | Forall


class FormulaError(ValueError):
    """Parse or well-formedness error, with position information."""


class EvalError(ValueError):
    """Evaluation-time error: unassigned variable or bad label index."""


def qrank(phi: Formula) -> int:
    """Quantifier rank: deepest quantifier nesting."""
    match phi:
        case Edge() | Label() | Eq():
            return 0
        case Not(sub):
            return qrank(sub)
        case And(a, b) | Or(a, b):
            return max(qrank(a), qrank(b))
        case Exists(_, sub) | Forall(_, sub):
            return 1 + qrank(sub)
    raise TypeError(f"not a formula: {phi!r}")


def free_vars(phi: Formula) -> frozenset:
    match phi:
        case Edge(x, y) | Eq(x, y):
            return frozenset((x, y))
        case Label(_, x):
            return frozenset((x,))
        case Not(sub):
            return free_vars(sub)
        case And(a, b) | Or(a, b):
            return free_vars(a) | free_vars(b)
        case Exists(v, sub) | Forall(v, sub):
            return free_vars(sub) - {v}
    raise TypeError(f"not a formula: {phi!r}")


def print_formula(phi: Formula) -> str:
    """Canonical text; ``parse_formula(print_formula(f)) == f``."""
    match phi:
        case Edge(x, y):
            return f"E({x},{y})"
        case Label(k, x):
            return f"P{k}({x})"
        case Eq(x, y):
            return f"{x}={y}"
        case Not(sub):
            return f"~{print_formula(sub)}"
        case And(a, b):
            return f"({print_formula(a)} & {print_formula(b)})"
        case Or(a, b):
            return f"({print_formula(a)} | {print_formula(b)})"
        case Exists(v, sub):
            return f"exists {v}. {print_formula(sub)}"
        case Forall(v, sub):
            return f"forall {v}. {print_formula(sub)}"
    raise TypeError(f"not a formula: {phi!r}")


def formula_size(phi: Formula) -> int:
    """Size |phi| = token count of the canonical printed form."""
    return len(_tokenize(print_formula(phi)))


# --- distance sugar ---

def distance_at_most(k: int, x: str, y: str) -> Formula:
    """Pure-FO formula for dist(x,y) <= k (midpoint splitting)."""
    if k < 0:
        raise ValueError("distance bound must be nonnegative")
    if k == 0:
        return Eq(x, y)
    if k == 1:
        return Or(Eq(x, y), Edge(x, y))
    mid = _fresh_var({x, y})
    a = (k + 1) // 2
    return Exists(mid, And(distance_at_most(a, x, mid), distance_at_most(k - a, mid, y)))


def distance_greater(k: int, x: str, y: str) -> Formula:
    return Not(distance_at_most(k, x, y))


def distance_qrank(k: int) -> int:
    """Quantifier rank of the distgt-k expansion: ceil(log2 k), 0 for k<=1."""
    return 0 if k <= 1 else ceil(log2(k))


_fresh_counter = 0


def _fresh_var(avoid) -> str:
    global _fresh_counter
    while True:
        _fresh_counter += 1
        name = f"_v{_fresh_counter}"
        if name not in avoid:
            return name


def rename_bound_apart(phi: Formula, avoid=frozenset()) -> Formula:
    """Rename every bound variable to a fresh name (capture-free)."""
    avoid = set(avoid) | free_vars(phi)

    def walk(node: Formula, env: dict) -> Formula:
        match node:
            case Edge(x, y):
                return Edge(env.get(x, x), env.get(y, y))
            case Eq(x, y):
                return Eq(env.get(x, x), env.get(y, y))
            case Label(k, x):
                return Label(k, env.get(x, x))
            case Not(sub):
                return Not(walk(sub, env))
            case And(a, b):
                return And(walk(a, env), walk(b, env))
            case Or(a, b):
                return Or(walk(a, env), walk(b, env))
            case Exists(v, sub):
                fresh = _fresh_var(avoid)
                avoid.add(fresh)
                return Exists(fresh, walk(sub, {**env, v: fresh}))
            case Forall(v, sub):
                fresh = _fresh_var(avoid)
                avoid.add(fresh)
                return Forall(fresh, walk(sub, {**env, v: fresh}))
        raise TypeError(f"not a formula: {node!r}")

    return walk(phi, {})


def substitute_free(phi: Formula, mapping: dict) -> Formula:
    """Rename free occurrences of variables per ``mapping``; binders
    shadow as usual. Raises FormulaError when a replacement name would
    be captured by a binder (rename bound variables apart first)."""

    def walk(node: Formula, active: dict) -> Formula:
        match node:
            case Edge(x, y):
                return Edge(active.get(x, x), active.get(y, y))
            case Eq(x, y):
                return Eq(active.get(x, x), active.get(y, y))
            case Label(k, x):
                return Label(k, active.get(x, x))
            case Not(sub):
                return Not(walk(sub, active))
            case And(a, b):
                return And(walk(a, active), walk(b, active))
            case Or(a, b):
                return Or(walk(a, active), walk(b, active))
            case Exists(v, sub) | Forall(v, sub):
                inner = {k: w for k, w in active.items() if k != v}
                if v in inner.values():
                    raise FormulaError(
                        f"substitution would capture {v!r}; rename bound variables apart first")
                out = walk(sub, inner)
                return Exists(v, out) if isinstance(node, Exists) else Forall(v, out)
        raise TypeError(f"not a formula: {node!r}")

    return walk(phi, dict(mapping))


def relativize(phi: Formula, anchor: str, radius: int) -> Formula:
    """Restrict every quantifier to the radius-ball around ``anchor``:
    evaluating the result on G equals evaluating ``phi`` on the induced
    ball around the anchor's value. Bound variables are renamed apart
    first so rebinding of the anchor name cannot capture the guards."""
    clean = rename_bound_apart(phi, avoid={anchor})

    def walk(node: Formula) -> Formula:
        match node:
            case Edge() | Eq() | Label():
                return node
            case Not(sub):
                return Not(walk(sub))
            case And(a, b):
                return And(walk(a), walk(b))
            case Or(a, b):
                return Or(walk(a), walk(b))
            case Exists(v, sub):
                return Exists(v, And(distance_at_most(radius, v, anchor), walk(sub)))
            case Forall(v, sub):
                return Forall(v, Or(Not(distance_at_most(radius, v, anchor)), walk(sub)))
        raise TypeError(f"not a formula: {node!r}")

    return walk(clean)


# --- parser ---

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<lpar>\()|(?P<rpar>\))|(?P<comma>,)|(?P<dot>\.)|(?P<eq>=)"
    r"|(?P<nott>~)|(?P<andd>&)|(?P<orr>\|)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<num>\d+))"
)

_KEYWORDS = {"exists", "forall", "distgt"}


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            rest = text[pos:].lstrip()
            if not rest:
                break
            raise FormulaError(f"unexpected character {rest[0]!r} at position {pos}")
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    return tokens


def _describe(tok) -> str:
    return repr(tok[1]) if tok[1] else "end of input"


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else ("eof", "", len(self.text))

    def next(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, kind: str, what: str):
        tok = self.next()
        if tok[0] != kind:
            raise FormulaError(f"expected {what} at position {tok[2]}, found {_describe(tok)}")
        return tok

    def parse(self) -> Formula:
        phi = self.formula()
        tok = self.peek()
        if tok[0] != "eof":
            raise FormulaError(f"trailing input at position {tok[2]}: {tok[1]!r}")
        return phi

    def formula(self) -> Formula:
        kind, value, pos = self.peek()
        if kind == "nott":
            self.next()
            return Not(self.formula())
        if kind == "lpar":
            self.next()
            left = self.formula()
            op = self.next()
            if op[0] not in ("andd", "orr"):
                raise FormulaError(f"expected '&' or '|' at position {op[2]}, found {_describe(op)}")
            right = self.formula()
            self.expect("rpar", "')'")
            return And(left, right) if op[0] == "andd" else Or(left, right)
        if kind == "name":
            if value in ("exists", "forall"):
                self.next()
                var = self.variable()
                self.expect("dot", "'.'")
                body = self.formula()
                return Exists(var, body) if value == "exists" else Forall(var, body)
            if value == "distgt":
                self.next()
                ktok = self.expect("num", "a distance bound")
                k = int(ktok[1])
                self.expect("lpar", "'('")
                x = self.variable()
                self.expect("comma", "','")
                y = self.variable()
                self.expect("rpar", "')'")
                return distance_greater(k, x, y)
            if value == "E":
                self.next()
                self.expect("lpar", "'('")
                x = self.variable()
                self.expect("comma", "','")
                y = self.variable()
                self.expect("rpar", "')'")
                return Edge(x, y)
            if re.fullmatch(r"P\d+", value):
                self.next()
                k = int(value[1:])
                if k < 1:
                    raise FormulaError(f"label index must be at least 1 at position {pos}")
                self.expect("lpar", "'('")
                x = self.variable()
                self.expect("rpar", "')'")
                return Label(k, x)
            # variable: must be an equality atom
            x = self.variable()
            self.expect("eq", "'='")
            y = self.variable()
            return Eq(x, y)
        raise FormulaError(f"expected a formula at position {pos}, found {_describe((kind, value, pos))}")

    def variable(self) -> str:
        tok = self.expect("name", "a variable")
        name = tok[1]
        if name in _KEYWORDS or name == "E" or re.fullmatch(r"P\d+", name):
            raise FormulaError(f"{name!r} is reserved and cannot be a variable (position {tok[2]})")
        return name


def parse_formula(text: str, expected_free=None) -> Formula:
    """Parse a formula. When ``expected_free`` is given, free variables
    must be a subset of it (so sentences pass expected_free=())."""
    phi = _Parser(text).parse()
    if expected_free is not None:
        extra = free_vars(phi) - frozenset(expected_free)
        if extra:
            names = ", ".join(sorted(extra))
            raise FormulaError(f"unbound variable(s): {names}")
    return phi


# --- evaluation ---

def naive_check(g, phi: Formula, assignment=None) -> bool:
    """Tarskian evaluation on a Graph or LabeledGraph.

    ``assignment`` maps free variable names to vertices. Raises
    ``EvalError`` for unassigned free variables, out-of-range vertices,
    or label indices outside the graph's alphabet.
    """
    from .graphs import LabeledGraph

    labels = g.labels if isinstance(g, LabeledGraph) else ()
    base = g.graph if isinstance(g, LabeledGraph) else g
    n = base.n
    env = dict(assignment or {})
    missing = free_vars(phi) - env.keys()
    if missing:
        raise EvalError(f"unassigned free variable(s): {', '.join(sorted(missing))}")
    for var, vtx in env.items():
        if not (1 <= vtx <= n):
            raise EvalError(f"assignment maps {var} to {vtx}, outside 1..{n}")

    fv_cache: dict[int, tuple[str, ...]] = {}

    def fv(node: Formula) -> tuple[str, ...]:
        got = fv_cache.get(id(node))
        if got is None:
            got = tuple(sorted(free_vars(node)))
            fv_cache[id(node)] = got
        return got

    memo: dict[tuple, bool] = {}

    def ev(node: Formula) -> bool:
        key = (id(node),) + tuple(env[v] for v in fv(node))
        got = memo.get(key)
        if got is not None:
            return got
        match node:
            case Edge(x, y):
                res = base.has_edge(env[x], env[y])
            case Eq(x, y):
                res = env[x] == env[y]
            case Label(k, x):
                if k > len(labels):
                    raise EvalError(f"label index {k} outside the graph's alphabet of size {len(labels)}")
                res = env[x] in labels[k - 1]
            case Not(sub):
                res = not ev(sub)
            case And(a, b):
                res = ev(a) and ev(b)
            case Or(a, b):
                res = ev(a) or ev(b)
            case Exists(v, sub):
                saved = env.get(v)
                res = False
                for w in range(1, n + 1):
                    env[v] = w
                    if ev(sub):
                        res = True
                        break
                if saved is None:
                    env.pop(v, None)
                else:
                    env[v] = saved
            case Forall(v, sub):
                saved = env.get(v)
                res = True
                for w in range(1, n + 1):
                    env[v] = w
                    if not ev(sub):
                        res = False
                        break
                if saved is None:
                    env.pop(v, None)
                else:
                    env[v] = saved
            case _:
                raise TypeError(f"not a formula: {node!r}")
        memo[key] = res
        return res

    return ev(phi)
