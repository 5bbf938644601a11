"""Local-normal-form sentences: boolean combinations of basic local
sentences.

A basic local sentence asserts that s vertices exist, pairwise at
distance greater than 2r, each satisfying a one-free-variable formula
omega interpreted inside its own radius-r ball. The text format is
line-based:

    # survey: two far-apart high-degree vertices
    bls hubs r 2 s 2 omega "exists y. E(x,y)"
    sentence hubs

    bls a r 1 s 3 omega "P1(x)"
    bls b r 0 s 1 omega "~exists y. E(x,y)"
    sentence (a & ~b)

``expand_to_fo`` rewrites a basic local sentence into an ordinary
closed formula (distance conjuncts plus ball-relativized copies of
omega), which serves as an independent oracle for the structured
evaluator: slow to check, but trusting nothing beyond the naive
semantics.
"""

from __future__ import annotations

import shlex
from dataclasses import dataclass

from . import fo
from .fo import Formula, FormulaError, parse_formula, print_formula


@dataclass(frozen=True)
class BasicLocalSentence:
    """s vertices, pairwise further than 2r apart, each satisfying
    omega (free variable x) in its radius-r ball."""

    name: str
    r: int
    s: int
    omega: Formula

    def __post_init__(self):
        if self.r < 0:
            raise ValueError("radius r must be nonnegative")
        if self.s < 1:
            raise ValueError("count s must be at least 1")
        fv = fo.free_vars(self.omega)
        if fv != frozenset({"x"}):
            raise ValueError(f"omega must have exactly the free variable x, got {set(fv) or '{}'}")


# boolean expression over named basic local sentences
@dataclass(frozen=True)
class BoolVar:
    name: str


@dataclass(frozen=True)
class BoolNot:
    sub: "BoolExpr"


@dataclass(frozen=True)
class BoolAnd:
    left: "BoolExpr"
    right: "BoolExpr"


@dataclass(frozen=True)
class BoolOr:
    left: "BoolExpr"
    right: "BoolExpr"


BoolExpr = BoolVar | BoolNot | BoolAnd | BoolOr


@dataclass(frozen=True)
class GnfSentence:
    locals: tuple          # BasicLocalSentence, in file order
    expr: BoolExpr

    def local_by_name(self, name: str) -> BasicLocalSentence:
        for b in self.locals:
            if b.name == name:
                return b
        raise KeyError(name)


def eval_expr(expr: BoolExpr, values: dict) -> bool:
    match expr:
        case BoolVar(name):
            return values[name]
        case BoolNot(sub):
            return not eval_expr(sub, values)
        case BoolAnd(a, b):
            return eval_expr(a, values) and eval_expr(b, values)
        case BoolOr(a, b):
            return eval_expr(a, values) or eval_expr(b, values)
    raise TypeError(f"not a boolean expression: {expr!r}")


def expr_names(expr: BoolExpr) -> frozenset:
    match expr:
        case BoolVar(name):
            return frozenset({name})
        case BoolNot(sub):
            return expr_names(sub)
        case BoolAnd(a, b) | BoolOr(a, b):
            return expr_names(a) | expr_names(b)
    raise TypeError(f"not a boolean expression: {expr!r}")


class GnfFormatError(ValueError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def _parse_bool_expr(text: str, line_no: int) -> BoolExpr:
    toks = []
    i = 0
    while i < len(text):
        c = text[i]
        if c.isspace():
            i += 1
        elif c in "()~&|":
            toks.append(c)
            i += 1
        elif c.isalnum() or c == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(text[i:j])
            i = j
        else:
            raise GnfFormatError(line_no, f"unexpected character {c!r} in sentence")
    pos = 0

    def peek():
        return toks[pos] if pos < len(toks) else None

    def take():
        nonlocal pos
        t = peek()
        if t is None:
            raise GnfFormatError(line_no, "unexpected end of sentence")
        pos += 1
        return t

    def expr() -> BoolExpr:
        t = take()
        if t == "~":
            return BoolNot(expr())
        if t == "(":
            left = expr()
            op = take()
            if op not in ("&", "|"):
                raise GnfFormatError(line_no, f"expected & or | inside parentheses, got {op!r}")
            right = expr()
            if take() != ")":
                raise GnfFormatError(line_no, "expected closing parenthesis")
            return BoolAnd(left, right) if op == "&" else BoolOr(left, right)
        if t in (")", "&", "|"):
            raise GnfFormatError(line_no, f"sentence cannot start a term with {t!r}")
        return BoolVar(t)

    out = expr()
    if pos != len(toks):
        raise GnfFormatError(line_no, f"trailing tokens after sentence: {' '.join(toks[pos:])}")
    return out


def parse_gnf(text: str) -> GnfSentence:
    """Parse the line format: any number of ``bls`` lines then one
    ``sentence`` line; ``#`` comments and blank lines are ignored."""
    locals_: list[BasicLocalSentence] = []
    names = set()
    sentence_expr = None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("bls"):
            try:
                parts = shlex.split(line, comments=True)
            except ValueError as e:
                raise GnfFormatError(line_no, str(e)) from None
            if len(parts) != 8 or parts[0] != "bls" or parts[2] != "r" or \
                    parts[4] != "s" or parts[6] != "omega":
                raise GnfFormatError(
                    line_no, 'expected: bls <name> r <int> s <int> omega "<formula>"')
            name = parts[1]
            if name in names:
                raise GnfFormatError(line_no, f"duplicate name {name!r}")
            try:
                r, s = int(parts[3]), int(parts[5])
            except ValueError:
                raise GnfFormatError(line_no, "r and s must be integers") from None
            try:
                omega = parse_formula(parts[7], expected_free={"x"})
            except FormulaError as e:
                raise GnfFormatError(line_no, f"bad omega: {e}") from None
            try:
                locals_.append(BasicLocalSentence(name=name, r=r, s=s, omega=omega))
            except ValueError as e:
                raise GnfFormatError(line_no, str(e)) from None
            names.add(name)
        elif line.startswith("sentence"):
            if sentence_expr is not None:
                raise GnfFormatError(line_no, "second sentence line")
            sentence_expr = _parse_bool_expr(line[len("sentence"):], line_no)
        else:
            raise GnfFormatError(line_no, f"unknown directive: {line.split()[0]!r}")
    if sentence_expr is None:
        raise GnfFormatError(0, "missing sentence line")
    missing = expr_names(sentence_expr) - names
    if missing:
        raise GnfFormatError(0, f"sentence references undefined names: {sorted(missing)}")
    return GnfSentence(locals=tuple(locals_), expr=sentence_expr)


def _format_expr(expr: BoolExpr) -> str:
    match expr:
        case BoolVar(name):
            return name
        case BoolNot(sub):
            return "~" + _format_expr(sub)
        case BoolAnd(a, b):
            return f"({_format_expr(a)} & {_format_expr(b)})"
        case BoolOr(a, b):
            return f"({_format_expr(a)} | {_format_expr(b)})"
    raise TypeError(f"not a boolean expression: {expr!r}")


def format_gnf(sentence: GnfSentence) -> str:
    lines = [
        f'bls {b.name} r {b.r} s {b.s} omega "{print_formula(b.omega)}"'
        for b in sentence.locals
    ]
    lines.append(f"sentence {_format_expr(sentence.expr)}")
    return "\n".join(lines) + "\n"


def expand_to_fo(b: BasicLocalSentence) -> Formula:
    """The basic local sentence as one ordinary closed formula: existential
    block, pairwise distance-greater-than-2r conjuncts, and a copy of
    omega relativized to each witness's radius-r ball."""
    xs = [f"x{i}" for i in range(1, b.s + 1)]
    clean = fo.rename_bound_apart(b.omega, avoid=set(xs) | {"x"})
    conjuncts: list[Formula] = []
    for i in range(b.s):
        for j in range(i + 1, b.s):
            conjuncts.append(fo.distance_greater(2 * b.r, xs[i], xs[j]))
    for x in xs:
        conjuncts.append(fo.relativize(fo.substitute_free(clean, {"x": x}), x, b.r))
    body = conjuncts[0]
    for c in conjuncts[1:]:
        body = fo.And(body, c)
    for x in reversed(xs):
        body = fo.Exists(x, body)
    return body


def gnf_to_fo(sentence: GnfSentence) -> Formula:
    """The whole sentence as one closed formula (oracle use only; its
    size grows with s and the distance thresholds)."""

    def go(expr: BoolExpr) -> Formula:
        match expr:
            case BoolVar(name):
                return expand_to_fo(sentence.local_by_name(name))
            case BoolNot(sub):
                return fo.Not(go(sub))
            case BoolAnd(a, bb):
                return fo.And(go(a), go(bb))
            case BoolOr(a, bb):
                return fo.Or(go(a), go(bb))
        raise TypeError(f"not a boolean expression: {expr!r}")

    return go(sentence.expr)
