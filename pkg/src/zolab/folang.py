"""First-order language over the image vocabulary, with a brute-force evaluator.

Vocabulary: unary ``C`` (the pixel is black) and binary successor relations
``U``, ``R``, ``D1``, ``D2`` for the four lattice directions, plus equality
and the guard atom ``dist>(x, y, K)`` (graph distance strictly greater
than K). Concrete syntax::

    formula    := quantified | binary
    quantified := ("forall" | "exists") var "." formula   # body extends right
    binary     := connectives !, &, |, ->, <-> with that precedence;
                  -> and <-> associate to the right, & and | to the left
    atom       := C(x) | U(x,y) | R(x,y) | D1(x,y) | D2(x,y)
                  | x = y | dist>(x,y,K)

``#`` starts a comment that runs to the end of the line. ``not`` is accepted
as a synonym for ``!``. The names C, U, R, D1, D2, dist, forall, exists and
not are reserved and cannot be used as variables.

Evaluation is Tarskian brute force: quantifiers range over the pixel set (or
over an explicit domain restriction), relations always use torus arithmetic.
Cost is O(n^(2q)) for q quantifiers; a work budget caps the number of
candidate bindings tried and raises WorkBudgetExceeded beyond it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

from .errors import (
    FormulaSyntaxError,
    UnassignedFreeVariable,
    UnboundVariable,
    WorkBudgetExceeded,
)
from .grid import Pixel, TorusGeometry
from .image import Image

# Offsets of the successor relations: S(x, y) holds iff y = x + offset.
REL_OFFSETS = {"U": (0, 1), "R": (1, 0), "D1": (1, 1), "D2": (1, -1)}

DEFAULT_WORK_BUDGET = 10_000_000


class Formula:
    """Base class of AST nodes."""

    __slots__ = ()

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Color(Formula):
    var: str


@dataclass(frozen=True)
class Rel(Formula):
    kind: str
    a: str
    b: str

    def __post_init__(self):
        if self.kind not in REL_OFFSETS:
            raise ValueError(f"unknown relation {self.kind!r}")


@dataclass(frozen=True)
class Eq(Formula):
    a: str
    b: str


@dataclass(frozen=True)
class DistGt(Formula):
    a: str
    b: str
    bound: int

    def __post_init__(self):
        if self.bound < 0:
            raise ValueError("distance bound must be >= 0")


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula


# ---------------------------------------------------------------------------
# Parsing

_KEYWORDS = {"forall", "exists", "not"}
_RESERVED = _KEYWORDS | {"C", "U", "R", "D1", "D2", "dist"}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<iff><->)
  | (?P<arrow>->)
  | (?P<distgt>dist>)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<int>\d+)
  | (?P<punct>[().,=&|!])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup != "ws":
            kind = m.lastgroup if m.lastgroup != "punct" else m.group()
            tokens.append(_Token(kind, m.group(), pos))
        pos = m.end()
    tokens.append(_Token("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def next(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str) -> _Token:
        tok = self.next()
        if tok.kind != kind:
            raise FormulaSyntaxError(f"expected {kind!r}, found {tok.text or 'end of input'!r}", tok.pos)
        return tok

    def parse_formula(self) -> Formula:
        return self.parse_iff()

    def parse_iff(self) -> Formula:
        left = self.parse_implies()
        if self.peek().kind == "iff":
            self.next()
            return Iff(left, self.parse_iff())
        return left

    def parse_implies(self) -> Formula:
        left = self.parse_or()
        if self.peek().kind == "arrow":
            self.next()
            return Implies(left, self.parse_implies())
        return left

    def parse_or(self) -> Formula:
        left = self.parse_and()
        while self.peek().kind == "|":
            self.next()
            left = Or(left, self.parse_and())
        return left

    def parse_and(self) -> Formula:
        left = self.parse_unary()
        while self.peek().kind == "&":
            self.next()
            left = And(left, self.parse_unary())
        return left

    def parse_unary(self) -> Formula:
        tok = self.peek()
        if tok.kind == "!" or (tok.kind == "ident" and tok.text == "not"):
            self.next()
            return Not(self.parse_unary())
        if tok.kind == "ident" and tok.text in ("forall", "exists"):
            self.next()
            var = self.parse_variable()
            self.expect(".")
            body = self.parse_formula()
            return Forall(var, body) if tok.text == "forall" else Exists(var, body)
        return self.parse_primary()

    def parse_primary(self) -> Formula:
        tok = self.peek()
        if tok.kind == "(":
            self.next()
            inner = self.parse_formula()
            self.expect(")")
            return inner
        if tok.kind == "distgt":
            self.next()
            self.expect("(")
            a = self.parse_variable()
            self.expect(",")
            b = self.parse_variable()
            self.expect(",")
            bound = int(self.expect("int").text)
            self.expect(")")
            return DistGt(a, b, bound)
        if tok.kind == "ident":
            if tok.text == "C":
                self.next()
                self.expect("(")
                v = self.parse_variable()
                self.expect(")")
                return Color(v)
            if tok.text in REL_OFFSETS:
                self.next()
                self.expect("(")
                a = self.parse_variable()
                self.expect(",")
                b = self.parse_variable()
                self.expect(")")
                return Rel(tok.text, a, b)
            # variable: must be an equality atom
            a = self.parse_variable()
            self.expect("=")
            b = self.parse_variable()
            return Eq(a, b)
        raise FormulaSyntaxError(f"expected a formula, found {tok.text or 'end of input'!r}", tok.pos)

    def parse_variable(self) -> str:
        tok = self.expect("ident")
        if tok.text in _RESERVED:
            raise FormulaSyntaxError(f"{tok.text!r} is reserved and cannot be a variable", tok.pos)
        return tok.text


def parse(text: str) -> Formula:
    """Parse concrete syntax into an AST; raises FormulaSyntaxError with position."""
    parser = _Parser(_tokenize(text))
    formula = parser.parse_formula()
    parser.expect("eof")
    return formula


# ---------------------------------------------------------------------------
# Printing

_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4, Not: 5}
_ATOM_PREC = 6


def _prec(f: Formula) -> int:
    if isinstance(f, (Forall, Exists)):
        # The body extends maximally rightward, so a quantified formula used
        # as an operand must be parenthesized; treat it as loosest.
        return 0
    return _PREC.get(type(f), _ATOM_PREC)


def to_text(f: Formula) -> str:
    """Concrete syntax that reparses to an equal AST, with minimal parentheses."""

    def wrap(sub: Formula, minimum: int) -> str:
        text = to_text(sub)
        return f"({text})" if _prec(sub) < minimum else text

    if isinstance(f, Color):
        return f"C({f.var})"
    if isinstance(f, Rel):
        return f"{f.kind}({f.a},{f.b})"
    if isinstance(f, Eq):
        return f"{f.a} = {f.b}"
    if isinstance(f, DistGt):
        return f"dist>({f.a},{f.b},{f.bound})"
    if isinstance(f, Not):
        return f"!{wrap(f.body, 5)}"
    if isinstance(f, And):
        return f"{wrap(f.left, 4)} & {wrap(f.right, 5)}"
    if isinstance(f, Or):
        return f"{wrap(f.left, 3)} | {wrap(f.right, 4)}"
    if isinstance(f, Implies):
        return f"{wrap(f.left, 3)} -> {wrap(f.right, 2)}"
    if isinstance(f, Iff):
        return f"{wrap(f.left, 2)} <-> {wrap(f.right, 1)}"
    if isinstance(f, Forall):
        return f"forall {f.var}. {to_text(f.body)}"
    if isinstance(f, Exists):
        return f"exists {f.var}. {to_text(f.body)}"
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Well-formedness and structural helpers

def free_variables(f: Formula) -> frozenset[str]:
    if isinstance(f, Color):
        return frozenset((f.var,))
    if isinstance(f, (Rel, Eq)):
        return frozenset((f.a, f.b))
    if isinstance(f, DistGt):
        return frozenset((f.a, f.b))
    if isinstance(f, Not):
        return free_variables(f.body)
    if isinstance(f, (And, Or, Implies, Iff)):
        return free_variables(f.left) | free_variables(f.right)
    if isinstance(f, (Forall, Exists)):
        return free_variables(f.body) - {f.var}
    raise TypeError(f"not a formula: {f!r}")


def check_sentence(f: Formula) -> None:
    """Raise UnboundVariable unless the formula is closed."""
    free = free_variables(f)
    if free:
        raise UnboundVariable(f"free variables in sentence: {', '.join(sorted(free))}")


def color_swap(f: Formula) -> Formula:
    """Exchange black and white: every color atom is negated."""
    if isinstance(f, Color):
        return Not(f)
    if isinstance(f, (Rel, Eq, DistGt)):
        return f
    if isinstance(f, Not):
        return Not(color_swap(f.body))
    if isinstance(f, (And, Or, Implies, Iff)):
        return type(f)(color_swap(f.left), color_swap(f.right))
    if isinstance(f, (Forall, Exists)):
        return type(f)(f.var, color_swap(f.body))
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Evaluation

class TorusStructure:
    """Pixel set of an image as a first-order structure (torus arithmetic).

    A domain restriction limits where quantifiers range; relation atoms keep
    their global torus semantics even across the domain boundary.
    """

    def __init__(self, img: Image, domain: Optional[Iterable[tuple[int, int]]] = None):
        self.n = img.n
        self.geometry = TorusGeometry(img.n)
        self._colors = img.pixels.reshape(-1).tolist()
        if domain is None:
            self.domain: tuple = tuple(Pixel(r, c) for r in range(img.n) for c in range(img.n))
        else:
            self.domain = tuple(Pixel(*p) for p in domain)

    def color(self, p) -> bool:
        return bool(self._colors[p[0] * self.n + p[1]])

    def rel(self, kind: str, a, b) -> bool:
        off = REL_OFFSETS[kind]
        n = self.n
        return b[0] == (a[0] + off[0]) % n and b[1] == (a[1] + off[1]) % n

    def dist_gt(self, a, b, bound: int) -> bool:
        return self.geometry.distance(a, b) > bound


_MISSING = object()


def compile_formula(f: Formula, structure) -> tuple[Callable[[dict], bool], Callable[[], None]]:
    """Compile to nested closures over ``structure``.

    Returns (evaluator, reset). The evaluator takes a mutable environment
    dict; reset() rearms the work budget, which charges one unit per
    candidate binding tried at a quantifier.
    """
    budget = getattr(structure, "work_budget", DEFAULT_WORK_BUDGET)
    counter = [0]

    def reset():
        counter[0] = 0

    def build(node: Formula) -> Callable[[dict], bool]:
        if isinstance(node, Color):
            var, color = node.var, structure.color
            return lambda env: color(env[var])
        if isinstance(node, Rel):
            kind, a, b, rel = node.kind, node.a, node.b, structure.rel
            return lambda env: rel(kind, env[a], env[b])
        if isinstance(node, Eq):
            a, b = node.a, node.b
            return lambda env: env[a] == env[b]
        if isinstance(node, DistGt):
            a, b, bound, dist_gt = node.a, node.b, node.bound, structure.dist_gt
            return lambda env: dist_gt(env[a], env[b], bound)
        if isinstance(node, Not):
            body = build(node.body)
            return lambda env: not body(env)
        if isinstance(node, And):
            left, right = build(node.left), build(node.right)
            return lambda env: left(env) and right(env)
        if isinstance(node, Or):
            left, right = build(node.left), build(node.right)
            return lambda env: left(env) or right(env)
        if isinstance(node, Implies):
            left, right = build(node.left), build(node.right)
            return lambda env: (not left(env)) or right(env)
        if isinstance(node, Iff):
            left, right = build(node.left), build(node.right)
            return lambda env: left(env) is right(env)
        if isinstance(node, (Forall, Exists)):
            var, body = node.var, build(node.body)
            domain = structure.domain
            looking_for = isinstance(node, Exists)

            def quantifier(env: dict) -> bool:
                old = env.get(var, _MISSING)
                try:
                    for p in domain:
                        counter[0] += 1
                        if counter[0] > budget:
                            raise WorkBudgetExceeded(
                                f"evaluation exceeded {budget} candidate bindings"
                            )
                        env[var] = p
                        if body(env) is looking_for:
                            return looking_for
                    return not looking_for
                finally:
                    if old is _MISSING:
                        env.pop(var, None)
                    else:
                        env[var] = old

            return quantifier
        raise TypeError(f"not a formula: {node!r}")

    return build(f), reset


def evaluate_on(structure, f: Formula, assignment: Optional[dict] = None) -> bool:
    """Evaluate over an arbitrary structure (internal entry point)."""
    env = {}
    if assignment:
        env.update({var: Pixel(*p) for var, p in assignment.items()})
    missing = free_variables(f) - set(env)
    if missing:
        raise UnassignedFreeVariable(f"unassigned free variables: {', '.join(sorted(missing))}")
    fn, reset = compile_formula(f, structure)
    reset()
    return fn(env)


def evaluate(
    img: Image,
    f: Formula,
    assignment: Optional[dict] = None,
    domain: Optional[Iterable[tuple[int, int]]] = None,
    work_budget: int = DEFAULT_WORK_BUDGET,
) -> bool:
    """Evaluate a formula on an image under an assignment of its free variables.

    Quantifiers range over ``domain`` (default: all pixels); assigned pixels
    must lie in the domain when one is given.
    """
    structure = TorusStructure(img, domain)
    structure.work_budget = work_budget
    if assignment and domain is not None:
        allowed = set(structure.domain)
        for var, p in assignment.items():
            if Pixel(*p) not in allowed:
                raise UnassignedFreeVariable(
                    f"assigned pixel for {var!r} lies outside the domain restriction"
                )
    return evaluate_on(structure, f, assignment)
