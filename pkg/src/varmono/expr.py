"""Exact symbolic expressions: parsing, differentiation, substitution,
complex evaluation, canonical normalization and a zero-test oracle.

Expressions are immutable trees over named variables with Gaussian-rational
constants, the four arithmetic operations, integer powers, unary negation
and the transcendental heads exp/log/sin/cos.  ``normalize`` rewrites the
rational fragment into an expanded numerator/denominator canonical form
(graded-lex monomial order); transcendental subterms are kept as opaque
atoms with normalized arguments.  Cancellation such as z/z -> 1 silently
shrinks the domain; removed poles are not tracked.
"""

from __future__ import annotations

import cmath
import enum
import random
import re as _re
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .exact import Atom, GaussRat, Poly, RatFun

__all__ = [
    "Expression", "Const", "Var", "Add", "Sub", "Mul", "Div", "Pow", "Neg",
    "Call", "VariableContext", "Verdict", "ExpressionError", "ParseError",
    "UnknownVariableError", "PoleError", "DomainError", "IndeterminateError",
    "ZeroDenominatorError", "parse", "to_text", "differentiate", "substitute",
    "evaluate", "normalize", "is_zero", "free_variables", "equivalent",
    "rational", "gaussian", "ZERO", "ONE", "I",
]

FUNCTION_HEADS = ("exp", "log", "sin", "cos")

_POLE_EPS = 1e-300
_ZERO_TEST_TOL = 1e-9
_ZERO_TEST_POINTS = 20
_ZERO_TEST_SEED = 52_81_29


class ExpressionError(Exception):
    """Base class for expression-layer failures."""


class ParseError(ExpressionError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnknownVariableError(ParseError):
    def __init__(self, name: str, position: int):
        ParseError.__init__(self, f"unknown variable '{name}'", position)
        self.name = name


class PoleError(ExpressionError):
    """Evaluation hit a pole (divisor magnitude below 1e-300)."""


class DomainError(ExpressionError):
    """Evaluation left the domain of a transcendental head (log at 0)."""


class IndeterminateError(ExpressionError):
    """Every sample point of the probabilistic zero test hit a pole."""


class ZeroDenominatorError(ExpressionError):
    """Normalization encountered division by an identically zero expression."""


class Verdict(enum.Enum):
    EXACT_ZERO = "exact_zero"
    PROBABLY_ZERO = "probably_zero"
    NONZERO = "nonzero"


_VERDICT_RANK = {Verdict.EXACT_ZERO: 0, Verdict.PROBABLY_ZERO: 1, Verdict.NONZERO: 2}


def worst_verdict(*verdicts: Verdict) -> Verdict:
    return max(verdicts, key=_VERDICT_RANK.__getitem__)


# ---------------------------------------------------------------------------
# nodes

@dataclass(frozen=True)
class Expression:
    """Immutable expression tree node; subclasses carry the payload."""

    def __add__(self, other):
        return Add(self, _coerce(other))

    def __radd__(self, other):
        return Add(_coerce(other), self)

    def __sub__(self, other):
        return Sub(self, _coerce(other))

    def __rsub__(self, other):
        return Sub(_coerce(other), self)

    def __mul__(self, other):
        return Mul(self, _coerce(other))

    def __rmul__(self, other):
        return Mul(_coerce(other), self)

    def __truediv__(self, other):
        return Div(self, _coerce(other))

    def __rtruediv__(self, other):
        return Div(_coerce(other), self)

    def __pow__(self, exponent: int):
        return Pow(self, exponent)

    def __neg__(self):
        return Neg(self)

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class Const(Expression):
    value: GaussRat


@dataclass(frozen=True)
class Var(Expression):
    name: str


@dataclass(frozen=True)
class Add(Expression):
    left: Expression
    right: Expression


@dataclass(frozen=True)
class Sub(Expression):
    left: Expression
    right: Expression


@dataclass(frozen=True)
class Mul(Expression):
    left: Expression
    right: Expression


@dataclass(frozen=True)
class Div(Expression):
    left: Expression
    right: Expression


@dataclass(frozen=True)
class Pow(Expression):
    base: Expression
    exponent: int

    def __post_init__(self):
        if not isinstance(self.exponent, int):
            raise TypeError("power exponent must be an int")


@dataclass(frozen=True)
class Neg(Expression):
    operand: Expression


@dataclass(frozen=True)
class Call(Expression):
    head: str
    arg: Expression

    def __post_init__(self):
        if self.head not in FUNCTION_HEADS:
            raise ValueError(f"unknown function head {self.head!r}")


def _coerce(value) -> Expression:
    if isinstance(value, Expression):
        return value
    if isinstance(value, (int, Fraction, GaussRat)):
        return Const(GaussRat.coerce(value))
    raise TypeError(f"cannot use {type(value).__name__} as an expression operand")


def rational(numerator: int, denominator: int = 1) -> Const:
    return Const(GaussRat(Fraction(numerator, denominator)))


def gaussian(re, im=0) -> Const:
    return Const(GaussRat(re, im))


ZERO = rational(0)
ONE = rational(1)
I = gaussian(0, 1)


_IDENT_RE = _re.compile(r"[A-Za-z][A-Za-z0-9_]*")


@dataclass(frozen=True)
class VariableContext:
    """Ordered list of distinct variable names; dimension m = len(names)."""

    names: tuple[str, ...]

    def __init__(self, names):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ValueError("variable names must be unique")
        for n in names:
            if not _IDENT_RE.fullmatch(n):
                raise ValueError(f"invalid variable name {n!r}")
        object.__setattr__(self, "names", names)

    @property
    def dimension(self) -> int:
        return len(self.names)

    def __contains__(self, name: str) -> bool:
        return name in self.names

    def index(self, name: str) -> int:
        return self.names.index(name)


# ---------------------------------------------------------------------------
# tokenizer / parser

def _tokenize(text: str):
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(("number", int(text[i:j]), i))
            i = j
            continue
        if c.isalpha():
            m = _IDENT_RE.match(text, i)
            tokens.append(("ident", m.group(0), i))
            i = m.end()
            continue
        if c in "+-*/^()":
            tokens.append((c, c, i))
            i += 1
            continue
        raise ParseError(f"unexpected character {c!r}", i)
    tokens.append(("eof", None, n))
    return tokens


_MAX_EXPONENT = 10**6


class _Parser:
    def __init__(self, tokens, ctx: VariableContext):
        self.tokens = tokens
        self.pos = 0
        self.ctx = ctx

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str):
        tok = self.peek()
        if tok[0] != kind:
            raise ParseError(f"expected '{kind}'", tok[2])
        return self.advance()

    def parse_expression(self) -> Expression:
        node = self.parse_term()
        while self.peek()[0] in ("+", "-"):
            op = self.advance()[0]
            rhs = self.parse_term()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    def parse_term(self) -> Expression:
        node = self.parse_unary()
        while self.peek()[0] in ("*", "/"):
            op = self.advance()[0]
            rhs = self.parse_unary()
            node = Mul(node, rhs) if op == "*" else Div(node, rhs)
        return node

    def parse_unary(self) -> Expression:
        if self.peek()[0] == "-":
            self.advance()
            return Neg(self.parse_unary())
        return self.parse_power()

    def parse_power(self) -> Expression:
        base = self.parse_atom()
        if self.peek()[0] == "^":
            self.advance()
            return Pow(base, self.parse_exponent())
        return base

    def parse_exponent(self) -> int:
        tok = self.peek()
        if tok[0] == "(":
            self.advance()
            value = self.parse_signed_int()
            self.expect(")")
        else:
            value = self.parse_signed_int()
        if self.peek()[0] == "^":   # right-associative integer towers
            self.advance()
            upper = self.parse_exponent()
            if upper < 0 or abs(value) ** max(upper, 1) > _MAX_EXPONENT:
                raise ParseError("exponent too large", tok[2])
            value = value ** upper
        if abs(value) > _MAX_EXPONENT:
            raise ParseError("exponent too large", tok[2])
        return value

    def parse_signed_int(self) -> int:
        sign = 1
        tok = self.peek()
        if tok[0] == "-":
            self.advance()
            sign = -1
            tok = self.peek()
        if tok[0] != "number":
            raise ParseError("integer exponent required", tok[2])
        self.advance()
        return sign * tok[1]

    def parse_atom(self) -> Expression:
        tok = self.advance()
        kind, value, pos = tok
        if kind == "number":
            return rational(value)
        if kind == "(":
            inner = self.parse_expression()
            self.expect(")")
            return inner
        if kind == "ident":
            if value in FUNCTION_HEADS and self.peek()[0] == "(":
                self.advance()
                arg = self.parse_expression()
                self.expect(")")
                return Call(value, arg)
            if value in self.ctx:
                return Var(value)
            if value == "i":
                return I
            raise UnknownVariableError(value, pos)
        raise ParseError("unexpected token", pos)


def parse(text: str, ctx: VariableContext) -> Expression:
    """Parse ``text`` over the variables of ``ctx`` into a normalized tree.

    Rational literals like 3/2 read as an exact division of integers; a
    bare ``i`` not shadowed by a context variable is the imaginary unit.
    """
    parser = _Parser(_tokenize(text), ctx)
    node = parser.parse_expression()
    tail = parser.peek()
    if tail[0] != "eof":
        raise ParseError("unexpected trailing input", tail[2])
    return normalize(node)


# ---------------------------------------------------------------------------
# printing

def _frac_text(q: Fraction) -> str:
    return str(q)


def _const_text(c: GaussRat) -> tuple[str, int]:
    """Return (text, precedence) for a constant."""
    if c.im == 0:
        return _frac_text(c.re), (40 if c.re >= 0 else 10)
    if c.re == 0:
        if c.im == 1:
            return "i", 40
        if c.im == -1:
            return "-i", 10
        return f"{_frac_text(c.im)}*i", (20 if c.im > 0 else 10)
    re_t = _frac_text(c.re)
    im_abs = _frac_text(abs(c.im))
    op = "+" if c.im > 0 else "-"
    im_t = "i" if abs(c.im) == 1 else f"{im_abs}*i"
    return f"({re_t} {op} {im_t})", 40


def _fmt(e: Expression) -> tuple[str, int]:
    if isinstance(e, Const):
        return _const_text(e.value)
    if isinstance(e, Var):
        return e.name, 40
    if isinstance(e, (Add, Sub)):
        lt, lp = _fmt(e.left)
        right = e.right
        op = "+" if isinstance(e, Add) else "-"
        if isinstance(e, Add) and isinstance(right, Neg):
            op, right = "-", right.operand
        rt, rp = _fmt(right)
        if lp < 10:
            lt = f"({lt})"
        if rp <= 10:
            rt = f"({rt})"
        return f"{lt} {op} {rt}", 10
    if isinstance(e, (Mul, Div)):
        lt, lp = _fmt(e.left)
        rt, rp = _fmt(e.right)
        op = "*" if isinstance(e, Mul) else "/"
        if lp < 20:
            lt = f"({lt})"
        if rp <= 20:
            rt = f"({rt})"
        return f"{lt}{op}{rt}", 20
    if isinstance(e, Pow):
        bt, bp = _fmt(e.base)
        if bp < 40:
            bt = f"({bt})"
        et = str(e.exponent) if e.exponent >= 0 else f"({e.exponent})"
        return f"{bt}^{et}", 30
    if isinstance(e, Neg):
        ot, op_ = _fmt(e.operand)
        if op_ <= 10:
            ot = f"({ot})"
        return f"-{ot}", 10
    if isinstance(e, Call):
        at, _ = _fmt(e.arg)
        return f"{e.head}({at})", 40
    raise TypeError(f"not an expression node: {type(e).__name__}")


def to_text(e: Expression) -> str:
    return _fmt(e)[0]


# ---------------------------------------------------------------------------
# structural walks

def free_variables(e: Expression) -> frozenset[str]:
    names: set[str] = set()
    stack = [e]
    while stack:
        node = stack.pop()
        if isinstance(node, Var):
            names.add(node.name)
        elif isinstance(node, (Add, Sub, Mul, Div)):
            stack.append(node.left)
            stack.append(node.right)
        elif isinstance(node, Pow):
            stack.append(node.base)
        elif isinstance(node, Neg):
            stack.append(node.operand)
        elif isinstance(node, Call):
            stack.append(node.arg)
    return frozenset(names)


def substitute(e: Expression, bindings: Mapping[str, Expression]) -> Expression:
    """Simultaneous substitution; unbound variables are left unchanged.
    The result is normalized."""
    bindings = {name: _coerce(v) for name, v in bindings.items()}

    def walk(node: Expression) -> Expression:
        if isinstance(node, Var):
            return bindings.get(node.name, node)
        if isinstance(node, Const):
            return node
        if isinstance(node, Add):
            return Add(walk(node.left), walk(node.right))
        if isinstance(node, Sub):
            return Sub(walk(node.left), walk(node.right))
        if isinstance(node, Mul):
            return Mul(walk(node.left), walk(node.right))
        if isinstance(node, Div):
            return Div(walk(node.left), walk(node.right))
        if isinstance(node, Pow):
            return Pow(walk(node.base), node.exponent)
        if isinstance(node, Neg):
            return Neg(walk(node.operand))
        if isinstance(node, Call):
            return Call(node.head, walk(node.arg))
        raise TypeError(f"not an expression node: {type(node).__name__}")

    return normalize(walk(e))


def differentiate(e: Expression, variable: str) -> Expression:
    """Exact partial derivative with respect to ``variable``; normalized."""

    def d(node: Expression) -> Expression:
        if isinstance(node, Const):
            return ZERO
        if isinstance(node, Var):
            return ONE if node.name == variable else ZERO
        if isinstance(node, Add):
            return Add(d(node.left), d(node.right))
        if isinstance(node, Sub):
            return Sub(d(node.left), d(node.right))
        if isinstance(node, Mul):
            return Add(Mul(d(node.left), node.right), Mul(node.left, d(node.right)))
        if isinstance(node, Div):
            num = Sub(Mul(d(node.left), node.right), Mul(node.left, d(node.right)))
            return Div(num, Pow(node.right, 2))
        if isinstance(node, Pow):
            k = node.exponent
            if k == 0:
                return ZERO
            return Mul(Mul(rational(k), Pow(node.base, k - 1)), d(node.base))
        if isinstance(node, Neg):
            return Neg(d(node.operand))
        if isinstance(node, Call):
            inner = d(node.arg)
            if node.head == "exp":
                outer = Call("exp", node.arg)
            elif node.head == "log":
                return Div(inner, node.arg)
            elif node.head == "sin":
                outer = Call("cos", node.arg)
            elif node.head == "cos":
                outer = Neg(Call("sin", node.arg))
            else:
                raise ExpressionError(f"unknown function head {node.head!r}")
            return Mul(inner, outer)
        raise TypeError(f"not an expression node: {type(node).__name__}")

    return normalize(d(e))


# ---------------------------------------------------------------------------
# evaluation

_CFUNCS = {"exp": cmath.exp, "log": cmath.log, "sin": cmath.sin, "cos": cmath.cos}


def evaluate(e: Expression, point: Mapping[str, complex]) -> complex:
    """Evaluate at a complex point; every free variable must be bound."""

    def ev(node: Expression) -> complex:
        if isinstance(node, Const):
            return node.value.to_complex()
        if isinstance(node, Var):
            try:
                return complex(point[node.name])
            except KeyError:
                raise ExpressionError(f"unbound variable '{node.name}'") from None
        if isinstance(node, Add):
            return ev(node.left) + ev(node.right)
        if isinstance(node, Sub):
            return ev(node.left) - ev(node.right)
        if isinstance(node, Mul):
            return ev(node.left) * ev(node.right)
        if isinstance(node, Div):
            den = ev(node.right)
            if abs(den) <= _POLE_EPS:
                raise PoleError("division by (numerically) zero value")
            return ev(node.left) / den
        if isinstance(node, Pow):
            base = ev(node.base)
            if node.exponent < 0 and abs(base) <= _POLE_EPS:
                raise PoleError("negative power of (numerically) zero value")
            return base ** node.exponent
        if isinstance(node, Neg):
            return -ev(node.operand)
        if isinstance(node, Call):
            arg = ev(node.arg)
            if node.head == "log" and abs(arg) <= _POLE_EPS:
                raise DomainError("log of zero")
            return _CFUNCS[node.head](arg)
        raise TypeError(f"not an expression node: {type(node).__name__}")

    return ev(e)


# ---------------------------------------------------------------------------
# normalization

_FOLDS = {
    ("exp", GaussRat(0)): ONE,
    ("log", GaussRat(1)): ZERO,
    ("sin", GaussRat(0)): ZERO,
    ("cos", GaussRat(0)): ONE,
}


def _to_ratfun(e: Expression) -> RatFun:
    if isinstance(e, Const):
        return RatFun.const(e.value)
    if isinstance(e, Var):
        return RatFun.generator(e.name)
    if isinstance(e, Add):
        return _to_ratfun(e.left) + _to_ratfun(e.right)
    if isinstance(e, Sub):
        return _to_ratfun(e.left) - _to_ratfun(e.right)
    if isinstance(e, Mul):
        return _to_ratfun(e.left) * _to_ratfun(e.right)
    if isinstance(e, Div):
        return _to_ratfun(e.left) / _to_ratfun(e.right)
    if isinstance(e, Pow):
        return _to_ratfun(e.base) ** e.exponent
    if isinstance(e, Neg):
        return -_to_ratfun(e.operand)
    if isinstance(e, Call):
        arg = normalize(e.arg)
        if isinstance(arg, Const):
            folded = _FOLDS.get((e.head, arg.value))
            if folded is not None:
                return _to_ratfun(folded)
        return RatFun.generator(Atom(e.head, arg, to_text(arg)))
    raise TypeError(f"not an expression node: {type(e).__name__}")


def _gen_tree(gen) -> Expression:
    if isinstance(gen, str):
        return Var(gen)
    return Call(gen.head, gen.arg)


def _is_negative(c: GaussRat) -> bool:
    return c.re < 0 or (c.re == 0 and c.im < 0)


def _term_tree(coeff: GaussRat, exponents, gens) -> Expression:
    factors = []
    for g, k in zip(gens, exponents):
        if k == 0:
            continue
        base = _gen_tree(g)
        factors.append(base if k == 1 else Pow(base, k))
    if not factors:
        return Const(coeff)
    prod = factors[0]
    for f in factors[1:]:
        prod = Mul(prod, f)
    if coeff == 1:
        return prod
    return Mul(Const(coeff), prod)


def _poly_tree(p: Poly) -> Expression:
    if p.is_zero:
        return ZERO
    items = sorted(p.terms.items(), key=lambda kv: (sum(kv[0]), kv[0]), reverse=True)
    tree: Expression | None = None
    for exponents, coeff in items:
        negative = _is_negative(coeff)
        term = _term_tree(-coeff if negative else coeff, exponents, p.gens)
        if tree is None:
            tree = Neg(term) if negative else term
        else:
            tree = Sub(tree, term) if negative else Add(tree, term)
    return tree


def _tree_of_ratfun(rf: RatFun) -> Expression:
    num = _poly_tree(rf.num)
    if rf.den.is_constant and rf.den.constant_value() == 1:
        return num
    return Div(num, _poly_tree(rf.den))


def normalize(e: Expression) -> Expression:
    """Canonical expanded form: numerator/denominator pair of expanded
    polynomials over variables and transcendental atoms, terms in
    graded-lex order, denominator monic.  Idempotent."""
    try:
        return _tree_of_ratfun(_to_ratfun(e))
    except ZeroDivisionError as exc:
        raise ZeroDenominatorError(str(exc)) from None


def equivalent(a: Expression, b: Expression) -> bool:
    """Structural equality after normalization."""
    return normalize(a) == normalize(b)


def as_univariate_rational(e: Expression, variable: str):
    """Coefficient lists (num, den; ascending, GaussRat) when ``e`` is a
    rational function of ``variable`` alone, else None."""
    try:
        rf = _to_ratfun(e)
    except ZeroDivisionError as exc:
        raise ZeroDenominatorError(str(exc)) from None

    def coeffs(p: Poly):
        if p.is_zero:
            return [GaussRat(0)]
        if p.gens == ():
            return [p.constant_value()]
        if p.gens != (variable,):
            return None
        deg = max(e_[0] for e_ in p.terms)
        out = [GaussRat(0)] * (deg + 1)
        for e_, c in p.terms.items():
            out[e_[0]] = c
        return out

    num = coeffs(rf.num)
    den = coeffs(rf.den)
    if num is None or den is None:
        return None
    return num, den


# ---------------------------------------------------------------------------
# probabilistic zero test

def is_zero(e: Expression, *, samples: int = _ZERO_TEST_POINTS,
            tol: float = _ZERO_TEST_TOL) -> Verdict:
    """exact_zero iff the canonical form is the zero constant; otherwise
    sample at seeded pseudo-random points with rational coordinates in
    [-2, 2] and report probably_zero / nonzero.  Raises
    IndeterminateError if every sample hits a pole."""
    n = normalize(e)
    if isinstance(n, Const):
        return Verdict.EXACT_ZERO if not n.value else Verdict.NONZERO
    names = sorted(free_variables(n))
    rng = random.Random(_ZERO_TEST_SEED)
    succeeded = 0
    attempts = 0
    max_attempts = samples * 20
    while succeeded < samples and attempts < max_attempts:
        attempts += 1
        point = {
            v: complex(rng.randint(-2000, 2000) / 1000,
                       rng.randint(-2000, 2000) / 1000)
            for v in names
        }
        try:
            value = evaluate(n, point)
        except (PoleError, DomainError):
            continue
        if abs(value) > tol:
            return Verdict.NONZERO
        succeeded += 1
    if succeeded == 0:
        raise IndeterminateError("all sample points hit poles of the expression")
    return Verdict.PROBABLY_ZERO
