"""Truncated multivariate Taylor-jet arithmetic.

A jet holds the coefficients of a function germ up to a fixed total order
n in m variables (constant term included).  Addition, multiplication,
division and the transcendental heads are exact on the truncation, which
is what turns repeated differentiation of an ODE right-hand side into
plain arithmetic: evaluating a vector-field component on the jet of the
flow map *is* the prolonged jet ODE.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from functools import lru_cache
from math import comb, factorial

import numpy as np

from . import expr as ex

__all__ = ["multi_indices", "JetContext", "TruncatedJet", "evaluate_on_jets"]


def multi_indices(dimension: int, order: int, include_zero: bool = False):
    """Multi-indices with |alpha| <= order in graded order; within a grade
    the first variable is major (lexicographically descending tuples)."""
    out = []
    lo = 0 if include_zero else 1
    for degree in range(lo, order + 1):
        level = []

        def fill(prefix, remaining, slots):
            if slots == 1:
                level.append(tuple(prefix) + (remaining,))
                return
            for k in range(remaining, -1, -1):
                fill(prefix + [k], remaining - k, slots - 1)

        if dimension == 0:
            if degree == 0:
                level.append(())
        else:
            fill([], degree, dimension)
        out.extend(level)
    return tuple(out)


@lru_cache(maxsize=None)
def _jet_tables(dimension: int, order: int):
    indices = multi_indices(dimension, order, include_zero=True)
    position = {a: i for i, a in enumerate(indices)}
    triples = []
    for a, pa in position.items():
        for b, pb in position.items():
            if sum(a) + sum(b) > order:
                continue
            c = tuple(x + y for x, y in zip(a, b))
            triples.append((position[c], pa, pb))
    ks = np.array([t[0] for t in triples], dtype=np.intp)
    ia = np.array([t[1] for t in triples], dtype=np.intp)
    ib = np.array([t[2] for t in triples], dtype=np.intp)
    return indices, position, ks, ia, ib


class JetContext:
    """Shared index bookkeeping for jets of fixed dimension and order."""

    def __init__(self, dimension: int, order: int):
        if dimension < 1 or order < 0:
            raise ValueError("need dimension >= 1 and order >= 0")
        self.dimension = dimension
        self.order = order
        self.indices, self.position, self._mul_k, self._mul_i, self._mul_j = \
            _jet_tables(dimension, order)
        self.size = len(self.indices)

    def zero(self) -> "TruncatedJet":
        return TruncatedJet(self, np.zeros(self.size, dtype=complex))

    def const(self, value: complex) -> "TruncatedJet":
        jet = self.zero()
        jet.coeffs[0] = value
        return jet

    def variable(self, index: int, base_value: complex) -> "TruncatedJet":
        """Jet of the coordinate function x_index centered at base_value."""
        jet = self.const(base_value)
        if self.order >= 1:
            e = tuple(1 if i == index else 0 for i in range(self.dimension))
            jet.coeffs[self.position[e]] = 1.0
        return jet


@dataclass
class TruncatedJet:
    ctx: JetContext
    coeffs: np.ndarray

    def copy(self) -> "TruncatedJet":
        return TruncatedJet(self.ctx, self.coeffs.copy())

    @property
    def constant_term(self) -> complex:
        return complex(self.coeffs[0])

    def _check(self, other: "TruncatedJet"):
        if other.ctx is not self.ctx and (
                other.ctx.dimension != self.ctx.dimension
                or other.ctx.order != self.ctx.order):
            raise ValueError("jet context mismatch")

    def __add__(self, other):
        if isinstance(other, TruncatedJet):
            self._check(other)
            return TruncatedJet(self.ctx, self.coeffs + other.coeffs)
        out = self.copy()
        out.coeffs[0] += other
        return out

    __radd__ = __add__

    def __neg__(self):
        return TruncatedJet(self.ctx, -self.coeffs)

    def __sub__(self, other):
        return self + (-other if isinstance(other, TruncatedJet) else -complex(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, TruncatedJet):
            self._check(other)
            out = np.zeros(self.ctx.size, dtype=complex)
            np.add.at(out, self.ctx._mul_k,
                      self.coeffs[self.ctx._mul_i] * other.coeffs[self.ctx._mul_j])
            return TruncatedJet(self.ctx, out)
        return TruncatedJet(self.ctx, self.coeffs * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, TruncatedJet):
            return self * other.reciprocal()
        return TruncatedJet(self.ctx, self.coeffs / other)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, exponent: int):
        if exponent < 0:
            return self.reciprocal() ** (-exponent)
        result = self.ctx.const(1.0)
        base = self
        k = exponent
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def _nilpotent_part(self) -> "TruncatedJet":
        out = self.copy()
        out.coeffs[0] = 0.0
        return out

    def reciprocal(self) -> "TruncatedJet":
        c0 = self.constant_term
        if abs(c0) <= 1e-300:
            raise ZeroDivisionError("jet with zero constant term is not invertible")
        v = self._nilpotent_part() * (1.0 / c0)
        # 1/(c0 (1+v)) = (1/c0) * sum (-v)^k, v nilpotent past the order
        acc = self.ctx.const(1.0)
        term = self.ctx.const(1.0)
        for _ in range(self.ctx.order):
            term = term * (-v)
            acc = acc + term
        return acc * (1.0 / c0)

    def exp(self) -> "TruncatedJet":
        v = self._nilpotent_part()
        acc = self.ctx.const(1.0)
        term = self.ctx.const(1.0)
        for k in range(1, self.ctx.order + 1):
            term = term * v * (1.0 / k)
            acc = acc + term
        return acc * cmath.exp(self.constant_term)

    def log(self) -> "TruncatedJet":
        c0 = self.constant_term
        if abs(c0) <= 1e-300:
            raise ZeroDivisionError("log of jet with zero constant term")
        v = self._nilpotent_part() * (1.0 / c0)
        acc = self.ctx.const(cmath.log(c0))
        power = self.ctx.const(1.0)
        for k in range(1, self.ctx.order + 1):
            power = power * v
            acc = acc + power * ((-1.0) ** (k + 1) / k)
        return acc

    def _sin_cos(self) -> tuple["TruncatedJet", "TruncatedJet"]:
        c0 = self.constant_term
        v = self._nilpotent_part()
        sin_v = self.ctx.zero()
        cos_v = self.ctx.const(1.0)
        term = self.ctx.const(1.0)
        for k in range(1, self.ctx.order + 1):
            term = term * v * (1.0 / k)
            if k % 2 == 1:
                sin_v = sin_v + term * ((-1.0) ** ((k - 1) // 2))
            else:
                cos_v = cos_v + term * ((-1.0) ** (k // 2))
        s0, c0v = cmath.sin(c0), cmath.cos(c0)
        return sin_v * c0v + cos_v * s0, cos_v * c0v - sin_v * s0

    def sin(self) -> "TruncatedJet":
        return self._sin_cos()[0]

    def cos(self) -> "TruncatedJet":
        return self._sin_cos()[1]

    def derivative(self, alpha) -> complex:
        """Raw partial derivative: Taylor coefficient times alpha!."""
        scale = 1
        for k in alpha:
            scale *= factorial(k)
        return complex(self.coeffs[self.ctx.position[tuple(alpha)]]) * scale


def evaluate_on_jets(e: "ex.Expression", env: dict, ctx: JetContext) -> TruncatedJet:
    """Evaluate an expression with variables bound to jets."""
    if isinstance(e, ex.Const):
        return ctx.const(e.value.to_complex())
    if isinstance(e, ex.Var):
        try:
            return env[e.name]
        except KeyError:
            raise ex.ExpressionError(f"unbound variable '{e.name}'") from None
    if isinstance(e, ex.Add):
        return evaluate_on_jets(e.left, env, ctx) + evaluate_on_jets(e.right, env, ctx)
    if isinstance(e, ex.Sub):
        return evaluate_on_jets(e.left, env, ctx) - evaluate_on_jets(e.right, env, ctx)
    if isinstance(e, ex.Mul):
        return evaluate_on_jets(e.left, env, ctx) * evaluate_on_jets(e.right, env, ctx)
    if isinstance(e, ex.Div):
        return evaluate_on_jets(e.left, env, ctx) / evaluate_on_jets(e.right, env, ctx)
    if isinstance(e, ex.Pow):
        return evaluate_on_jets(e.base, env, ctx) ** e.exponent
    if isinstance(e, ex.Neg):
        return -evaluate_on_jets(e.operand, env, ctx)
    if isinstance(e, ex.Call):
        arg = evaluate_on_jets(e.arg, env, ctx)
        return getattr(arg, e.head)()
    raise TypeError(f"not an expression node: {type(e).__name__}")


def jet_index_count(dimension: int, order: int) -> int:
    """Number of multi-indices with 1 <= |alpha| <= order."""
    return comb(dimension + order, order) - 1
