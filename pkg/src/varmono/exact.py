"""Exact scalar and polynomial arithmetic behind expression normalization.

Scalars are Gaussian rationals (exact rational real and imaginary parts).
Polynomials are sparse exponent-dict maps over an ordered tuple of
generators; a generator is either a variable name (str) or an opaque
transcendental atom.  Rational functions are canonical
numerator/denominator pairs: common monomial content cancelled and the
denominator made monic under the graded-lexicographic term order, which
makes structural equality a sound zero test for the rational fragment.
"""

from __future__ import annotations

from fractions import Fraction

__all__ = ["GaussRat", "Atom", "Poly", "RatFun"]

_ZERO_FRAC = Fraction(0)
_ONE_FRAC = Fraction(1)


class GaussRat:
    """Exact complex rational a + b*i with Fraction components."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if isinstance(re, Fraction) else Fraction(re)
        self.im = im if isinstance(im, Fraction) else Fraction(im)

    @staticmethod
    def coerce(value) -> "GaussRat":
        if isinstance(value, GaussRat):
            return value
        if isinstance(value, (int, Fraction)):
            return GaussRat(value)
        raise TypeError(f"cannot coerce {type(value).__name__} to GaussRat")

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    @property
    def is_real(self) -> bool:
        return not self.im

    def conjugate(self) -> "GaussRat":
        return GaussRat(self.re, -self.im)

    def to_complex(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __add__(self, other):
        other = GaussRat.coerce(other)
        return GaussRat(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = GaussRat.coerce(other)
        return GaussRat(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return GaussRat.coerce(other) - self

    def __neg__(self):
        return GaussRat(-self.re, -self.im)

    def __mul__(self, other):
        other = GaussRat.coerce(other)
        return GaussRat(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = GaussRat.coerce(other)
        norm = other.re * other.re + other.im * other.im
        if not norm:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return GaussRat(
            (self.re * other.re + self.im * other.im) / norm,
            (self.im * other.re - self.re * other.im) / norm,
        )

    def __rtruediv__(self, other):
        return GaussRat.coerce(other) / self

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            raise TypeError("GaussRat exponent must be an int")
        if exponent < 0:
            return GaussRat(1) / self ** (-exponent)
        result = GaussRat(1)
        base = self
        k = exponent
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        if isinstance(other, GaussRat):
            return self.re == other.re and self.im == other.im
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def __repr__(self):
        return f"GaussRat({self.re!r}, {self.im!r})"


class Atom:
    """Transcendental subterm (head applied to a normalized argument tree)
    treated as an opaque polynomial generator."""

    __slots__ = ("head", "arg", "key")

    def __init__(self, head: str, arg, key: str):
        self.head = head
        self.arg = arg            # normalized Expression
        self.key = key            # canonical text of arg, used for ordering

    def __eq__(self, other):
        if isinstance(other, Atom):
            return self.head == other.head and self.arg == other.arg
        return NotImplemented

    def __hash__(self):
        return hash((self.head, self.arg))

    def __repr__(self):
        return f"Atom({self.head}({self.key}))"


def _gen_sort_key(gen):
    # variables sort before atoms; both alphabetically within their class
    if isinstance(gen, str):
        return (0, gen, "")
    return (1, gen.head, gen.key)


def _grlex(exponents):
    return (sum(exponents), exponents)


class Poly:
    """Sparse multivariate polynomial with GaussRat coefficients."""

    __slots__ = ("gens", "terms")

    def __init__(self, gens, terms):
        # internal constructor; use make()/const()/generator()
        self.gens = gens
        self.terms = terms

    @staticmethod
    def make(gens, terms) -> "Poly":
        cleaned = {e: c for e, c in terms.items() if c}
        if not cleaned:
            return Poly((), {})
        used = [any(e[i] for e in cleaned) for i in range(len(gens))]
        if all(used):
            return Poly(tuple(gens), cleaned)
        keep = [i for i, u in enumerate(used) if u]
        new_gens = tuple(gens[i] for i in keep)
        new_terms = {tuple(e[i] for i in keep): c for e, c in cleaned.items()}
        return Poly(new_gens, new_terms)

    @staticmethod
    def const(value) -> "Poly":
        c = GaussRat.coerce(value)
        if not c:
            return Poly((), {})
        return Poly((), {(): c})

    @staticmethod
    def generator(gen) -> "Poly":
        return Poly((gen,), {(1,): GaussRat(1)})

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_constant(self) -> bool:
        return not self.gens

    def constant_value(self) -> GaussRat:
        if self.is_zero:
            return GaussRat(0)
        if not self.is_constant:
            raise ValueError("polynomial is not constant")
        return self.terms[()]

    def total_degree(self) -> int:
        if self.is_zero:
            return 0
        return max(sum(e) for e in self.terms)

    def leading(self):
        """(exponents, coefficient) of the graded-lex leading term."""
        if self.is_zero:
            raise ValueError("zero polynomial has no leading term")
        exp = max(self.terms, key=_grlex)
        return exp, self.terms[exp]

    def content_monomial(self):
        """Componentwise min of exponents over all terms."""
        if self.is_zero:
            raise ValueError("zero polynomial has no content monomial")
        its = iter(self.terms)
        first = next(its)
        mins = list(first)
        for e in its:
            for i, v in enumerate(e):
                if v < mins[i]:
                    mins[i] = v
        return tuple(mins)

    def shift_down(self, mono) -> "Poly":
        if not any(mono):
            return self
        terms = {
            tuple(v - mono[i] for i, v in enumerate(e)): c
            for e, c in self.terms.items()
        }
        return Poly.make(self.gens, terms)

    def scale(self, factor) -> "Poly":
        factor = GaussRat.coerce(factor)
        if not factor:
            return Poly((), {})
        return Poly(self.gens, {e: c * factor for e, c in self.terms.items()})

    def _aligned_with(self, other: "Poly"):
        if self.gens == other.gens:
            return self.gens, self.terms, other.terms
        merged = tuple(sorted(set(self.gens) | set(other.gens), key=_gen_sort_key))
        index = {g: i for i, g in enumerate(merged)}
        n = len(merged)

        def remap(poly):
            pos = [index[g] for g in poly.gens]
            out = {}
            for e, c in poly.terms.items():
                full = [0] * n
                for i, v in enumerate(e):
                    full[pos[i]] = v
                out[tuple(full)] = c
            return out

        return merged, remap(self), remap(other)

    def __add__(self, other: "Poly") -> "Poly":
        gens, a, b = self._aligned_with(other)
        out = dict(a)
        for e, c in b.items():
            s = out.get(e, GaussRat(0)) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Poly.make(gens, out)

    def __neg__(self) -> "Poly":
        return Poly(self.gens, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        if self.is_zero or other.is_zero:
            return Poly((), {})
        gens, a, b = self._aligned_with(other)
        out = {}
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                s = out.get(e, GaussRat(0)) + ca * cb
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return Poly.make(gens, out)

    def __pow__(self, exponent: int) -> "Poly":
        if exponent < 0:
            raise ValueError("Poly exponent must be non-negative")
        result = Poly.const(1)
        base = self
        k = exponent
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.gens == other.gens and self.terms == other.terms
        return NotImplemented

    def __hash__(self):
        return hash((self.gens, tuple(sorted(self.terms.items(), key=lambda kv: kv[0]))))

    def __repr__(self):
        return f"Poly(gens={self.gens!r}, terms={self.terms!r})"


_POLY_ONE = Poly((), {(): GaussRat(1)})


class RatFun:
    """Canonical rational function num/den over Poly."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly):
        self.num = num
        self.den = den

    @staticmethod
    def make(num: Poly, den: Poly) -> "RatFun":
        if den.is_zero:
            raise ZeroDivisionError("division by an identically zero expression")
        if num.is_zero:
            return RatFun(Poly((), {}), _POLY_ONE)
        gens, a, b = num._aligned_with(den)
        num = Poly(gens, a) if gens != num.gens else num
        den = Poly(gens, b) if gens != den.gens else den
        # cancel the common monomial content
        if gens:
            cn = num.content_monomial()
            cd = den.content_monomial()
            common = tuple(min(x, y) for x, y in zip(cn, cd))
            if any(common):
                num = num.shift_down(common)
                den = den.shift_down(common)
                gens, a, b = num._aligned_with(den)
                num = Poly(gens, a)
                den = Poly(gens, b)
        # make the denominator monic under graded-lex
        _, lc = den.leading()
        if lc != 1:
            inv = GaussRat(1) / lc
            num = num.scale(inv)
            den = den.scale(inv)
        return RatFun(Poly.make(num.gens, num.terms), Poly.make(den.gens, den.terms))

    @staticmethod
    def const(value) -> "RatFun":
        return RatFun(Poly.const(value), _POLY_ONE)

    @staticmethod
    def generator(gen) -> "RatFun":
        return RatFun(Poly.generator(gen), _POLY_ONE)

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    @property
    def is_constant(self) -> bool:
        return self.num.is_constant and self.den == _POLY_ONE

    def constant_value(self) -> GaussRat:
        if not self.is_constant:
            raise ValueError("rational function is not constant")
        return self.num.constant_value()

    def __add__(self, other: "RatFun") -> "RatFun":
        return RatFun.make(self.num * other.den + other.num * self.den,
                           self.den * other.den)

    def __sub__(self, other: "RatFun") -> "RatFun":
        return RatFun.make(self.num * other.den - other.num * self.den,
                           self.den * other.den)

    def __neg__(self) -> "RatFun":
        return RatFun(-self.num, self.den)

    def __mul__(self, other: "RatFun") -> "RatFun":
        return RatFun.make(self.num * other.num, self.den * other.den)

    def __truediv__(self, other: "RatFun") -> "RatFun":
        return RatFun.make(self.num * other.den, self.den * other.num)

    def __pow__(self, exponent: int) -> "RatFun":
        if exponent >= 0:
            return RatFun.make(self.num ** exponent, self.den ** exponent)
        return RatFun.make(self.den ** (-exponent), self.num ** (-exponent))

    def __eq__(self, other):
        if isinstance(other, RatFun):
            return self.num == other.num and self.den == other.den
        return NotImplemented

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"RatFun({self.num!r}, {self.den!r})"


# ---------------------------------------------------------------------------
# univariate utilities (coefficient lists, ascending degree, GaussRat entries)

def upoly_trim(coeffs):
    coeffs = list(coeffs)
    while coeffs and not coeffs[-1]:
        coeffs.pop()
    return coeffs


def upoly_mul(a, b):
    a = upoly_trim(a)
    b = upoly_trim(b)
    if not a or not b:
        return []
    out = [GaussRat(0)] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        for j, cb in enumerate(b):
            out[i + j] = out[i + j] + ca * cb
    return upoly_trim(out)


def upoly_divmod(a, b):
    a = upoly_trim(a)
    b = upoly_trim(b)
    if not b:
        raise ZeroDivisionError("univariate division by zero polynomial")
    q = [GaussRat(0)] * max(0, len(a) - len(b) + 1)
    r = list(a)
    lead = b[-1]
    while len(r) >= len(b) and upoly_trim(r):
        shift = len(r) - len(b)
        factor = r[-1] / lead
        q[shift] = factor
        for i, cb in enumerate(b):
            r[shift + i] = r[shift + i] - factor * cb
        r = upoly_trim(r)
    return upoly_trim(q), upoly_trim(r)


def upoly_gcd(a, b):
    a = upoly_trim(a)
    b = upoly_trim(b)
    while b:
        _, r = upoly_divmod(a, b)
        a, b = b, r
    if not a:
        return []
    lead = a[-1]
    return [c / lead for c in a]


def upoly_lcm(a, b):
    a = upoly_trim(a)
    b = upoly_trim(b)
    if not a or not b:
        return []
    g = upoly_gcd(a, b)
    q, r = upoly_divmod(a, g)
    if r:
        raise ArithmeticError("gcd does not divide its argument")
    return upoly_mul(q, b)
