"""Coefficient functions on the base: exact polynomials and their relatives.

Every coefficient function offers ``value(x)`` at a rational point.
:class:`BasePolynomial` and :class:`RationalFunction` additionally give exact
local Taylor polynomials via ``taylor(x0, order)``; :class:`Opaque` wraps an
arbitrary callable and is only evaluable.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from math import factorial
from typing import Callable, Mapping, Sequence

from .errors import RangeError, SignatureError
from .gseries import format_terms, to_fraction


def multi_factorial(beta) -> int:
    out = 1
    for b in beta:
        out *= factorial(b)
    return out


class BasePolynomial:
    """Multivariate polynomial in ``x1..xp`` with rational coefficients."""

    __slots__ = ("nvars", "_terms", "_hash")
    is_polynomial = True

    def __init__(self, nvars: int, terms: Mapping | None = None):
        self.nvars = nvars
        clean = {}
        for beta, c in (terms or {}).items():
            beta = tuple(int(b) for b in beta)
            if len(beta) != nvars or any(b < 0 for b in beta):
                raise SignatureError(f"bad exponent {beta} for {nvars} variables")
            c = to_fraction(c)
            if c:
                clean[beta] = clean.get(beta, Fraction(0)) + c
        self._terms = {b: c for b, c in clean.items() if c}
        self._hash = None

    @classmethod
    def _raw(cls, nvars, terms):
        obj = cls.__new__(cls)
        obj.nvars = nvars
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def zero(cls, nvars):
        return cls._raw(nvars, {})

    @classmethod
    def constant(cls, nvars, value):
        value = to_fraction(value)
        return cls._raw(nvars, {(0,) * nvars: value} if value else {})

    @classmethod
    def variable(cls, nvars, a):
        return cls._raw(nvars, {tuple(1 if i == a else 0 for i in range(nvars)): Fraction(1)})

    @classmethod
    def parse(cls, text: str, nvars: int) -> BasePolynomial:
        from .parsing import parse_polynomial

        return parse_polynomial(text, nvars)

    # -- inspection ---------------------------------------------------------

    def items(self):
        return self._terms.items()

    @property
    def terms(self):
        return dict(self._terms)

    def coefficient(self, beta) -> Fraction:
        return self._terms.get(tuple(beta), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    @property
    def degree(self) -> int:
        return max((sum(b) for b in self._terms), default=0)

    def degree_in(self, a: int) -> int:
        return max((b[a] for b in self._terms), default=0)

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, BasePolynomial):
            if other.nvars != self.nvars:
                raise SignatureError("polynomials in different numbers of variables")
            return other
        return BasePolynomial.constant(self.nvars, other)

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        terms = dict(self._terms)
        for b, c in other._terms.items():
            v = terms.get(b, 0) + c
            if v:
                terms[b] = v
            else:
                terms.pop(b, None)
        return BasePolynomial._raw(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self):
        return BasePolynomial._raw(self.nvars, {b: -c for b, c in self._terms.items()})

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, BasePolynomial):
            try:
                f = to_fraction(other)
            except TypeError:
                return NotImplemented
            if not f:
                return BasePolynomial.zero(self.nvars)
            return BasePolynomial._raw(self.nvars, {b: c * f for b, c in self._terms.items()})
        other = self._coerce(other)
        out: dict = {}
        for b1, c1 in self._terms.items():
            for b2, c2 in other._terms.items():
                b = tuple(x + y for x, y in zip(b1, b2))
                v = out.get(b, 0) + c1 * c2
                if v:
                    out[b] = v
                else:
                    out.pop(b, None)
        return BasePolynomial._raw(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        result = BasePolynomial.constant(self.nvars, 1)
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other):
        if isinstance(other, BasePolynomial):
            return self.nvars == other.nvars and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self == BasePolynomial.constant(self.nvars, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    # -- calculus -----------------------------------------------------------

    def derivative(self, a: int) -> BasePolynomial:
        out = {}
        for b, c in self._terms.items():
            if b[a]:
                nb = b[:a] + (b[a] - 1,) + b[a + 1:]
                out[nb] = c * b[a]
        return BasePolynomial._raw(self.nvars, out)

    def partial(self, beta: Sequence[int]) -> BasePolynomial:
        p = self
        for a, k in enumerate(beta):
            for _ in range(k):
                p = p.derivative(a)
        return p

    def value(self, x: Sequence) -> Fraction:
        if len(x) != self.nvars:
            raise SignatureError(f"expected {self.nvars} coordinates, got {len(x)}")
        total = Fraction(0)
        for b, c in self._terms.items():
            term = c
            for xa, e in zip(x, b):
                if e:
                    term *= Fraction(xa) ** e
            total += term
        return total

    __call__ = value

    def evaluate_float(self, x: Sequence[float]) -> float:
        total = 0.0
        for b, c in self._terms.items():
            term = float(c)
            for xa, e in zip(x, b):
                term *= xa**e
            total += term
        return total

    def evaluate_in(self, values: Sequence, one):
        """Evaluate with ring elements substituted for the variables.

        ``one`` is the unit of the ring; the ring must support ``+``, ``*``
        and multiplication by Fractions.
        """
        powers: dict = {}

        def pw(a, e):
            if (a, e) not in powers:
                powers[(a, e)] = values[a] ** e
            return powers[(a, e)]

        acc = one * 0
        for b, c in self._terms.items():
            term = one * c
            for a, e in enumerate(b):
                if e:
                    term = term * pw(a, e)
            acc = acc + term
        return acc

    def shift(self, x0: Sequence) -> BasePolynomial:
        """``u -> p(x0 + u)`` as a polynomial in ``u``."""
        x0 = [Fraction(v) for v in x0]
        out = {}
        for beta in product(*(range(self.degree_in(a) + 1) for a in range(self.nvars))):
            c = self.partial(beta).value(x0)
            if c:
                out[beta] = c / multi_factorial(beta)
        return BasePolynomial._raw(self.nvars, out)

    def truncate_degree(self, order: int) -> BasePolynomial:
        return BasePolynomial._raw(
            self.nvars, {b: c for b, c in self._terms.items() if sum(b) <= order}
        )

    def taylor(self, x0: Sequence, order: int) -> BasePolynomial:
        return self.shift(x0).truncate_degree(order)

    # -- printing -----------------------------------------------------------

    def __str__(self):
        items = sorted(self._terms.items(), key=lambda bc: (sum(bc[0]), tuple(-e for e in bc[0])))
        return format_terms(items, "x")

    def __repr__(self):
        return f"BasePolynomial({self})"


class RationalFunction:
    """``num / den`` with exact values and exact local Taylor polynomials.

    Used for transition inverses such as ``1/(1+x)`` that leave the
    polynomial class; consumers only ever see its local Taylor polynomials.
    """

    is_polynomial = False

    def __init__(self, num: BasePolynomial, den: BasePolynomial):
        if num.nvars != den.nvars:
            raise SignatureError("numerator and denominator variable counts differ")
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        self.nvars = num.nvars
        self.num = num
        self.den = den

    def value(self, x) -> Fraction:
        d = self.den.value(x)
        if not d:
            raise RangeError(f"denominator vanishes at {tuple(x)}", witness=tuple(x))
        return self.num.value(x) / d

    __call__ = value

    def evaluate_float(self, x) -> float:
        return self.num.evaluate_float(x) / self.den.evaluate_float(x)

    def taylor(self, x0, order: int) -> BasePolynomial:
        n = self.num.taylor(x0, order)
        d = self.den.taylor(x0, order)
        d0 = d.coefficient((0,) * self.nvars)
        if not d0:
            raise RangeError(f"denominator vanishes at {tuple(x0)}", witness=tuple(x0))
        rest = d - d0
        q = n * (1 / d0)
        # fixed point of q = (n - rest*q)/d0; each pass fixes one more degree
        for _ in range(order + 1):
            q = ((n - rest * q) * (1 / d0)).truncate_degree(order)
        return q

    def __eq__(self, other):
        if isinstance(other, RationalFunction):
            return self.num * other.den == other.num * self.den
        if isinstance(other, BasePolynomial):
            return self.num == other * self.den
        return NotImplemented

    def __hash__(self):
        return hash(("rational", self.nvars))

    def __str__(self):
        return f"({self.num})/({self.den})"

    __repr__ = __str__


class Opaque:
    """An arbitrary evaluable map Q^p -> Q, with no calculus available.

    Exists so that non-smooth or otherwise non-polynomial data can be fed to
    the classification checks.
    """

    is_polynomial = False

    def __init__(self, fn: Callable, nvars: int, name: str = "opaque"):
        self.fn = fn
        self.nvars = nvars
        self.name = name

    def value(self, x):
        out = self.fn(tuple(x))
        if isinstance(out, float):
            return out
        return Fraction(out)

    __call__ = value

    def evaluate_float(self, x) -> float:
        return float(self.fn(tuple(x)))

    def __eq__(self, other):
        return self is other

    def __hash__(self):
        return id(self)

    def __str__(self):
        return f"<{self.name}>"

    __repr__ = __str__


def as_polynomial(value, nvars: int) -> BasePolynomial:
    if isinstance(value, BasePolynomial):
        if value.nvars != nvars:
            raise SignatureError(f"polynomial has {value.nvars} variables, expected {nvars}")
        return value
    if isinstance(value, str):
        return BasePolynomial.parse(value, nvars)
    return BasePolynomial.constant(nvars, value)
