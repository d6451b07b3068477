"""Truncated Z_2^n-graded, Z_2^n-commutative formal power series.

A series lives over a :class:`GeneratorSignature` and is known modulo the
``(K+1)``-st power of the ideal generated by all generators, where the order
of a monomial is its total exponent.  Coefficients are exact ``Fraction``s.

Monomials are exponent tuples indexed by generator position; the normal form
of a monomial is the ordered product ``g_0^{e_0} g_1^{e_1} ...``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from numbers import Rational
from typing import Iterable, Mapping, Sequence

from .degrees import (
    Degree,
    as_degree,
    enumerate_nonzero_degrees,
    scalar_product_parity,
)
from .errors import SignatureError, TruncationError

Monomial = tuple


def to_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (Rational, str)):
        return Fraction(value)
    if isinstance(value, bool):
        return Fraction(int(value))
    raise TypeError(f"exact rational coefficient expected, got {value!r}")


@dataclass(frozen=True)
class GeneratorSignature:
    """Generator layout of a Z_2^n-Grassmann algebra.

    ``q[i]`` is the number of generators of degree ``gamma_{i+1}``; the
    generators are listed degree group by degree group, in lexicographic
    order of the degrees.
    """

    n: int
    q: tuple

    def __post_init__(self):
        q = tuple(int(v) for v in self.q)
        object.__setattr__(self, "q", q)
        if self.n < 0:
            raise SignatureError("n must be nonnegative")
        expected = 2**self.n - 1
        if len(q) != expected:
            raise SignatureError(
                f"n={self.n} needs {expected} generator counts, got {len(q)}"
            )
        if any(v < 0 for v in q):
            raise SignatureError(f"generator counts must be nonnegative: {q}")

    @cached_property
    def generator_degrees(self) -> tuple:
        degs = []
        for d, count in zip(enumerate_nonzero_degrees(self.n), self.q):
            degs.extend([d] * count)
        return tuple(degs)

    @property
    def size(self) -> int:
        return len(self.generator_degrees)

    @cached_property
    def odd(self) -> tuple:
        return tuple(scalar_product_parity(d, d) == 1 for d in self.generator_degrees)

    @cached_property
    def _parity(self) -> tuple:
        degs = self.generator_degrees
        return tuple(
            tuple(scalar_product_parity(a, b) for b in degs) for a in degs
        )

    @cached_property
    def _group_offsets(self) -> tuple:
        offsets, acc = [], 0
        for count in self.q:
            offsets.append(acc)
            acc += count
        return tuple(offsets)

    def group_slice(self, degree_position: int) -> range:
        """Generator indices belonging to the ``degree_position``-th nonzero degree."""
        start = self._group_offsets[degree_position]
        return range(start, start + self.q[degree_position])

    def zero_monomial(self) -> Monomial:
        return (0,) * self.size

    def unit_monomial(self, j: int) -> Monomial:
        if not 0 <= j < self.size:
            raise SignatureError(f"generator index {j} out of range 0..{self.size - 1}")
        return tuple(1 if i == j else 0 for i in range(self.size))

    def monomial_degree(self, m: Monomial) -> Degree:
        deg = [0] * self.n
        for e, d in zip(m, self.generator_degrees):
            if e & 1:
                for i, bit in enumerate(d):
                    deg[i] ^= bit
        return tuple(deg)

    def check_monomial(self, m: Sequence[int]) -> Monomial:
        m = tuple(int(e) for e in m)
        if len(m) != self.size:
            raise SignatureError(f"monomial {m} has wrong length for {self.size} generators")
        for e, odd in zip(m, self.odd):
            if e < 0 or (odd and e > 1):
                raise SignatureError(f"invalid exponent pattern {m}")
        return m

    def mul_monomials(self, a: Monomial, b: Monomial):
        """Product of two normal-form monomials.

        Returns ``(sign, monomial)`` or ``None`` if the product vanishes
        because an odd generator appears twice.
        """
        odd = self.odd
        parity = self._parity
        flips = 0
        for j, bj in enumerate(b):
            if not bj:
                continue
            if odd[j] and a[j]:
                return None
            # b's copies of g_j move left past the generators g_i, i > j, in a
            count = 0
            for i in range(j + 1, len(a)):
                if a[i] and parity[i][j]:
                    count += a[i]
            flips += bj * count
        return (-1 if flips & 1 else 1), tuple(x + y for x, y in zip(a, b))

    def __str__(self):
        return f"Lambda^{self.q} (n={self.n})"


def normalize_monomial(signature: GeneratorSignature, word: Sequence[int]):
    """Sort a word of generator indices into normal order.

    Adjacent transpositions each contribute ``(-1)**<deg_i, deg_j>``.
    Returns ``(sign, monomial)``; the sign is 0 (and the monomial ``None``)
    when an odd generator occurs twice.
    """
    word = list(word)
    for j in word:
        if not 0 <= j < signature.size:
            raise SignatureError(f"generator index {j} out of range 0..{signature.size - 1}")
    degs = signature.generator_degrees
    sign = 1
    # plain bubble sort so each swap is an adjacent transposition
    for end in range(len(word) - 1, 0, -1):
        for k in range(end):
            if word[k] > word[k + 1]:
                if scalar_product_parity(degs[word[k]], degs[word[k + 1]]):
                    sign = -sign
                word[k], word[k + 1] = word[k + 1], word[k]
    exps = [0] * signature.size
    for j in word:
        exps[j] += 1
    for j, e in enumerate(exps):
        if signature.odd[j] and e > 1:
            return 0, None
    return sign, tuple(exps)


def _order(m: Monomial) -> int:
    return sum(m)


class GradedSeries:
    """Immutable truncated series with exact rational coefficients."""

    __slots__ = ("signature", "truncation", "_terms", "_hash")

    def __init__(self, signature: GeneratorSignature, truncation: int,
                 terms: Mapping | None = None):
        if truncation < 0:
            raise TruncationError("truncation order must be nonnegative")
        clean = {}
        for m, c in (terms or {}).items():
            m = signature.check_monomial(m)
            c = to_fraction(c)
            if c and _order(m) <= truncation:
                clean[m] = clean.get(m, Fraction(0)) + c
        self.signature = signature
        self.truncation = truncation
        self._terms = {m: c for m, c in clean.items() if c}
        self._hash = None

    @classmethod
    def _raw(cls, signature, truncation, terms):
        # trusted constructor: terms already normal, nonzero and within order
        obj = cls.__new__(cls)
        obj.signature = signature
        obj.truncation = truncation
        obj._terms = terms
        obj._hash = None
        return obj

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, signature, truncation):
        return cls._raw(signature, truncation, {})

    @classmethod
    def constant(cls, signature, truncation, value):
        value = to_fraction(value)
        terms = {signature.zero_monomial(): value} if value else {}
        return cls._raw(signature, truncation, terms)

    @classmethod
    def generator(cls, signature, truncation, j):
        m = signature.unit_monomial(j)
        terms = {m: Fraction(1)} if truncation >= 1 else {}
        return cls._raw(signature, truncation, terms)

    @classmethod
    def monomial(cls, signature, truncation, m, coefficient=1):
        return cls(signature, truncation, {tuple(m): coefficient})

    # -- inspection ---------------------------------------------------------

    @property
    def terms(self) -> Mapping:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __iter__(self):
        return iter(self._terms)

    def __len__(self):
        return len(self._terms)

    def coefficient(self, m) -> Fraction:
        return self._terms.get(tuple(m), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    @property
    def body(self) -> Fraction:
        return self._terms.get(self.signature.zero_monomial(), Fraction(0))

    @property
    def soul(self) -> GradedSeries:
        z = self.signature.zero_monomial()
        return GradedSeries._raw(
            self.signature, self.truncation,
            {m: c for m, c in self._terms.items() if m != z},
        )

    def min_order(self):
        """Smallest monomial order present, ``None`` for the zero series."""
        return min((_order(m) for m in self._terms), default=None)

    def degrees(self) -> set:
        return {self.signature.monomial_degree(m) for m in self._terms}

    def is_homogeneous(self, degree: Degree | None = None) -> bool:
        degs = self.degrees()
        if degree is None:
            return len(degs) <= 1
        return degs <= {tuple(degree)}

    def degree(self):
        """Degree of a nonzero homogeneous series (``None`` for zero)."""
        degs = self.degrees()
        if len(degs) > 1:
            raise ValueError("series is not homogeneous")
        return next(iter(degs), None)

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> GradedSeries:
        if isinstance(other, GradedSeries):
            if other.signature != self.signature:
                raise SignatureError(f"signature mismatch: {self.signature} vs {other.signature}")
            if other.truncation != self.truncation:
                raise TruncationError(
                    f"truncation mismatch: K={self.truncation} vs K={other.truncation}"
                )
            return other
        return GradedSeries.constant(self.signature, self.truncation, other)

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        terms = dict(self._terms)
        for m, c in other._terms.items():
            v = terms.get(m, 0) + c
            if v:
                terms[m] = v
            else:
                terms.pop(m, None)
        return GradedSeries._raw(self.signature, self.truncation, terms)

    __radd__ = __add__

    def __neg__(self):
        return GradedSeries._raw(
            self.signature, self.truncation, {m: -c for m, c in self._terms.items()}
        )

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, factor) -> GradedSeries:
        factor = to_fraction(factor)
        if not factor:
            return GradedSeries.zero(self.signature, self.truncation)
        return GradedSeries._raw(
            self.signature, self.truncation, {m: c * factor for m, c in self._terms.items()}
        )

    def __mul__(self, other):
        if isinstance(other, GradedSeries):
            return series_mul(self, other)
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    def __rmul__(self, other):
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not supported")
        result = GradedSeries.constant(self.signature, self.truncation, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, GradedSeries):
            return (
                self.signature == other.signature
                and self.truncation == other.truncation
                and self._terms == other._terms
            )
        if isinstance(other, (Rational, Fraction)):
            return self == GradedSeries.constant(self.signature, self.truncation, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.signature, self.truncation, frozenset(self._terms.items())))
        return self._hash

    # -- truncation and grading --------------------------------------------

    def truncate(self, order: int) -> GradedSeries:
        return truncate(self, order)

    def homogeneous_component(self, degree) -> GradedSeries:
        return homogeneous_component(self, degree)

    def components(self) -> dict:
        """All nonzero homogeneous components keyed by degree."""
        out = {}
        for m, c in self._terms.items():
            out.setdefault(self.signature.monomial_degree(m), {})[m] = c
        return {
            d: GradedSeries._raw(self.signature, self.truncation, t) for d, t in out.items()
        }

    def map_monomials(self, fn) -> GradedSeries:
        """Rebuild by sending each ``(m, c)`` to a series and summing."""
        acc = GradedSeries.zero(self.signature, self.truncation)
        for m, c in self._terms.items():
            acc = acc + fn(m, c)
        return acc

    # -- printing -----------------------------------------------------------

    def sorted_terms(self):
        return sorted(self._terms.items(), key=lambda mc: (_order(mc[0]), tuple(-e for e in mc[0])))

    def __str__(self):
        return format_terms(self.sorted_terms(), "g")

    def __repr__(self):
        return f"GradedSeries({self}, K={self.truncation})"


def format_coefficient(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_monomial(m, letter: str) -> str:
    parts = []
    for j, e in enumerate(m):
        if e == 1:
            parts.append(f"{letter}{j + 1}")
        elif e > 1:
            parts.append(f"{letter}{j + 1}^{e}")
    return "*".join(parts)


def format_terms(items: Iterable, letter: str) -> str:
    """Render ``(monomial, coefficient)`` pairs in the literal grammar."""
    out = []
    for m, c in items:
        mono = format_monomial(m, letter)
        mag = abs(c)
        if not mono:
            body = format_coefficient(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{format_coefficient(mag)}*{mono}"
        if not out:
            out.append(body if c > 0 else f"-{body}")
        else:
            out.append(f"+ {body}" if c > 0 else f"- {body}")
    return " ".join(out) if out else "0"


def series_mul(s: GradedSeries, t: GradedSeries) -> GradedSeries:
    """Product of two series of the same signature and truncation order."""
    t = s._coerce(t)
    sig, K = s.signature, s.truncation
    out: dict = {}
    mul = sig.mul_monomials
    for ma, ca in s._terms.items():
        oa = _order(ma)
        for mb, cb in t._terms.items():
            if oa + _order(mb) > K:
                continue
            prod = mul(ma, mb)
            if prod is None:
                continue
            sign, m = prod
            v = out.get(m, 0) + (ca * cb if sign > 0 else -(ca * cb))
            if v:
                out[m] = v
            else:
                out.pop(m, None)
    return GradedSeries._raw(sig, K, out)


def homogeneous_component(s: GradedSeries, degree) -> GradedSeries:
    degree = as_degree(degree, s.signature.n)
    deg_of = s.signature.monomial_degree
    return GradedSeries._raw(
        s.signature, s.truncation,
        {m: c for m, c in s._terms.items() if deg_of(m) == degree},
    )


def body_soul_split(s: GradedSeries):
    """Return ``(body, soul)`` with ``s == body + soul``."""
    return s.body, s.soul


def truncate(s: GradedSeries, order: int) -> GradedSeries:
    """Drop all monomials of order above ``order``.

    Raising the order is refused: the dropped information is gone.
    """
    if order > s.truncation:
        raise TruncationError(
            f"cannot truncate a K={s.truncation} series to the higher order {order}"
        )
    if order < 0:
        raise TruncationError("truncation order must be nonnegative")
    return GradedSeries._raw(
        s.signature, order, {m: c for m, c in s._terms.items() if _order(m) <= order}
    )


def equal_mod(s: GradedSeries, t: GradedSeries, order: int | None = None) -> bool:
    """Equality modulo truncation at ``order`` (default: the smaller K)."""
    k = min(s.truncation, t.truncation) if order is None else order
    return truncate(s, k) == truncate(t, k)
