"""Z_2^n-domains, coordinate-pullback morphisms and Berezin vectors.

A morphism between domains U^{p|q} -> V^{r|s} is stored as its pullbacks:
for every target coordinate a finite family ``alpha -> phi_alpha(x)`` so
that ``phi^*(Y) = sum_alpha phi_alpha(x) xi^alpha``.  A Berezin vector is the
larger family ``(alpha, beta) -> F_{alpha beta}(x)`` that classifies an
arbitrary natural transformation between the functors of points; it comes
from a morphism exactly when the propagation relation

    F_{alpha, gamma} = (1/gamma_a) d/dx^a F_{alpha, gamma - e_a}

holds throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Mapping, Sequence

from .degrees import zero_degree
from .errors import (
    ClassificationError,
    GradingError,
    NoWitnessError,
    RangeError,
    SignatureError,
    TruncationError,
)
from .gseries import GeneratorSignature, format_monomial
from .polynomials import BasePolynomial, Opaque, RationalFunction, multi_factorial
from .verdicts import CheckResult

DEFAULT_TRUNCATION = 6
FD_TOLERANCE = 1e-9
_FD_STEP = Fraction(1, 10**6)
_FREE_WINDOW = (Fraction(-2), Fraction(2))


# ---------------------------------------------------------------------------
# regions


@dataclass(frozen=True)
class Box:
    """Closed rational box; every side must have positive length."""

    bounds: tuple

    def __post_init__(self):
        bounds = tuple((Fraction(lo), Fraction(hi)) for lo, hi in self.bounds)
        for lo, hi in bounds:
            if not lo < hi:
                raise RangeError(f"box side [{lo}, {hi}] is empty or degenerate")
        object.__setattr__(self, "bounds", bounds)

    @property
    def dim(self) -> int:
        return len(self.bounds)

    def contains(self, x) -> bool:
        return all(lo <= Fraction(v) <= hi for v, (lo, hi) in zip(x, self.bounds))

    def interior_in(self, x, a: int) -> bool:
        lo, hi = self.bounds[a]
        return lo < Fraction(x[a]) < hi

    def intersect(self, other: Box):
        """Intersection box, or ``None`` when it has empty interior."""
        out = []
        for (l1, h1), (l2, h2) in zip(self.bounds, other.bounds):
            lo, hi = max(l1, l2), min(h1, h2)
            if not lo < hi:
                return None
            out.append((lo, hi))
        return Box(tuple(out))

    def corners(self):
        return list(product(*self.bounds))

    def midpoint(self):
        return tuple((lo + hi) / 2 for lo, hi in self.bounds)

    def to_json(self):
        return [[_num(lo), _num(hi)] for lo, hi in self.bounds]


def _num(f: Fraction):
    return f.numerator if f.denominator == 1 else str(f)


def region_contains(region, x) -> bool:
    return region is None or region.contains(x)


def intersect_regions(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return a.intersect(b)


def chebyshev_nodes(m: int) -> list:
    """``m`` rationalised Chebyshev nodes in [-1, 1]."""
    return [
        Fraction(round(1000 * math.cos((2 * k + 1) * math.pi / (2 * m))), 1000)
        for k in range(m)
    ]


def sample_points(region, p: int, degree: int) -> list:
    """Deterministic sample grid: ``(degree+2)**p`` nodes plus corners.

    For an unbounded region a fixed window [-2, 2]^p stands in for the box.
    """
    bounds = region.bounds if region is not None else (_FREE_WINDOW,) * p
    if p == 0:
        return [()]
    nodes = chebyshev_nodes(degree + 2)
    axes = [[lo + (hi - lo) * (t + 1) / 2 for t in nodes] for lo, hi in bounds]
    pts = list(product(*axes))
    pts.extend(product(*bounds))
    seen, out = set(), []
    for pt in pts:
        if pt not in seen:
            seen.add(pt)
            out.append(pt)
    return out


@dataclass(frozen=True)
class Domain:
    """The local model U^{p|q}: ``p`` base coordinates on ``region`` and
    ``q[i]`` formal coordinates of degree gamma_{i+1}.  ``region=None`` is
    all of R^p."""

    p: int
    q: tuple
    region: Box | None = None

    def __post_init__(self):
        q = tuple(int(v) for v in self.q)
        object.__setattr__(self, "q", q)
        if self.p < 0:
            raise SignatureError("p must be nonnegative")
        n = (len(q) + 1).bit_length() - 1
        if 2**n - 1 != len(q):
            raise SignatureError(f"len(q) = {len(q)} is not of the form 2^n - 1")
        if self.region is not None and not isinstance(self.region, Box):
            object.__setattr__(self, "region", Box(tuple(self.region)))
        if self.region is not None and self.region.dim != self.p:
            raise SignatureError(f"box has dimension {self.region.dim}, expected {self.p}")

    @property
    def n(self) -> int:
        return (len(self.q) + 1).bit_length() - 1

    @property
    def formal_signature(self) -> GeneratorSignature:
        return GeneratorSignature(self.n, self.q)

    @property
    def nformal(self) -> int:
        return sum(self.q)

    @property
    def dim(self) -> int:
        return self.p + self.nformal

    def coordinate_degrees(self) -> tuple:
        """Degrees of (x^1..x^p, xi^1..xi^|q|)."""
        return (zero_degree(self.n),) * self.p + self.formal_signature.generator_degrees

    def coordinate_names(self, even="y", formal="eta") -> list:
        return [f"{even}{b + 1}" for b in range(self.p)] + [
            f"{formal}{B + 1}" for B in range(self.nformal)
        ]

    def contains(self, x) -> bool:
        return region_contains(self.region, x)

    def same_shape(self, other: Domain) -> bool:
        return self.p == other.p and self.q == other.q

    def restrict(self, region) -> Domain:
        return Domain(self.p, self.q, region)

    def __str__(self):
        where = "R^p" if self.region is None else "x".join(
            f"[{lo},{hi}]" for lo, hi in self.region.bounds
        )
        return f"U^{{{self.p}|{self.q}}} on {where}"


def as_coefficient(value, nvars: int):
    if isinstance(value, (BasePolynomial, RationalFunction, Opaque)):
        if value.nvars != nvars:
            raise SignatureError(f"coefficient has {value.nvars} variables, expected {nvars}")
        return value
    if isinstance(value, str):
        return BasePolynomial.parse(value, nvars)
    return BasePolynomial.constant(nvars, value)


def _is_zero_coefficient(c) -> bool:
    return isinstance(c, BasePolynomial) and c.is_zero()


def _check_alpha(sig: GeneratorSignature, alpha) -> tuple:
    try:
        return sig.check_monomial(alpha)
    except SignatureError as exc:
        raise SignatureError(f"bad formal multi-index {tuple(alpha)}: {exc}") from None


# ---------------------------------------------------------------------------
# polynomial-coefficient series: the function algebra of a domain


class PolySeries:
    """Series in the formal coordinates with polynomial coefficients.

    ``K`` bounds ``|alpha|``; ``joint`` (optional) bounds
    ``deg(coefficient term) + |alpha|``, which is the sound truncation for
    local expansions around a base point.
    """

    __slots__ = ("signature", "nvars", "K", "joint", "terms")

    def __init__(self, signature, nvars, K, terms=None, joint=None):
        self.signature = signature
        self.nvars = nvars
        self.K = K
        self.joint = joint
        self.terms = {}
        for alpha, poly in (terms or {}).items():
            self._accumulate(self.terms, tuple(alpha), poly)

    def _accumulate(self, out, alpha, poly):
        order = sum(alpha)
        if order > self.K:
            return
        if self.joint is not None:
            poly = poly.truncate_degree(self.joint - order) if self.joint >= order else None
            if poly is None:
                return
        total = out.get(alpha)
        total = poly if total is None else total + poly
        if total.is_zero():
            out.pop(alpha, None)
        else:
            out[alpha] = total

    def _like(self, terms):
        obj = PolySeries(self.signature, self.nvars, self.K, joint=self.joint)
        obj.terms = terms
        return obj

    @classmethod
    def constant(cls, signature, nvars, K, poly, joint=None):
        return cls(signature, nvars, K, {signature.zero_monomial(): poly}, joint)

    def __add__(self, other):
        if not isinstance(other, PolySeries):
            other = PolySeries.constant(
                self.signature, self.nvars, self.K,
                BasePolynomial.constant(self.nvars, other), self.joint,
            )
        out = dict(self.terms)
        for alpha, poly in other.terms.items():
            self._accumulate(out, alpha, poly)
        return self._like(out)

    __radd__ = __add__

    def __neg__(self):
        return self._like({a: -p for a, p in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, PolySeries):
            f = Fraction(other)
            if not f:
                return self._like({})
            return self._like({a: p * f for a, p in self.terms.items()})
        out: dict = {}
        mul = self.signature.mul_monomials
        for a1, p1 in self.terms.items():
            for a2, p2 in other.terms.items():
                if sum(a1) + sum(a2) > self.K:
                    continue
                prod = mul(a1, a2)
                if prod is None:
                    continue
                sign, alpha = prod
                self._accumulate(out, alpha, p1 * p2 if sign > 0 else -(p1 * p2))
        return self._like(out)

    __rmul__ = __mul__

    def __pow__(self, k):
        result = PolySeries.constant(
            self.signature, self.nvars, self.K, BasePolynomial.constant(self.nvars, 1), self.joint
        )
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other):
        return isinstance(other, PolySeries) and self.terms == other.terms

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for alpha in sorted(self.terms, key=lambda a: (sum(a), tuple(-e for e in a))):
            mono = format_monomial(alpha, "xi")
            poly = str(self.terms[alpha])
            parts.append(f"({poly})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)


# ---------------------------------------------------------------------------
# morphisms


class DomainMorphism:
    """Pullbacks of the target coordinates of a morphism between domains.

    ``pullbacks[i]`` maps source multi-indices ``alpha`` to coefficient
    functions; the target coordinates are ``y^1..y^r`` followed by the
    formal ones in degree order.  The base condition is checked on a sample
    grid only (``base_check`` says so).
    """

    def __init__(self, source: Domain, target: Domain, pullbacks: Sequence[Mapping],
                 truncation: int = DEFAULT_TRUNCATION, check_base: bool = True):
        if source.n != target.n:
            raise SignatureError(f"n mismatch: source n={source.n}, target n={target.n}")
        pullbacks = list(pullbacks)
        if len(pullbacks) != target.dim:
            raise SignatureError(
                f"need pullbacks for {target.dim} target coordinates, got {len(pullbacks)}"
            )
        self.source = source
        self.target = target
        self.truncation = truncation
        sig = source.formal_signature
        degs = target.coordinate_degrees()
        names = target.coordinate_names()
        fams = []
        for i, fam in enumerate(pullbacks):
            clean = {}
            for alpha, coef in dict(fam).items():
                alpha = _check_alpha(sig, alpha)
                coef = as_coefficient(coef, source.p)
                if _is_zero_coefficient(coef):
                    continue
                if sum(alpha) > truncation:
                    raise TruncationError(
                        f"{names[i]}: |alpha| = {sum(alpha)} exceeds K={truncation}"
                    )
                if sig.monomial_degree(alpha) != degs[i]:
                    raise GradingError(
                        f"{names[i]} has degree {degs[i]} but xi^{alpha} has degree "
                        f"{sig.monomial_degree(alpha)}"
                    )
                clean[alpha] = coef
            fams.append(clean)
        self.pullbacks = tuple(fams)
        self.taylor_approximated = any(
            isinstance(c, RationalFunction) for fam in fams for c in fam.values()
        )
        self.base_check = "not checked"
        if check_base:
            self._check_base()

    # -- basic data ---------------------------------------------------------

    @property
    def is_polynomial(self) -> bool:
        return all(isinstance(c, BasePolynomial) for fam in self.pullbacks for c in fam.values())

    def coefficient(self, i: int, alpha):
        return self.pullbacks[i].get(tuple(alpha))

    def base_coefficients(self) -> list:
        zero = self.source.formal_signature.zero_monomial()
        return [
            self.pullbacks[b].get(zero, BasePolynomial.zero(self.source.p))
            for b in range(self.target.p)
        ]

    def base_map(self, x) -> tuple:
        """The underlying map of base points."""
        return tuple(c.value(x) for c in self.base_coefficients())

    def max_degree(self) -> int:
        return max(
            (c.degree for fam in self.pullbacks for c in fam.values() if isinstance(c, BasePolynomial)),
            default=0,
        )

    def _check_base(self):
        if self.target.region is None:
            self.base_check = "trivial (unbounded target)"
            return
        for x in sample_points(self.source.region, self.source.p, self.max_degree()):
            y = self.base_map(x)
            if not self.target.contains(y):
                raise RangeError(
                    f"base map sends {tuple(map(str, x))} to {tuple(map(str, y))}, outside the target box",
                    witness=x,
                )
        self.base_check = "sampled, not proven"

    def __eq__(self, other):
        if not isinstance(other, DomainMorphism):
            return NotImplemented
        return (
            self.source.same_shape(other.source)
            and self.target.same_shape(other.target)
            and self.pullbacks == other.pullbacks
        )

    def __hash__(self):
        return hash((self.source.p, self.source.q, self.target.p, self.target.q))

    def __repr__(self):
        names = self.target.coordinate_names()
        lines = [f"{name} <- {self.pullback_series()[i]}" for i, name in enumerate(names)]
        return f"DomainMorphism({self.source} -> {self.target}; " + "; ".join(lines) + ")"

    def pullback_series(self) -> list:
        """Polynomial pullbacks as :class:`PolySeries` in the global coordinates."""
        if not self.is_polynomial:
            raise TypeError("global pullback series need polynomial coefficients")
        sig = self.source.formal_signature
        return [PolySeries(sig, self.source.p, self.truncation, fam) for fam in self.pullbacks]

    def local_pullbacks(self, x0, order: int | None = None) -> list:
        """Pullbacks re-expanded around ``x0`` in ``u = x - x0``.

        Coefficients become their local Taylor polynomials; the expansion is
        truncated jointly (``deg_u + |alpha| <= order``), which is exact for
        evaluation at Lambda-points with base ``x0`` modulo that order.
        """
        K = self.truncation if order is None else order
        sig = self.source.formal_signature
        out = []
        for fam in self.pullbacks:
            terms = {}
            for alpha, coef in fam.items():
                if not hasattr(coef, "taylor"):
                    raise TypeError(f"coefficient {coef} has no Taylor expansion")
                terms[alpha] = coef.taylor(x0, K)
            out.append(PolySeries(sig, self.source.p, K, terms, joint=K))
        return out


def make_domain_morphism(source, target, pullbacks, truncation=DEFAULT_TRUNCATION,
                         check_base=True) -> DomainMorphism:
    return DomainMorphism(source, target, pullbacks, truncation, check_base)


def identity_domain_morphism(domain: Domain, truncation=DEFAULT_TRUNCATION) -> DomainMorphism:
    sig = domain.formal_signature
    zero = sig.zero_monomial()
    fams = [{zero: BasePolynomial.variable(domain.p, a)} for a in range(domain.p)]
    fams += [{sig.unit_monomial(j): BasePolynomial.constant(domain.p, 1)} for j in range(sig.size)]
    return DomainMorphism(domain, domain, fams, truncation)


def _substitute(outer_fams, even_values, formal_values, one):
    """Plug ring elements into pullback families ``alpha -> poly``."""
    results = []
    cache: dict = {}

    def formal_power(alpha):
        if alpha not in cache:
            term = one
            for j, e in enumerate(alpha):
                if e:
                    term = term * formal_values[j] ** e
            cache[alpha] = term
        return cache[alpha]

    for fam in outer_fams:
        acc = one * 0
        for alpha, poly in fam.items():
            acc = acc + poly.evaluate_in(even_values, one) * formal_power(alpha)
        results.append(acc)
    return results


def _check_composable(g: DomainMorphism, f: DomainMorphism):
    if not f.target.same_shape(g.source):
        raise SignatureError("cannot compose: f's target and g's source have different dimensions")
    if g.source.region is not None:
        for x in sample_points(f.source.region, f.source.p, f.max_degree()):
            y = f.base_map(x)
            if not g.source.contains(y):
                raise RangeError(
                    f"f sends {tuple(map(str, x))} outside g's source region", witness=x
                )


def compose_domain_morphisms(g: DomainMorphism, f: DomainMorphism) -> DomainMorphism:
    """``g o f``: substitute f's pullbacks into g's (polynomial data only)."""
    _check_composable(g, f)
    if not (f.is_polynomial and g.is_polynomial):
        raise TypeError("global composition needs polynomial coefficients; use compose_local")
    K = min(f.truncation, g.truncation)
    sig = f.source.formal_signature
    p = f.source.p
    one = PolySeries.constant(sig, p, K, BasePolynomial.constant(p, 1))
    inner = [PolySeries(sig, p, K, fam) for fam in f.pullbacks]
    r = f.target.p
    results = _substitute(g.pullbacks, inner[:r], inner[r:], one)
    return DomainMorphism(f.source, g.target, [s.terms for s in results], K, check_base=False)


def compose_local(g: DomainMorphism, f: DomainMorphism, x0, order: int | None = None) -> list:
    """Local pullbacks of ``g o f`` around the base point ``x0``.

    Works for every coefficient class with Taylor expansions, including
    :class:`RationalFunction`; the result is exact modulo the joint order.
    """
    if not f.target.same_shape(g.source):
        raise SignatureError("cannot compose: dimension mismatch")
    K = min(f.truncation, g.truncation) if order is None else order
    y0 = f.base_map(x0)
    if not g.source.contains(y0):
        raise RangeError(f"f sends {tuple(map(str, x0))} outside g's source region", witness=x0)
    inner = f.local_pullbacks(x0, K)
    outer = g.local_pullbacks(y0, K)
    sig = f.source.formal_signature
    p = f.source.p
    one = PolySeries.constant(sig, p, K, BasePolynomial.constant(p, 1), joint=K)
    r = f.target.p
    shifted = [inner[b] - y0[b] for b in range(r)]
    return _substitute([s.terms for s in outer], shifted, inner[r:], one)


# ---------------------------------------------------------------------------
# Berezin vectors


class BerezinVector:
    """Coefficient family ``(alpha, beta) -> F_{alpha beta}`` per target coordinate.

    ``alpha`` indexes monomials in the formal variables, ``beta`` monomials in
    the degree-zero variables X^1..X^p; missing entries are zero.
    """

    def __init__(self, source: Domain, target: Domain, coefficients: Sequence[Mapping],
                 truncation: int = DEFAULT_TRUNCATION, check_base: bool = True):
        if source.n != target.n:
            raise SignatureError("n mismatch between source and target")
        coefficients = list(coefficients)
        if len(coefficients) != target.dim:
            raise SignatureError(
                f"need coefficients for {target.dim} target coordinates, got {len(coefficients)}"
            )
        self.source = source
        self.target = target
        self.truncation = truncation
        sig = source.formal_signature
        degs = target.coordinate_degrees()
        names = target.coordinate_names()
        fams = []
        for i, fam in enumerate(coefficients):
            clean = {}
            for (alpha, beta), coef in dict(fam).items():
                alpha = _check_alpha(sig, alpha)
                beta = tuple(int(b) for b in beta)
                if len(beta) != source.p or any(b < 0 for b in beta):
                    raise SignatureError(f"bad base multi-index {beta}")
                coef = as_coefficient(coef, source.p)
                if _is_zero_coefficient(coef):
                    continue
                if sum(alpha) > truncation:
                    raise TruncationError(f"{names[i]}: |alpha| = {sum(alpha)} exceeds K={truncation}")
                if sig.monomial_degree(alpha) != degs[i]:
                    raise GradingError(
                        f"{names[i]} has degree {degs[i]} but Xi^{alpha} has degree "
                        f"{sig.monomial_degree(alpha)}"
                    )
                clean[(alpha, beta)] = coef
            fams.append(clean)
        self.coefficients = tuple(fams)
        self.base_check = "not checked"
        if check_base:
            self._check_base()

    def _check_base(self):
        if self.target.region is None:
            self.base_check = "trivial (unbounded target)"
            return
        zero = (self.source.formal_signature.zero_monomial(), (0,) * self.source.p)
        for x in sample_points(self.source.region, self.source.p, 3):
            y = tuple(
                self.coefficients[b].get(zero, BasePolynomial.zero(self.source.p)).value(x)
                for b in range(self.target.p)
            )
            if not self.target.contains(y):
                raise RangeError("F_00 sends a sample point outside the target box", witness=x)
        self.base_check = "sampled, not proven"

    @property
    def is_polynomial(self) -> bool:
        return all(isinstance(c, BasePolynomial) for fam in self.coefficients for c in fam.values())

    def coefficient(self, i, alpha, beta):
        return self.coefficients[i].get((tuple(alpha), tuple(beta)))

    def __eq__(self, other):
        if not isinstance(other, BerezinVector):
            return NotImplemented
        return (
            self.source.same_shape(other.source)
            and self.target.same_shape(other.target)
            and self.coefficients == other.coefficients
        )

    def __hash__(self):
        return hash((self.source.p, self.source.q, self.target.p, self.target.q))

    def __repr__(self):
        names = self.target.coordinate_names()
        parts = []
        for i, fam in enumerate(self.coefficients):
            for (alpha, beta), c in sorted(fam.items()):
                parts.append(f"F^{names[i]}_{{{alpha},{beta}}} = {c}")
        return "BerezinVector(" + "; ".join(parts) + ")"


def morphism_to_berezin(phi: DomainMorphism) -> BerezinVector:
    """``F_{alpha beta} = (1/beta!) d^beta phi_alpha``."""
    if not phi.is_polynomial:
        raise TypeError("morphism_to_berezin needs polynomial coefficients")
    p = phi.source.p
    fams = []
    for fam in phi.pullbacks:
        out = {}
        for alpha, poly in fam.items():
            for beta in product(*(range(poly.degree_in(a) + 1) for a in range(p))):
                d = poly.partial(beta)
                if not d.is_zero():
                    out[(alpha, beta)] = d * Fraction(1, multi_factorial(beta))
        fams.append(out)
    return BerezinVector(phi.source, phi.target, fams, phi.truncation, check_base=False)


@dataclass
class PropagationWitness:
    coordinate: int
    name: str
    alpha: tuple
    gamma: tuple
    a: int  # 0-based base variable index
    left: object
    right: object
    point: tuple | None = None

    def describe(self) -> str:
        where = "" if self.point is None else f" at x={tuple(map(str, self.point))}"
        return (
            f"{self.name}: alpha={self.alpha}, gamma={self.gamma}, variable x{self.a + 1}{where}: "
            f"F_(alpha,gamma) = {self.left} but (1/gamma_a) d F_(alpha,gamma-e_a) = {self.right}"
        )

    def to_dict(self):
        return {
            "coordinate": self.name,
            "alpha": list(self.alpha),
            "gamma": list(self.gamma),
            "variable": f"x{self.a + 1}",
            "left": str(self.left),
            "right": str(self.right),
            "point": None if self.point is None else [str(v) for v in self.point],
            "description": self.describe(),
        }


def _fd_derivative(coef, x, a):
    """Central difference of a non-polynomial coefficient."""
    h = _FD_STEP
    xp = list(x)
    xm = list(x)
    xp[a] = Fraction(x[a]) + h
    xm[a] = Fraction(x[a]) - h
    vp, vm = coef.value(xp), coef.value(xm)
    return (vp - vm) / (2 * h) if not isinstance(vp, float) else (vp - vm) / (2 * float(h))


def _sample_base_points(domain: Domain):
    if domain.region is None:
        return list(product(*([Fraction(-1), Fraction(0), Fraction(1, 2), Fraction(1)],) * domain.p))
    return sample_points(domain.region, domain.p, 1)


def berezin_satisfies_propagation(F: BerezinVector) -> CheckResult:
    """Check the propagation relation for every relevant ``(alpha, gamma, a)``.

    Polynomial data are compared exactly.  Whenever an Opaque coefficient is
    involved, both sides are compared at sample points with central finite
    differences, and the verdict is marked numeric.
    """
    p = F.source.p
    names = F.target.coordinate_names()
    zero_poly = BasePolynomial.zero(p)
    numeric = False
    checked = 0
    for i, fam in enumerate(F.coefficients):
        by_alpha: dict = {}
        for alpha, beta in fam:
            by_alpha.setdefault(alpha, set()).add(beta)
        for alpha in sorted(by_alpha):
            stored = by_alpha[alpha]
            candidates = {g for g in stored if any(g)}
            for beta in stored:
                for a in range(p):
                    candidates.add(beta[:a] + (beta[a] + 1,) + beta[a + 1:])
            for gamma in sorted(candidates):
                if sum(alpha) + sum(gamma) > F.truncation:
                    continue  # beyond the order the data is kept to
                for a in range(p):
                    if not gamma[a]:
                        continue
                    checked += 1
                    lower = gamma[:a] + (gamma[a] - 1,) + gamma[a + 1:]
                    left = fam.get((alpha, gamma), zero_poly)
                    below = fam.get((alpha, lower), zero_poly)
                    if isinstance(left, BasePolynomial) and isinstance(below, BasePolynomial):
                        right = below.derivative(a) * Fraction(1, gamma[a])
                        if left != right:
                            return CheckResult(
                                False,
                                [PropagationWitness(i, names[i], alpha, gamma, a, left, right)],
                                samples_run=checked,
                                effective_truncation=F.truncation,
                            )
                        continue
                    numeric = True
                    for x in _sample_base_points(F.source):
                        lv = left.value(x)
                        if isinstance(below, BasePolynomial):
                            rv = below.derivative(a).value(x) / gamma[a]
                        else:
                            rv = _fd_derivative(below, x, a) / gamma[a]
                        if abs(float(lv) - float(rv)) > FD_TOLERANCE * max(1.0, abs(float(rv))):
                            return CheckResult(
                                False,
                                [PropagationWitness(i, names[i], alpha, gamma, a, lv, rv, tuple(x))],
                                samples_run=checked,
                                effective_truncation=F.truncation,
                                numeric=True,
                            )
    notes = ["finite-difference evidence for opaque coefficients"] if numeric else []
    return CheckResult(True, [], samples_run=checked, effective_truncation=F.truncation,
                       numeric=numeric, notes=notes)


def berezin_to_morphism(F: BerezinVector) -> DomainMorphism:
    """Recover ``phi_alpha = F_{alpha 0}``; fails unless propagation holds."""
    verdict = berezin_satisfies_propagation(F)
    if not verdict.passed:
        raise ClassificationError(
            "not induced by a morphism: " + verdict.witness.describe(), witness=verdict.witness
        )
    if not F.is_polynomial:
        raise TypeError("berezin_to_morphism needs polynomial coefficients")
    zero_beta = (0,) * F.source.p
    fams = []
    for fam in F.coefficients:
        fams.append({alpha: c for (alpha, beta), c in fam.items() if beta == zero_beta})
    return DomainMorphism(F.source, F.target, fams, F.truncation)


# ---------------------------------------------------------------------------
# separation


def _grid_axis(region, a, size):
    if region is None:
        return [Fraction(k) for k in range(size)]
    lo, hi = region.bounds[a]
    if size == 1:
        return [lo]
    return [lo + (hi - lo) * Fraction(k, size - 1) for k in range(size)]


def _nonvanishing_point(poly: BasePolynomial, region, p):
    """A grid point where a nonzero polynomial does not vanish."""
    side = poly.degree + 1
    for x in product(*(_grid_axis(region, a, side) for a in range(p))):
        if poly.value(x):
            return x
    raise AssertionError("a nonzero polynomial vanished on a full grid")


def separating_witness(phi: DomainMorphism, psi: DomainMorphism):
    """Find a Lambda-point where ``phi`` and ``psi`` differ.

    The algebra is Lambda^q for the source's ``q``; the point sends the
    base coordinates to a rational grid point and each formal coordinate to
    its own generator.  Returns ``(algebra, point)``.
    """
    from .galgebra import make_algebra
    from .points import LambdaPoint, evaluate

    if not (phi.source.same_shape(psi.source) and phi.target.same_shape(psi.target)):
        raise SignatureError("separating_witness needs morphisms with the same endpoints")
    if not (phi.is_polynomial and psi.is_polynomial):
        raise TypeError("separating_witness needs polynomial coefficients")
    K = min(phi.truncation, psi.truncation)
    src = phi.source
    region = intersect_regions(src.region, psi.source.region)
    if region is None and (src.region is not None or psi.source.region is not None):
        raise RangeError("the two source regions do not overlap")
    diff = None
    for i in range(len(phi.pullbacks)):
        alphas = sorted(set(phi.pullbacks[i]) | set(psi.pullbacks[i]))
        for alpha in alphas:
            if sum(alpha) > K:
                continue
            zero = BasePolynomial.zero(src.p)
            d = phi.pullbacks[i].get(alpha, zero) - psi.pullbacks[i].get(alpha, zero)
            if not d.is_zero():
                diff = d
                break
        if diff is not None:
            break
    if diff is None:
        raise NoWitnessError("the morphisms have identical pullback data")
    base = _nonvanishing_point(diff, region, src.p)
    alg = make_algebra(src.n, src.q, K)
    point = LambdaPoint(
        src.restrict(region),
        alg,
        base,
        [alg.zero()] * src.p,
        list(alg.generators),
    )
    if evaluate(phi, point) == evaluate(psi, point):
        raise AssertionError("constructed witness failed to separate")
    return alg, point
