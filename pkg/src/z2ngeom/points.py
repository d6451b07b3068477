"""Lambda-points of domains and the functor-of-points machinery.

A Lambda-point of U^{p|q} is stored through its coordinates: the base point
``x_||`` in the region, the degree-zero souls ``x°^a`` and the formal
components ``xi^A_Lambda`` (homogeneous of the degree of ``xi^A``).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .degrees import zero_degree
from .domains import (
    BerezinVector,
    Domain,
    DomainMorphism,
    morphism_to_berezin,
)
from .errors import GradingError, RangeError, SignatureError, TruncationError
from .galgebra import AlgebraMorphism, GrassmannAlgebra, apply_morphism
from .gseries import GradedSeries, truncate
from .verdicts import CheckResult


def _as_series(value, algebra: GrassmannAlgebra) -> GradedSeries:
    if isinstance(value, GradedSeries):
        if value.signature != algebra.signature:
            raise SignatureError("component is not over the point's algebra")
        if value.truncation < algebra.truncation:
            raise TruncationError(
                f"component known to order {value.truncation} < K={algebra.truncation}"
            )
        return truncate(value, algebra.truncation)
    if isinstance(value, str):
        return algebra.parse(value)
    return algebra.constant(value)


class _Coordinates:
    """Shared storage for points and tangent vectors."""

    __slots__ = ("domain", "algebra", "base", "even_souls", "formal")

    def _init(self, domain, algebra, base, even_souls, formal):
        if domain.n != algebra.n:
            raise SignatureError(f"domain has n={domain.n} but algebra has n={algebra.n}")
        base = tuple(Fraction(b) for b in base)
        if len(base) != domain.p:
            raise SignatureError(f"expected {domain.p} base coordinates, got {len(base)}")
        even_souls = tuple(_as_series(s, algebra) for s in even_souls)
        if len(even_souls) != domain.p:
            raise SignatureError(f"expected {domain.p} even souls, got {len(even_souls)}")
        formal = tuple(_as_series(s, algebra) for s in formal)
        if len(formal) != domain.nformal:
            raise SignatureError(f"expected {domain.nformal} formal components, got {len(formal)}")
        zero = zero_degree(domain.n)
        for a, s in enumerate(even_souls):
            if s.body:
                raise GradingError(f"even soul {a + 1} has nonzero body {s.body}")
            if not s.is_homogeneous(zero):
                raise GradingError(f"even soul {a + 1} is not of degree zero")
        for A, (s, deg) in enumerate(zip(formal, domain.formal_signature.generator_degrees)):
            if not s.is_homogeneous(deg):
                raise GradingError(f"formal component {A + 1} is not homogeneous of degree {deg}")
        self.domain = domain
        self.algebra = algebra
        self.base = base
        self.even_souls = even_souls
        self.formal = formal

    @property
    def truncation(self) -> int:
        return self.algebra.truncation

    def even_components(self) -> tuple:
        """The degree-zero coordinates ``x^a_Lambda = x_|| + x°``."""
        return tuple(s + b for s, b in zip(self.even_souls, self.base))

    def components(self) -> tuple:
        return self.even_components() + self.formal

    def _key(self):
        return (self.domain.p, self.domain.q, self.algebra, self.base, self.even_souls, self.formal)

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def to_json(self) -> dict:
        return {
            "base": [str(b) if b.denominator != 1 else b.numerator for b in self.base],
            "even_souls": [str(s) for s in self.even_souls],
            "formal": [str(s) for s in self.formal],
        }

    def __repr__(self):
        return f"{type(self).__name__}({self.to_json()}, K={self.truncation})"


class LambdaPoint(_Coordinates):
    """A point of ``domain(algebra)``."""

    __slots__ = ()

    def __init__(self, domain: Domain, algebra: GrassmannAlgebra, base: Sequence,
                 even_souls: Sequence, formal: Sequence):
        self._init(domain, algebra, base, even_souls, formal)
        if not domain.contains(self.base):
            raise RangeError(f"base point {tuple(map(str, self.base))} is outside {domain}",
                             witness=self.base)

    @classmethod
    def from_components(cls, domain, algebra, even: Sequence[GradedSeries], formal):
        """Build from full degree-zero components (body becomes the base)."""
        return cls(domain, algebra, [s.body for s in even], [s.soul for s in even], formal)

    def with_domain(self, domain: Domain) -> LambdaPoint:
        if not domain.same_shape(self.domain):
            raise SignatureError("domain shapes differ")
        return LambdaPoint(domain, self.algebra, self.base, self.even_souls, self.formal)

    def truncate(self, K: int) -> LambdaPoint:
        alg = self.algebra.with_truncation(K)
        return LambdaPoint(
            self.domain, alg, self.base,
            [truncate(s, K) for s in self.even_souls], [truncate(s, K) for s in self.formal],
        )


class TangentVector(_Coordinates):
    """An element of R^{p|q}(Lambda) seen as a vector: no region constraint."""

    __slots__ = ()

    def __init__(self, domain: Domain, algebra: GrassmannAlgebra, base: Sequence,
                 even_souls: Sequence, formal: Sequence):
        self._init(domain, algebra, base, even_souls, formal)

    @classmethod
    def zero(cls, domain, algebra):
        return cls(domain, algebra, [0] * domain.p, [algebra.zero()] * domain.p,
                   [algebra.zero()] * domain.nformal)

    @classmethod
    def from_components(cls, domain, algebra, even, formal):
        return cls(domain, algebra, [s.body for s in even], [s.soul for s in even], formal)

    def scale(self, a: GradedSeries) -> TangentVector:
        """The componentwise Lambda_0-module action ``a . v``."""
        if not a.is_homogeneous(zero_degree(self.domain.n)):
            raise GradingError("only degree-zero elements act on Lambda-points")
        even = [a * c for c in self.even_components()]
        formal = [a * c for c in self.formal]
        return TangentVector.from_components(self.domain, self.algebra, even, formal)

    def __add__(self, other: TangentVector) -> TangentVector:
        even = [x + y for x, y in zip(self.even_components(), other.even_components())]
        formal = [x + y for x, y in zip(self.formal, other.formal)]
        return TangentVector.from_components(self.domain, self.algebra, even, formal)

    def __sub__(self, other: TangentVector) -> TangentVector:
        even = [x - y for x, y in zip(self.even_components(), other.even_components())]
        formal = [x - y for x, y in zip(self.formal, other.formal)]
        return TangentVector.from_components(self.domain, self.algebra, even, formal)

    def truncate(self, K: int) -> TangentVector:
        alg = self.algebra.with_truncation(K)
        return TangentVector(
            self.domain, alg, self.base,
            [truncate(s, K) for s in self.even_souls], [truncate(s, K) for s in self.formal],
        )


def equal_mod_truncation(u: _Coordinates, v: _Coordinates, K: int | None = None) -> bool:
    k = min(u.truncation, v.truncation) if K is None else K
    return u.truncate(k) == v.truncate(k)


# ---------------------------------------------------------------------------
# evaluation


def _check_source(domain: Domain, pt: _Coordinates, *, region=True):
    if not pt.domain.same_shape(domain):
        raise SignatureError(f"point lives on {pt.domain}, expected {domain}")
    if region and not domain.contains(pt.base):
        raise RangeError(
            f"base {tuple(map(str, pt.base))} is outside {domain}", witness=pt.base
        )


class _PowerCache:
    """Caches x°^beta and xi^alpha products for one point."""

    def __init__(self, pt: _Coordinates, K: int):
        self.alg = pt.algebra.with_truncation(K)
        self.souls = [truncate(s, K) for s in pt.even_souls]
        self.formal = [truncate(s, K) for s in pt.formal]
        self.one = self.alg.one()
        self._soul: dict = {}
        self._formal: dict = {}

    def soul_power(self, beta) -> GradedSeries:
        if beta not in self._soul:
            term = self.one
            for s, e in zip(self.souls, beta):
                if e:
                    term = term * s**e
            self._soul[beta] = term
        return self._soul[beta]

    def formal_power(self, alpha) -> GradedSeries:
        if alpha not in self._formal:
            term = self.one
            for s, e in zip(self.formal, alpha):
                if e:
                    term = term * s**e
            self._formal[alpha] = term
        return self._formal[alpha]

    def formal_power_derivative(self, alpha, directions) -> GradedSeries:
        """Derivative of the ordered product xi^alpha along ``directions``."""
        total = self.alg.zero()
        for j, e in enumerate(alpha):
            if not e or directions[j].is_zero():
                continue
            left = self.formal_power(alpha[:j] + (0,) * (len(alpha) - j))
            right = self.formal_power((0,) * (j + 1) + alpha[j + 1:])
            # same-degree elements of an even degree commute, so the binomial rule applies
            mid = directions[j] * self.formal[j] ** (e - 1) * e
            total = total + left * mid * right
        return total


def _value_families(F, x, K):
    """Coefficient values ``(alpha, beta) -> Fraction`` at the base point."""
    if isinstance(F, BerezinVector):
        return [{key: Fraction(c.value(x)) for key, c in fam.items()} for fam in F.coefficients]
    fams = []
    for fam in F.pullbacks:
        out = {}
        for alpha, coef in fam.items():
            for beta, val in coef.taylor(x, K).items():
                out[(alpha, beta)] = val
        fams.append(out)
    return fams


def _as_transformation(F):
    if isinstance(F, DomainMorphism) and F.is_polynomial:
        return morphism_to_berezin(F)
    if isinstance(F, (DomainMorphism, BerezinVector)):
        return F
    raise TypeError(f"cannot evaluate {type(F).__name__}")


def evaluate(F, pt: LambdaPoint) -> LambdaPoint:
    """Image of a Lambda-point under the transformation defined by ``F``.

    ``y_Lambda = sum_{alpha,beta} F_{alpha beta}(x_||) x°^beta xi^alpha``.
    Morphisms with polynomial pullbacks go through their Berezin vector;
    other coefficient functions go through their local Taylor polynomials.
    """
    F = _as_transformation(F)
    _check_source(F.source, pt)
    K = min(pt.truncation, F.truncation)
    cache = _PowerCache(pt, K)
    comps = []
    for fam in _value_families(F, pt.base, K):
        acc = cache.alg.zero()
        for (alpha, beta), val in fam.items():
            if not val:
                continue
            term = cache.formal_power(alpha)
            if term.is_zero():
                continue
            if any(beta):
                term = cache.soul_power(beta) * term
            acc = acc + term * val
        comps.append(acc)
    r = F.target.p
    base = [c.body for c in comps[:r]]
    if not F.target.contains(base):
        raise RangeError(
            f"image base {tuple(map(str, base))} is outside {F.target}", witness=pt.base
        )
    return LambdaPoint(F.target, cache.alg, base, [c.soul for c in comps[:r]], comps[r:])


def push_point(psi: AlgebraMorphism, pt: _Coordinates):
    """``M(psi^*)``: apply an algebra morphism to every coordinate."""
    if pt.algebra.signature != psi.source.signature:
        raise SignatureError("point is not over the morphism's source algebra")
    souls = [apply_morphism(psi, s) for s in pt.even_souls]
    formal = [apply_morphism(psi, s) for s in pt.formal]
    K = min(psi.effective_truncation, pt.truncation)
    alg = psi.target.with_truncation(K)
    return type(pt)(pt.domain, alg, pt.base, souls, formal)


def gateaux_derivative(F, pt: LambdaPoint, v: TangentVector) -> TangentVector:
    """Exact directional derivative ``d_pt beta_Lambda(v)``.

    Base directions differentiate the coefficient functions; soul directions
    use the commutative binomial rule in x°; formal directions replace one
    factor of the ordered product xi^alpha at a time.
    """
    F = _as_transformation(F)
    if not F.is_polynomial:
        raise TypeError("exact derivatives need polynomial coefficient functions")
    _check_source(F.source, pt)
    if v.algebra.signature != pt.algebra.signature or not v.domain.same_shape(pt.domain):
        raise SignatureError("tangent vector does not match the point")
    region = F.source.region
    for a, va in enumerate(v.base):
        if va and region is not None and not region.interior_in(pt.base, a):
            raise RangeError(
                f"base direction x{a + 1} at a boundary point of {F.source}", witness=pt.base
            )
    K = min(pt.truncation, v.truncation, F.truncation)
    cache = _PowerCache(pt, K)
    vsouls = [truncate(s, K) for s in v.even_souls]
    vformal = [truncate(s, K) for s in v.formal]
    x = pt.base
    p = F.source.p
    comps = []
    for fam in F.coefficients:
        acc = cache.alg.zero()
        for (alpha, beta), coef in fam.items():
            xi = cache.formal_power(alpha)
            val = coef.value(x)
            # base directions
            slope = sum(
                (coef.derivative(a).value(x) * v.base[a] for a in range(p) if v.base[a]),
                Fraction(0),
            )
            if slope and not xi.is_zero():
                acc = acc + cache.soul_power(beta) * xi * slope
            if not val:
                continue
            # soul directions
            for a in range(p):
                if beta[a] and not vsouls[a].is_zero() and not xi.is_zero():
                    lower = beta[:a] + (beta[a] - 1,) + beta[a + 1:]
                    acc = acc + vsouls[a] * cache.soul_power(lower) * xi * (val * beta[a])
            # formal directions
            if any(alpha):
                dxi = cache.formal_power_derivative(alpha, vformal)
                if not dxi.is_zero():
                    acc = acc + cache.soul_power(beta) * dxi * val
        comps.append(acc)
    r = F.target.p
    return TangentVector.from_components(F.target, cache.alg, comps[:r], comps[r:])


# ---------------------------------------------------------------------------
# harnesses


def _sample_list(samples, default_factory):
    if samples is None:
        return list(default_factory())
    return list(samples)


def check_lambda0_linearity(F, samples: Iterable | None = None, *, seed: int = 0,
                            count: int = 20) -> CheckResult:
    """Verify ``d(a.v) = a.d(v)`` on samples ``(pt, v, a)``.

    Without explicit samples a deterministic plan is drawn from ``seed``.
    """
    from .sampling import lambda0_samples

    Ft = _as_transformation(F)
    samples = _sample_list(samples, lambda: lambda0_samples(Ft.source, seed=seed, count=count))
    ks = []
    for idx, (pt, v, a) in enumerate(samples):
        lhs = gateaux_derivative(Ft, pt, v.scale(a))
        d = gateaux_derivative(Ft, pt, v)
        K = min(lhs.truncation, d.truncation, a.truncation)
        rhs = d.truncate(K).scale(truncate(a, K))
        ks.append(K)
        if not equal_mod_truncation(lhs, rhs, K):
            return CheckResult(
                False,
                [{"sample": idx, "point": pt.to_json(), "direction": v.to_json(),
                  "scalar": str(a), "d(a.v)": lhs.to_json(), "a.d(v)": rhs.to_json()}],
                samples_run=idx + 1,
                effective_truncation=min(ks),
            )
    return CheckResult(True, [], samples_run=len(samples), effective_truncation=min(ks, default=None))


def check_naturality_square(F, psi: AlgebraMorphism, samples: Iterable | None = None, *,
                            transformation: Callable | None = None,
                            pushforward: Callable | None = None,
                            seed: int = 0, count: int = 10) -> CheckResult:
    """Check ``F_{Lambda'} o M(psi) = N(psi) o F_Lambda`` on sampled points.

    ``transformation`` and ``pushforward`` override the two ingredients; they
    exist for negative controls.
    """
    from .sampling import random_points

    Ft = _as_transformation(F) if transformation is None else F
    source = Ft.source
    run = transformation or (lambda pt: evaluate(Ft, pt))
    push = pushforward or push_point
    samples = _sample_list(
        samples, lambda: random_points(source, psi.source, seed=seed, count=count)
    )
    ks = []
    for idx, pt in enumerate(samples):
        lhs = run(push(psi, pt))
        rhs = push(psi, run(pt))
        K = min(lhs.truncation, rhs.truncation)
        ks.append(K)
        if not equal_mod_truncation(lhs, rhs, K):
            return CheckResult(
                False,
                [{"sample": idx, "point": pt.to_json(), "F(psi(pt))": lhs.to_json(),
                  "psi(F(pt))": rhs.to_json()}],
                samples_run=idx + 1,
                effective_truncation=min(ks),
            )
    return CheckResult(True, [], samples_run=len(samples), effective_truncation=min(ks, default=None))


def _displace(pt: LambdaPoint, v: TangentVector, t: Fraction) -> LambdaPoint:
    even = [x + y * t for x, y in zip(pt.even_components(), v.even_components())]
    formal = [x + y * t for x, y in zip(pt.formal, v.formal)]
    return LambdaPoint.from_components(pt.domain, pt.algebra, even, formal)


def push_derivative(psi: AlgebraMorphism, pt: LambdaPoint, v: TangentVector,
                    t: Fraction = Fraction(1, 1000)) -> TangentVector:
    """``d_pt Psi(v)`` as an exact difference quotient.

    ``Psi = M(psi)`` is the restriction of a linear map, so the quotient is
    exact for every step ``t`` that keeps the displaced point in the domain.
    """
    moved = push_point(psi, _displace(pt, v, t))
    here = push_point(psi, pt)
    even = [(x - y) * (1 / t) for x, y in zip(moved.even_components(), here.even_components())]
    formal = [(x - y) * (1 / t) for x, y in zip(moved.formal, here.formal)]
    return TangentVector.from_components(pt.domain, here.algebra, even, formal)


def check_psi_linearity(psi: AlgebraMorphism, samples: Iterable | None = None, *,
                        domain: Domain | None = None, seed: int = 0,
                        count: int = 20) -> CheckResult:
    """Verify ``dPsi(a.v) = psi(a).dPsi(v)`` and ``dPsi(v) = psi(v)``."""
    from .sampling import lambda0_samples

    if samples is None:
        if domain is None:
            raise ValueError("either samples or a domain is required")
        samples = lambda0_samples(domain, seed=seed, count=count, algebra=psi.source)
    samples = list(samples)
    ks = []
    for idx, (pt, v, a) in enumerate(samples):
        d_av = push_derivative(psi, pt, v.scale(a))
        d_v = push_derivative(psi, pt, v)
        K = min(d_av.truncation, d_v.truncation)
        ks.append(K)
        rhs = d_v.truncate(K).scale(truncate(apply_morphism(psi, a), K))
        direct = push_point(psi, v)
        if not (equal_mod_truncation(d_av, rhs, K) and equal_mod_truncation(d_v, direct, K)):
            return CheckResult(
                False,
                [{"sample": idx, "point": pt.to_json(), "direction": v.to_json(),
                  "scalar": str(a), "dPsi(a.v)": d_av.to_json(), "psi(a).dPsi(v)": rhs.to_json()}],
                samples_run=idx + 1,
                effective_truncation=min(ks),
            )
    return CheckResult(True, [], samples_run=len(samples), effective_truncation=min(ks, default=None))
