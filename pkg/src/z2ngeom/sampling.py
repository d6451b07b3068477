"""Deterministic sample plans.

Every generator takes an explicit ``random.Random``; the ``seed``-based
wrappers build one.  Base coordinates come from {-1, 0, 1/2, 1} (restricted
to the region), souls have at most three monomials with coefficients
+-1 or +-1/2, and q entries stay at most 3.
"""

from __future__ import annotations

import random
from fractions import Fraction
from functools import lru_cache
from itertools import product

from .degrees import zero_degree
from .domains import Domain, DomainMorphism
from .galgebra import AlgebraMorphism, GrassmannAlgebra, make_algebra
from .gseries import GeneratorSignature, GradedSeries
from .polynomials import BasePolynomial

BASE_VALUES = (Fraction(-1), Fraction(0), Fraction(1, 2), Fraction(1))
COEFFICIENTS = (Fraction(1), Fraction(-1), Fraction(1, 2), Fraction(-1, 2))
MAX_ORDER = 3


@lru_cache(maxsize=None)
def monomials_by_degree(sig: GeneratorSignature, max_order: int = MAX_ORDER) -> dict:
    """Monomials of order ``1..max_order`` grouped by degree."""
    out: dict = {}
    ranges = [range(2) if odd else range(max_order + 1) for odd in sig.odd]
    for m in product(*ranges):
        if 0 < sum(m) <= max_order:
            out.setdefault(sig.monomial_degree(m), []).append(m)
    return out


def random_algebra(rng: random.Random, n: int, K: int = 6, max_q: int = 3) -> GrassmannAlgebra:
    q = [rng.randint(0, max_q) for _ in range(2**n - 1)]
    if not any(q):
        q[rng.randrange(len(q))] = 1
    return make_algebra(n, q, K)


def random_homogeneous(rng: random.Random, alg: GrassmannAlgebra, degree, max_terms: int = 3,
                       body=None) -> GradedSeries:
    """Random element of ``Lambda_degree`` with at most ``max_terms`` soul monomials."""
    pool = monomials_by_degree(alg.signature, min(MAX_ORDER, alg.truncation)).get(tuple(degree), [])
    terms = {}
    if pool:
        for m in rng.sample(pool, min(len(pool), rng.randint(1, max_terms))):
            terms[m] = rng.choice(COEFFICIENTS)
    if body:
        terms[alg.signature.zero_monomial()] = Fraction(body)
    return alg.series(terms)


def random_soul(rng, alg) -> GradedSeries:
    return random_homogeneous(rng, alg, zero_degree(alg.n))


def random_even(rng, alg) -> GradedSeries:
    """A degree-zero element with a body drawn from the base values."""
    return random_homogeneous(rng, alg, zero_degree(alg.n), body=rng.choice(BASE_VALUES))


def _base_choices(domain: Domain, a: int):
    if domain.region is None:
        return list(BASE_VALUES)
    lo, hi = domain.region.bounds[a]
    inside = [v for v in BASE_VALUES if lo <= v <= hi]
    return inside or [(lo + hi) / 2]


def _interior_choices(domain: Domain, a: int):
    if domain.region is None:
        return list(BASE_VALUES)
    lo, hi = domain.region.bounds[a]
    inside = [v for v in BASE_VALUES if lo < v < hi]
    return inside or [(lo + hi) / 2]


def random_point(rng, domain: Domain, alg: GrassmannAlgebra, interior: bool = False):
    from .points import LambdaPoint

    choose = _interior_choices if interior else _base_choices
    base = [rng.choice(choose(domain, a)) for a in range(domain.p)]
    souls = [random_soul(rng, alg) for _ in range(domain.p)]
    degs = domain.formal_signature.generator_degrees
    formal = [random_homogeneous(rng, alg, d) for d in degs]
    return LambdaPoint(domain, alg, base, souls, formal)


def random_tangent(rng, domain: Domain, alg: GrassmannAlgebra):
    from .points import TangentVector

    base = [rng.choice(BASE_VALUES) for _ in range(domain.p)]
    souls = [random_soul(rng, alg) for _ in range(domain.p)]
    degs = domain.formal_signature.generator_degrees
    formal = [random_homogeneous(rng, alg, d) for d in degs]
    return TangentVector(domain, alg, base, souls, formal)


def random_points(domain: Domain, alg: GrassmannAlgebra, seed: int = 0, count: int = 10) -> list:
    rng = random.Random(seed)
    return [random_point(rng, domain, alg) for _ in range(count)]


def lambda0_samples(domain: Domain, seed: int = 0, count: int = 20,
                    algebra: GrassmannAlgebra | None = None, K: int = 6) -> list:
    """``(point, direction, scalar)`` triples for the linearity harnesses."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        alg = algebra or random_algebra(rng, domain.n, K)
        pt = random_point(rng, domain, alg, interior=True)
        v = random_tangent(rng, domain, alg)
        a = random_even(rng, alg)
        out.append((pt, v, a))
    return out


def random_polynomial(rng, nvars: int, max_degree: int = 3, max_terms: int = 3) -> BasePolynomial:
    exps = [b for b in product(range(max_degree + 1), repeat=nvars) if sum(b) <= max_degree]
    terms = {}
    for b in rng.sample(exps, min(len(exps), rng.randint(1, max_terms))):
        terms[b] = rng.choice((1, -1, 2, Fraction(1, 2), -3))
    return BasePolynomial(nvars, terms)


def random_domain(rng, n: int, max_p: int = 2, max_q: int = 2) -> Domain:
    p = rng.randint(0, max_p)
    q = [rng.randint(0, max_q) for _ in range(2**n - 1)]
    if p == 0 and not any(q):
        p = 1
    return Domain(p, q)


def random_domain_morphism(rng, source: Domain, target: Domain, max_degree: int = 3,
                           K: int = 6, max_terms: int = 3) -> DomainMorphism:
    """Polynomial pullbacks with at most ``max_terms`` formal monomials each."""
    sig = source.formal_signature
    pool = monomials_by_degree(sig, min(MAX_ORDER, K))
    zero = sig.zero_monomial()
    fams = []
    for deg in target.coordinate_degrees():
        choices = list(pool.get(deg, []))
        if deg == zero_degree(source.n):
            choices.append(zero)
        fam = {}
        if choices:
            for alpha in rng.sample(choices, min(len(choices), rng.randint(1, max_terms))):
                fam[alpha] = random_polynomial(rng, source.p, max_degree)
        fams.append(fam)
    return DomainMorphism(source, target, fams, K)


def random_algebra_morphism(rng, source: GrassmannAlgebra, target: GrassmannAlgebra) -> AlgebraMorphism:
    images = [random_homogeneous(rng, target, d) for d in source.signature.generator_degrees]
    return AlgebraMorphism(source, target, images)
