"""Randomised ring and sign-rule laws for a graded algebra."""

from __future__ import annotations

import random
from fractions import Fraction

from .degrees import commutation_sign, degree_add
from .galgebra import GrassmannAlgebra
from .sampling import COEFFICIENTS, monomials_by_degree
from .verdicts import CheckResult


def _all_monomials(alg: GrassmannAlgebra):
    pool = monomials_by_degree(alg.signature, min(3, alg.truncation))
    return [m for ms in pool.values() for m in ms]


def random_monomial_element(rng, alg: GrassmannAlgebra):
    m = rng.choice(_all_monomials(alg))
    return alg.series({m: rng.choice(COEFFICIENTS)})


def random_element(rng, alg: GrassmannAlgebra, terms: int = 3):
    pool = _all_monomials(alg)
    out = {alg.signature.zero_monomial(): Fraction(rng.randint(-2, 2))}
    for m in rng.sample(pool, min(terms, len(pool))):
        out[m] = rng.choice(COEFFICIENTS)
    return alg.series(out)


def _fail(law, samples, alg, **data):
    return CheckResult(False, [{"law": law, "algebra": str(alg), **{k: str(v) for k, v in data.items()}}],
                       samples_run=samples, effective_truncation=alg.truncation)


def check_ring_laws(alg: GrassmannAlgebra, *, seed: int = 0, pairs: int = 500,
                    triples: int = 500) -> CheckResult:
    """Sign rule on homogeneous monomial pairs; associativity, distributivity
    and grading on random triples."""
    rng = random.Random(seed)
    if alg.size == 0:
        return CheckResult(True, [], samples_run=0, effective_truncation=alg.truncation)
    done = 0
    for _ in range(pairs):
        a, b = random_monomial_element(rng, alg), random_monomial_element(rng, alg)
        done += 1
        if a * b != (b * a) * commutation_sign(a.degree(), b.degree()):
            return _fail("sign rule", done, alg, a=a, b=b)
    for _ in range(triples):
        a, b, c = (random_element(rng, alg) for _ in range(3))
        done += 1
        if (a * b) * c != a * (b * c):
            return _fail("associativity", done, alg, a=a, b=b, c=c)
        if a * (b + c) != a * b + a * c:
            return _fail("distributivity", done, alg, a=a, b=b, c=c)
        for da, ca in a.components().items():
            for db, cb in b.components().items():
                prod = ca * cb
                if not prod.is_zero() and not prod.is_homogeneous(degree_add(da, db)):
                    return _fail("grading", done, alg, a=ca, b=cb)
    return CheckResult(True, [], samples_run=done, effective_truncation=alg.truncation)
