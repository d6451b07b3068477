import math
import random
from fractions import Fraction

import pytest

from z2ngeom.domains import (
    BerezinVector,
    Box,
    Domain,
    DomainMorphism,
    berezin_satisfies_propagation,
    berezin_to_morphism,
    compose_domain_morphisms,
    identity_domain_morphism,
    morphism_to_berezin,
    separating_witness,
)
from z2ngeom.errors import ClassificationError, GradingError, NoWitnessError, RangeError
from z2ngeom.points import evaluate
from z2ngeom.polynomials import BasePolynomial, Opaque
from z2ngeom.sampling import random_domain, random_domain_morphism

LINE = Domain(1, [0])
SUPER = Domain(1, [1])


def test_domain_shape():
    D = Domain(2, [1, 0, 2], Box(((0, 1), (-1, 1))))
    assert D.nformal == 3 and D.n == 2
    assert D.contains([Fraction(1, 2), 0]) and not D.contains([2, 0])


def test_grading_is_enforced():
    with pytest.raises(GradingError):
        DomainMorphism(SUPER, SUPER, [{(0,): "x1"}, {(0,): "x1"}])  # eta -> x


def test_base_condition():
    unit = Domain(1, [0], Box(((0, 1),)))
    with pytest.raises(RangeError):
        DomainMorphism(LINE, unit, [{(): "x1^2"}])
    DomainMorphism(unit, unit, [{(): "x1^2"}])


def test_composition_example():
    sq = DomainMorphism(LINE, LINE, [{(): "x1^2"}])
    inc = DomainMorphism(LINE, LINE, [{(): "x1 + 1"}])
    assert compose_domain_morphisms(inc, sq) == DomainMorphism(LINE, LINE, [{(): "x1^2 + 1"}])
    ident = identity_domain_morphism(LINE)
    assert compose_domain_morphisms(sq, ident) == sq == compose_domain_morphisms(ident, sq)


def test_berezin_of_a_morphism():
    phi = DomainMorphism(SUPER, SUPER, [{(0,): "x1^2"}, {(1,): "x1"}])
    F = morphism_to_berezin(phi)
    P = BasePolynomial.parse
    assert F.coefficients[0] == {((0,), (0,)): P("x1^2", 1), ((0,), (1,)): P("2*x1", 1),
                                 ((0,), (2,)): P("1", 1)}
    assert F.coefficients[1] == {((1,), (0,)): P("x1", 1), ((1,), (1,)): P("1", 1)}


def test_counterexample_is_rejected():
    F = BerezinVector(LINE, LINE, [{((), (0,)): "x1^2"}])
    res = berezin_satisfies_propagation(F)
    assert not res.passed
    w = res.witness
    assert (w.gamma, w.a, w.left) == ((1,), 0, 0)
    with pytest.raises(ClassificationError):
        berezin_to_morphism(F)


def test_criterion_detects_any_dropped_coefficient():
    rng = random.Random(21)
    for _ in range(30):
        src, tgt = random_domain(rng, 1), random_domain(rng, 1)
        if src.p == 0:
            continue
        F = morphism_to_berezin(random_domain_morphism(rng, src, tgt))
        keys = [(i, k) for i, fam in enumerate(F.coefficients) for k in fam if any(k[1])]
        if not keys:
            continue
        i, k = rng.choice(keys)
        fams = [dict(f) for f in F.coefficients]
        del fams[i][k]
        assert not berezin_satisfies_propagation(BerezinVector(src, tgt, fams)).passed


def test_zero_roundtrip():
    zero = DomainMorphism(SUPER, SUPER, [{}, {}])
    F = morphism_to_berezin(zero)
    assert berezin_satisfies_propagation(F).passed
    assert berezin_to_morphism(F) == zero


def test_opaque_gets_a_numeric_verdict():
    derivs = [math.sin, math.cos, lambda t: -math.sin(t), lambda t: -math.cos(t)]
    fam = {((), (k,)): Opaque(lambda x, k=k: derivs[k % 4](x[0]) / math.factorial(k), 1, f"sin{k}")
           for k in range(7)}
    res = berezin_satisfies_propagation(BerezinVector(LINE, LINE, [fam]))
    assert res.passed and res.numeric and res.notes
    fam[((), (2,))] = Opaque(lambda x: 0.0, 1, "zero")
    assert not berezin_satisfies_propagation(BerezinVector(LINE, LINE, [fam])).passed


def test_separation():
    sq = DomainMorphism(LINE, LINE, [{(): "x1^2"}])
    shifted = DomainMorphism(LINE, LINE, [{(): "x1^2 + x1"}])
    alg, pt = separating_witness(sq, shifted)
    assert evaluate(sq, pt) != evaluate(shifted, pt)
    odd = DomainMorphism(SUPER, SUPER, [{(0,): "x1"}, {(1,): "x1"}])
    odd2 = DomainMorphism(SUPER, SUPER, [{(0,): "x1"}, {(1,): "2*x1"}])
    alg, pt = separating_witness(odd, odd2)
    assert evaluate(odd, pt) != evaluate(odd2, pt)
    with pytest.raises(NoWitnessError):
        separating_witness(sq, DomainMorphism(LINE, LINE, [{(): "x1^2"}]))
