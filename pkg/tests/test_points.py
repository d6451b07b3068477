import random
from fractions import Fraction

import pytest

import oracles
from z2ngeom.domains import Box, Domain, DomainMorphism, compose_domain_morphisms, morphism_to_berezin
from z2ngeom.errors import GradingError, RangeError, ValidationError
from z2ngeom.galgebra import AlgebraMorphism, compose_morphisms, identity_morphism, make_algebra
from z2ngeom.points import (
    LambdaPoint,
    TangentVector,
    check_lambda0_linearity,
    check_naturality_square,
    check_psi_linearity,
    evaluate,
    gateaux_derivative,
    push_point,
)
from z2ngeom.rotations import (
    cayley_orthogonal,
    formal_rotation,
    pairing_algebra,
    step1_lift,
)
from z2ngeom.sampling import (
    random_algebra,
    random_algebra_morphism,
    random_domain,
    random_domain_morphism,
    random_point,
    random_tangent,
)

ALG = make_algebra(1, [2], 6)
LINE = Domain(1, [0])
SQUARE = DomainMorphism(LINE, LINE, [{(): "x1^2"}])


def test_point_validation():
    with pytest.raises(GradingError):
        LambdaPoint(LINE, ALG, [1], ["g1"], [])
    with pytest.raises(GradingError):
        LambdaPoint(LINE, ALG, [1], ["1 + g1*g2"], [])
    with pytest.raises(RangeError):
        LambdaPoint(Domain(1, [0], Box(((0, 1),))), ALG, [2], ["0"], [])


def test_evaluate_example():
    pt = LambdaPoint(LINE, ALG, [1], ["g1*g2"], [])
    assert evaluate(SQUARE, pt) == LambdaPoint(LINE, ALG, [1], ["2*g1*g2"], [])


def test_derivative_example_and_zero_direction():
    pt = LambdaPoint(LINE, ALG, [1], ["g1*g2"], [])
    v = TangentVector(LINE, ALG, [1], ["0"], [])
    assert gateaux_derivative(SQUARE, pt, v) == TangentVector(LINE, ALG, [2], ["2*g1*g2"], [])
    zero = TangentVector.zero(LINE, ALG)
    assert gateaux_derivative(SQUARE, pt, zero) == zero


def test_lambda0_action():
    v = TangentVector(LINE, ALG, [1], ["0"], [])
    assert v.scale(ALG.parse("g1*g2")) == TangentVector(LINE, ALG, [0], ["g1*g2"], [])
    with pytest.raises(GradingError):
        v.scale(ALG.parse("g1"))


def test_functoriality():
    rng = random.Random(31)
    for _ in range(20):
        n = rng.randint(1, 2)
        a, b, c = (random_domain(rng, n) for _ in range(3))
        f, g = random_domain_morphism(rng, a, b), random_domain_morphism(rng, b, c)
        lam = random_algebra(rng, n)
        pt = random_point(rng, a, lam)
        assert evaluate(compose_domain_morphisms(g, f), pt) == evaluate(g, evaluate(f, pt))
        lam2, lam3 = random_algebra(rng, n), random_algebra(rng, n)
        p1, p2 = random_algebra_morphism(rng, lam, lam2), random_algebra_morphism(rng, lam2, lam3)
        assert push_point(compose_morphisms(p2, p1), pt) == push_point(p2, push_point(p1, pt))
        assert push_point(identity_morphism(lam), pt) == pt


def test_derivative_matches_nilpotent_extension():
    rng = random.Random(32)
    for _ in range(20):
        n = rng.randint(1, 2)
        src, tgt = random_domain(rng, n), random_domain(rng, n)
        phi = random_domain_morphism(rng, src, tgt)
        lam = random_algebra(rng, n)
        pt, v = random_point(rng, src, lam), random_tangent(rng, src, lam)
        got = oracles.components(gateaux_derivative(morphism_to_berezin(phi), pt, v))
        assert got == oracles.nilpotent_derivative(phi, pt, v)


def test_harnesses_pass_on_morphisms():
    rng = random.Random(33)
    src, tgt = random_domain(rng, 1), random_domain(rng, 1)
    F = morphism_to_berezin(random_domain_morphism(rng, src, tgt))
    lam = random_algebra(rng, 1)
    psi = random_algebra_morphism(rng, lam, random_algebra(rng, 1))
    assert check_lambda0_linearity(F, seed=1, count=5).passed
    assert check_naturality_square(F, psi, seed=2, count=5).passed
    assert check_psi_linearity(psi, domain=src, seed=3, count=5).passed


def test_push_example():
    alg = make_algebra(1, [2], 6)
    swap = AlgebraMorphism(alg, alg, ["g2", "g1"])
    pt = LambdaPoint(LINE, alg, [1], ["g1*g2"], [])
    assert push_point(swap, pt) == LambdaPoint(LINE, alg, [1], ["-g1*g2"], [])


def test_step1_lift_recovers_the_point():
    rng = random.Random(34)
    for _ in range(20):
        n = rng.randint(1, 2)
        dom, lam = random_domain(rng, n), random_algebra(rng, n, K=4)
        pt = random_point(rng, dom, lam)
        pa, lifted, phi = step1_lift(pt)
        assert push_point(phi, lifted) == pt
        assert list(lifted.even_souls) == [pa.pairing(a) for a in range(dom.p)]


def test_rotation_blocks():
    pa = pairing_algebra(make_algebra(1, [2], 6), 1, [0])
    pyth = [[Fraction(3, 5), Fraction(-4, 5)], [Fraction(4, 5), Fraction(3, 5)]]
    R = formal_rotation(pa, [pyth])
    assert R(pa.pairing(0)) == pa.pairing(0)
    perm = formal_rotation(pa, [[[0, 1], [1, 0]]])
    assert perm(pa.pairing(0)) == pa.pairing(0)
    with pytest.raises(ValidationError):
        formal_rotation(pa, [[[1, 1], [0, 1]]])


def test_cayley_is_orthogonal():
    O = cayley_orthogonal([[0, Fraction(1, 2)], [Fraction(-1, 2), 0]])
    for i in range(2):
        for j in range(2):
            assert sum(O[k][i] * O[k][j] for k in range(2)) == (i == j)


def test_evaluate_odd_coordinate_example():
    alg = make_algebra(2, [1, 0, 1], 6)  # a: (0,1), c: (1,1)
    D = Domain(1, [1, 0, 0])
    phi = DomainMorphism(D, D, [{(0,): "x1"}, {(1,): "x1"}])
    pt = LambdaPoint(D, alg, [3], ["g2^2"], ["g1"])
    image = evaluate(phi, pt)
    assert image.formal[0] == alg.parse("3*g1 + g2^2*g1")
