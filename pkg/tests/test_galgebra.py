import random

import pytest

from z2ngeom.errors import GradingError
from z2ngeom.galgebra import (
    AlgebraMorphism,
    algebra_product,
    apply_morphism,
    base_projection,
    compose_morphisms,
    directed_supremum,
    identity_morphism,
    make_algebra,
    unit_morphism,
)
from z2ngeom.laws import check_ring_laws, random_element
from z2ngeom.sampling import random_algebra, random_algebra_morphism


def test_trivial_algebra():
    R = make_algebra(0, [], 6)
    assert R.size == 0 and R.one() * R.constant(3) == R.constant(3)


def test_grading_is_enforced():
    alg = make_algebra(2, [1, 1, 1], 6)
    with pytest.raises(GradingError):
        AlgebraMorphism(alg, alg, ["g2", "g1", "g3"])  # xi -> theta


def test_apply_examples():
    alg = make_algebra(1, [3], 6)
    swap = AlgebraMorphism(alg, alg, ["g2", "g1", "g3"])
    assert swap(alg.parse("1 + g1*g2")) == alg.parse("1 - g1*g2")
    collapse = AlgebraMorphism(alg, alg, ["g1", "g1", "0"])
    assert collapse(alg.parse("g1*g2 + g3")) == alg.zero()
    assert apply_morphism(swap, alg.parse("g1")) == alg.parse("g2")


def test_homomorphism_law_and_composition():
    rng = random.Random(5)
    for _ in range(20):
        n = rng.randint(1, 2)
        a, b, c = (random_algebra(rng, n) for _ in range(3))
        f = random_algebra_morphism(rng, a, b)
        g = random_algebra_morphism(rng, b, c)
        x, y = random_element(rng, a), random_element(rng, a)
        assert f(x * y) == f(x) * f(y)
        assert f(x + y) == f(x) + f(y)
        assert compose_morphisms(g, f)(x) == g(f(x))
        assert compose_morphisms(f, identity_morphism(a)) == f


def test_compose_is_associative():
    rng = random.Random(6)
    algs = [random_algebra(rng, 1) for _ in range(4)]
    f, g, h = (random_algebra_morphism(rng, algs[i], algs[i + 1]) for i in range(3))
    assert compose_morphisms(h, compose_morphisms(g, f)) == compose_morphisms(compose_morphisms(h, g), f)


def test_base_and_unit():
    alg = make_algebra(1, [2], 6)
    s = alg.parse("5 + g1*g2")
    proj = base_projection(alg)
    assert proj.target.size == 0 and proj(s) == proj.target.constant(5)
    # projecting after the unit is the identity on R
    back = compose_morphisms(proj, unit_morphism(alg))
    assert back == identity_morphism(proj.target)


def test_product_and_supremum():
    a, b = make_algebra(1, [2], 6), make_algebra(1, [1], 6)
    P, i, j = algebra_product(a, b)
    assert P.q == (3,)
    assert j(b.gen(0)) == P.gen(2)
    x, y = a.gen(0), b.gen(0)
    assert i(x) * j(y) == -(j(y) * i(x))
    R = make_algebra(1, [0], 6)
    P2, i2, _ = algebra_product(a, R)
    assert P2.q == a.q and i2(a.gen(1)) == P2.gen(1)
    S, ia, ib = directed_supremum(a, b)
    assert S.q == (2,) and ib(b.gen(0)) == S.gen(0)


@pytest.mark.parametrize("n, q", [(1, (3,)), (2, (1, 1, 1)), (3, (1,) * 7)])
def test_ring_laws(n, q):
    assert check_ring_laws(make_algebra(n, q, 6), seed=n, pairs=200, triples=100).passed
