import random
from fractions import Fraction

import pytest

from z2ngeom.atlas import (
    Chart,
    check_group_object,
    fiber_projection,
    make_glued_manifold,
    make_transition,
    manifold_point,
    product_domain,
    product_manifold,
    product_morphism,
    product_point,
    split_point,
    transport,
)
from z2ngeom.domains import Box, Domain, DomainMorphism
from z2ngeom.errors import RangeError, StructureError
from z2ngeom.galgebra import make_algebra
from z2ngeom.points import LambdaPoint, evaluate
from z2ngeom.sampling import random_algebra, random_domain, random_domain_morphism, random_point

ALG = make_algebra(1, [2], 6)


def shift_atlas():
    """Two copies of the line glued along (1, 2) by x -> x + 1."""
    c0 = Chart(0, Domain(1, [0], Box(((0, 2),))))
    c1 = Chart(1, Domain(1, [0], Box(((1, 3),))))
    t01 = make_transition([c0, c1], 0, 1, [(1, 2)], [(2, 3)], [{(): "x1 + 1"}])
    t10 = make_transition([c0, c1], 1, 0, [(2, 3)], [(1, 2)], [{(): "x1 - 1"}])
    return make_glued_manifold([c0, c1], [t01, t10])


def test_canonical_chart():
    M = shift_atlas()
    assert M.cocycle_checked and not M.notes
    inside = manifold_point(M, 1, LambdaPoint(M.chart(1).domain, ALG, [Fraction(5, 2)], ["g1*g2"], []))
    assert inside.chart == 0 and inside.local.base == (Fraction(3, 2),)
    only = manifold_point(M, 1, LambdaPoint(M.chart(1).domain, ALG, [Fraction(3, 2)], ["0"], []))
    assert only.chart == 1
    assert fiber_projection(only) == (1, (Fraction(3, 2),))
    with pytest.raises(RangeError):
        transport(M, only, 0)


def test_missing_inverse_is_a_structure_error():
    c0 = Chart(0, Domain(1, [0], Box(((0, 2),))))
    c1 = Chart(1, Domain(1, [0], Box(((1, 3),))))
    t01 = make_transition([c0, c1], 0, 1, [(1, 2)], [(2, 3)], [{(): "x1 + 1"}])
    with pytest.raises(StructureError):
        make_glued_manifold([c0, c1], [t01])


def test_wrong_inverse_is_a_structure_error():
    c0 = Chart(0, Domain(1, [0], Box(((0, 2),))))
    c1 = Chart(1, Domain(1, [0], Box(((0, 2),))))
    t01 = make_transition([c0, c1], 0, 1, [(0, 2)], [(0, 2)], [{(): "x1"}])
    t10 = make_transition([c0, c1], 1, 0, [(0, 2)], [(0, 2)], [{(): "2 - x1"}])
    with pytest.raises(StructureError):
        make_glued_manifold([c0, c1], [t01, t10])


def test_product_points_roundtrip():
    rng = random.Random(41)
    for _ in range(20):
        a, b = random_domain(rng, 2), random_domain(rng, 2)
        lam = random_algebra(rng, 2)
        pa, pb = random_point(rng, a, lam), random_point(rng, b, lam)
        assert split_point(product_point(pa, pb), a, b) == (pa, pb)
        assert product_domain(a, b).p == a.p + b.p


def test_product_morphism_acts_componentwise():
    rng = random.Random(42)
    for _ in range(20):
        n = rng.randint(1, 2)
        a, b, c, d = (random_domain(rng, n) for _ in range(4))
        f, g = random_domain_morphism(rng, a, c), random_domain_morphism(rng, b, d)
        lam = random_algebra(rng, n)
        pa, pb = random_point(rng, a, lam), random_point(rng, b, lam)
        got = evaluate(product_morphism(f, g), product_point(pa, pb))
        assert got == product_point(evaluate(f, pa), evaluate(g, pb))


def test_product_manifold():
    M = shift_atlas()
    P = product_manifold(M, M)
    assert len(P.charts) == 4 and P.cocycle_checked
    assert P.chart(3).domain.p == 2


def test_group_object():
    G = Domain(0, [1])
    mu = DomainMorphism(product_domain(G, G), G, [{(1, 0): 1, (0, 1): 1}])
    inv = DomainMorphism(G, G, [{(1,): -1}])
    R = make_algebra(1, [0], 6)
    e = LambdaPoint(G, R, [], [], [R.zero()])
    algebras = [make_algebra(1, [k], 6) for k in (1, 2, 3)]
    assert check_group_object(mu, inv, e, algebras, seed=1, count=5).passed
    wrong = DomainMorphism(G, G, [{(1,): 1}])  # x -> x is not an inverse
    assert not check_group_object(mu, wrong, e, algebras, seed=1, count=5).passed
