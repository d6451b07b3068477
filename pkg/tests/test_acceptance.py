"""The twelve acceptance criteria, one test each.

Each test prints a single ``[criterion N] PASS|FAIL`` line.  Run with
``pytest tests/test_acceptance.py -s`` or ``python tests/test_acceptance.py``.
"""

import random
import sys
from fractions import Fraction

import pytest

import oracles
from z2ngeom.atlas import (
    Chart,
    check_group_object,
    fiber_projection,
    make_glued_manifold,
    make_transition,
    manifold_point,
    product_domain,
    product_point,
    split_point,
    transport,
)
from z2ngeom.degrees import commutation_sign
from z2ngeom.domains import (
    BerezinVector,
    Box,
    Domain,
    DomainMorphism,
    berezin_satisfies_propagation,
    berezin_to_morphism,
    morphism_to_berezin,
    separating_witness,
)
from z2ngeom.errors import GluingError, ValidationError
from z2ngeom.galgebra import AlgebraMorphism, base_projection, make_algebra
from z2ngeom.laws import check_ring_laws, random_monomial_element
from z2ngeom.points import (
    LambdaPoint,
    TangentVector,
    _PowerCache,
    check_lambda0_linearity,
    check_naturality_square,
    check_psi_linearity,
    evaluate,
    gateaux_derivative,
)
from z2ngeom.polynomials import BasePolynomial, RationalFunction
from z2ngeom.rotations import formal_rotation, pairing_algebra, random_rotation_blocks
from z2ngeom.sampling import (
    lambda0_samples,
    random_algebra,
    random_algebra_morphism,
    random_domain,
    random_domain_morphism,
    random_point,
    random_points,
    random_tangent,
)


def report(n, ok, detail=""):
    line = f"[criterion {n}] {'PASS' if ok else 'FAIL'}" + (f": {detail}" if detail else "")
    sys.__stdout__.write(line + "\n")
    sys.__stdout__.flush()
    if "conftest" in sys.modules:
        sys.modules["conftest"].ACCEPTANCE_LINES.append(line)
    assert ok, line


def test_criterion_01_sign_rule():
    problems = []
    for n in (1, 2, 3):
        alg = make_algebra(n, [2] * (2**n - 1), 6)
        res = check_ring_laws(alg, seed=n, pairs=500, triples=500)
        if not res.passed:
            problems.append(res.witness)
        rng = random.Random(100 + n)
        for _ in range(500):
            a, b = random_monomial_element(rng, alg), random_monomial_element(rng, alg)
            if a * b != oracles.oracle_mul(a, b):
                problems.append(("product vs bubble-sort oracle", str(a), str(b)))
            if a * b != (b * a) * commutation_sign(a.degree(), b.degree()):
                problems.append(("sign rule", str(a), str(b)))
    report(1, not problems, "n in {1,2,3}: 500 monomial pairs and 500 triples each, zero tolerance"
           if not problems else str(problems[:2]))


def test_criterion_02_fixture():
    alg = make_algebra(2, [1, 1, 1], 6)
    xi, theta, z = alg.generators
    ok = all([
        xi * theta == theta * xi,
        (xi * xi).is_zero(),
        (theta * theta).is_zero(),
        xi * z == -(z * xi),
        theta * z == -(z * theta),
        all(not (z**k).is_zero() for k in range(1, 7)),
        (z**7).is_zero(),
    ])
    rng = random.Random(2)
    for _ in range(50):
        f = alg.series({(a, b, k): Fraction(rng.randint(-3, 3), rng.randint(1, 3))
                        for a in (0, 1) for b in (0, 1) for k in range(7 - a - b)})
        blocks = {}
        for m, c in f.items():
            blocks.setdefault((m[0], m[1]), {})[(0, 0, m[2])] = c
        fz, fxi, fth, fxt = (alg.series(blocks.get(key, {})) for key in ((0, 0), (1, 0), (0, 1), (1, 1)))
        # every block is a function of z alone
        ok &= all(all(m[0] == m[1] == 0 for m, _ in s.items()) for s in (fz, fxi, fth, fxt))
        ok &= f == fz + xi * fxi + theta * fth + xi * theta * fxt
        comps = f.components()
        ok &= sum(comps.values(), alg.zero()) == f
        for deg, comp in comps.items():
            rebuilt = sum(((blk).homogeneous_component(deg)
                           for blk in (fz, xi * fxi, theta * fth, xi * theta * fxt)), alg.zero())
            ok &= comp == rebuilt
    report(2, ok, "relations, z^k != 0 for k <= 6, four-block form on 50 general elements")


def test_criterion_03_pullback_formula():
    alg = make_algebra(1, [2], 6)
    D = Domain(1, [0])
    phi = DomainMorphism(D, D, [{(): "x1^2"}])
    pt = LambdaPoint(D, alg, [1], ["g1*g2"], [])
    ok = evaluate(phi, pt) == LambdaPoint(D, alg, [1], ["2*g1*g2"], [])
    rng = random.Random(3)
    bad = []
    for i in range(100):
        n = rng.randint(1, 2)
        src, tgt = random_domain(rng, n), random_domain(rng, n)
        f = random_domain_morphism(rng, src, tgt)
        pt = random_point(rng, src, random_algebra(rng, n))
        got = oracles.components(evaluate(f, pt))
        want = oracles.brute_force_point(f, pt)
        if got != want:
            bad.append(i)
    report(3, ok and not bad, "fixture 1+2*g1*g2 and 100 pairs vs brute-force substitution"
           if not bad else f"mismatch at samples {bad[:5]}")


def test_criterion_04_classification_roundtrip():
    rng = random.Random(4)
    bad = []
    for i in range(100):
        n = rng.randint(1, 2)
        src, tgt = random_domain(rng, n), random_domain(rng, n)
        f = random_domain_morphism(rng, src, tgt, max_degree=3, K=6)
        F = morphism_to_berezin(f)
        if not berezin_satisfies_propagation(F).passed or berezin_to_morphism(F) != f:
            bad.append(i)
    report(4, not bad, "100 random morphisms roundtrip exactly" if not bad else f"failed {bad[:5]}")


def test_criterion_05_counterexample():
    D = Domain(1, [0])
    alg = make_algebra(1, [2], 6)
    F = BerezinVector(D, D, [{((), (0,)): "x1^2"}])
    prop = berezin_satisfies_propagation(F)
    w = prop.witness
    prop_ok = (not prop.passed and w.gamma == (1,) and w.a == 0
               and w.left == 0 and w.right == BasePolynomial.parse("2*x1", 1))
    pt = LambdaPoint(D, alg, [1], ["g1*g2"], [])
    v = TangentVector(D, alg, [1], [alg.zero()], [])
    a = alg.parse("g1*g2")
    lin = check_lambda0_linearity(F, [(pt, v, a)])
    lw = lin.witness or {}
    lin_ok = (not lin.passed and lw["d(a.v)"]["even_souls"] == ["0"]
              and lw["a.d(v)"]["even_souls"] == ["2*g1*g2"])
    report(5, prop_ok and lin_ok, "propagation witness 0 vs 2*x1; d(a.v)=0 but a.d(v)=2*g1*g2")


def _broken_push(psi, pt):
    souls = [psi(s) for s in pt.even_souls]
    return type(pt)(pt.domain, psi.target, pt.base, souls, pt.formal)


def test_criterion_06_naturality():
    rng = random.Random(6)
    bad = []
    for i in range(50):
        n = rng.randint(1, 2)
        src, tgt = random_domain(rng, n), random_domain(rng, n)
        F = morphism_to_berezin(random_domain_morphism(rng, src, tgt))
        lam, lam2 = random_algebra(rng, n), random_algebra(rng, n)
        psi = random_algebra_morphism(rng, lam, lam2)
        pts = random_points(src, lam, seed=rng.randrange(10**6), count=10)
        if not check_naturality_square(F, psi, pts).passed:
            bad.append(i)
    # negative control: push psi* through the even souls only
    alg = make_algebra(1, [3], 6)
    D = Domain(1, [1])
    F = DomainMorphism(D, D, [{(0,): "x1"}, {(1,): "x1"}])
    psi = AlgebraMorphism(alg, alg, ["g1", "g3", "g2"])
    pt = LambdaPoint(D, alg, [1], ["g2*g3"], ["g1"])
    broken = check_naturality_square(F, psi, [pt], pushforward=_broken_push)
    honest = check_naturality_square(F, psi, [pt])
    ok = not bad and not broken.passed and honest.passed
    report(6, ok, "50 pairs x 10 points commute; broken componentwise map rejected"
           if ok else f"bad={bad[:5]} broken={broken.verdict}")


def _perturbed(rng, phi):
    """``phi`` with one stored coefficient shifted by a small polynomial."""
    fams = [dict(f) for f in phi.pullbacks]
    nonempty = [k for k, f in enumerate(fams) if f]
    if not nonempty:
        return None
    k = rng.choice(nonempty)
    alpha = rng.choice(sorted(fams[k]))
    p = phi.source.p
    bump = BasePolynomial.variable(p, rng.randrange(p)) ** rng.randint(1, 3) if p else 1
    fams[k][alpha] = fams[k][alpha] + bump
    return DomainMorphism(phi.source, phi.target, fams)


def test_criterion_07_separation():
    rng = random.Random(7)
    bad = []
    pairs = 0
    while pairs < 200:
        n = rng.randint(1, 2)
        src, tgt = random_domain(rng, n), random_domain(rng, n)
        phi = random_domain_morphism(rng, src, tgt)
        psi = _perturbed(rng, phi) if pairs % 2 else random_domain_morphism(rng, src, tgt)
        if psi is None or phi == psi:
            continue
        pairs += 1
        _, pt = separating_witness(phi, psi)
        if evaluate(phi, pt) == evaluate(psi, pt):
            bad.append(pairs)
    report(7, not bad, "200 distinct pairs separated, half of them one-coefficient perturbations"
           if not bad else f"failed {bad[:5]}")


def _numeric_fd(F, pt, v, h):
    """Central differences in a base direction with float coefficient values."""
    cache = _PowerCache(pt, pt.truncation)
    out = []
    for fam in F.coefficients:
        acc = {}
        for (alpha, beta), c in fam.items():
            xp = [float(b) + h * float(d) for b, d in zip(pt.base, v.base)]
            xm = [float(b) - h * float(d) for b, d in zip(pt.base, v.base)]
            slope = (c.evaluate_float(xp) - c.evaluate_float(xm)) / (2 * h)
            for m, k in (cache.soul_power(beta) * cache.formal_power(alpha)).items():
                acc[m] = acc.get(m, 0.0) + float(k) * slope
        out.append(acc)
    return out


def _third_derivative_bound(F, pt, v):
    """Max over coefficients of |d^3/dt^3 F(x + t v)| / 6 near the base (cubic data)."""
    worst = 0.0
    for fam in F.coefficients:
        for c in fam.values():
            total = BasePolynomial.zero(c.nvars)
            for a in range(c.nvars):
                total = total + c.derivative(a) * v.base[a]
            for _ in range(2):
                nxt = BasePolynomial.zero(c.nvars)
                for a in range(c.nvars):
                    nxt = nxt + total.derivative(a) * v.base[a]
                total = nxt
            worst = max(worst, abs(float(total.value(pt.base))) / 6)
    return worst


def test_criterion_08_derivatives():
    rng = random.Random(8)
    fd_bad, exact_bad, bound_bad = [], [], []
    worst = {1e-3: 0.0, 1e-4: 0.0}
    for i in range(100):
        n = rng.randint(1, 2)
        src = random_domain(rng, n)
        while src.p == 0:
            src = random_domain(rng, n)
        tgt = random_domain(rng, n)
        phi = random_domain_morphism(rng, src, tgt)
        F = morphism_to_berezin(phi)
        alg = random_algebra(rng, n)
        pt = random_point(rng, src, alg)
        base_dir = TangentVector(src, alg, [rng.choice((1, -1, Fraction(1, 2))) for _ in range(src.p)],
                                 [alg.zero()] * src.p, [alg.zero()] * src.nformal)
        exact = oracles.components(gateaux_derivative(F, pt, base_dir))
        for h in (1e-3, 1e-4):
            fd = _numeric_fd(F, pt, base_dir, h)
            for comp, approx in zip(exact, fd):
                for m, c in comp.items():
                    err = abs(approx.get(m, 0.0) - float(c))
                    worst[h] = max(worst[h], err / abs(float(c)))
                    if h == 1e-4 and err > 1e-6 * abs(float(c)):
                        fd_bad.append(i)
                    # a-priori central-difference error for cubic coefficients
                    if h == 1e-3 and err > h * h * _third_derivative_bound(F, pt, base_dir) * 8 + 1e-9:
                        bound_bad.append(i)
        # general directions, exact against the nilpotent extension
        v = random_tangent(rng, src, alg)
        if oracles.components(gateaux_derivative(F, pt, v)) != oracles.nilpotent_derivative(phi, pt, v):
            exact_bad.append(i)
    ok = not fd_bad and not exact_bad and not bound_bad
    detail = (f"h=1e-4 worst rel err {worst[1e-4]:.1e} <= 1e-6; h=1e-3 worst {worst[1e-3]:.1e} "
              f"within the O(h^2) bound; 100 exact nilpotent-extension matches")
    report(8, ok, detail if ok else f"fd={fd_bad[:3]} exact={exact_bad[:3]} bound={bound_bad[:3]}")


def test_criterion_09_psi_linearity():
    rng = random.Random(9)
    bad = []
    runs = 0
    for i in range(10):
        n = rng.randint(1, 2)
        dom = random_domain(rng, n)
        lam = random_algebra(rng, n)
        psi = random_algebra_morphism(rng, lam, random_algebra(rng, n)) if i else base_projection(lam)
        samples = lambda0_samples(dom, seed=i, count=10, algebra=lam)
        res = check_psi_linearity(psi, samples)
        runs += res.samples_run
        if not res.passed:
            bad.append(i)
    report(9, not bad and runs == 100, f"{runs} samples exact, base projection included"
           if not bad else f"failed {bad}")


def test_criterion_10_rotations():
    rng = random.Random(10)
    bad = []
    for i in range(50):
        n = rng.randint(1, 2)
        base = random_algebra(rng, n, K=4)
        pa = pairing_algebra(base, rng.randint(1, 2), [rng.randint(0, 1) for _ in base.q])
        blocks = random_rotation_blocks(rng, pa)
        R = formal_rotation(pa, blocks)
        if any(R(pa.pairing(a)) != pa.pairing(a) for a in range(pa.p)):
            bad.append(i)
    pa = pairing_algebra(make_algebra(1, [2], 6), 1, [0])
    try:
        formal_rotation(pa, [[[1, 1], [0, 1]]])
        rejected = False
    except ValidationError:
        rejected = True
    report(10, not bad and rejected, "50 random rational orthogonal choices fix the pairing; shear rejected")


def _line_atlas():
    c0 = Chart(0, Domain(1, [1], Box(((0, 2),))))
    c1 = Chart(1, Domain(1, [1], Box(((1, 3),))))
    inv = RationalFunction(BasePolynomial.parse("1", 1), BasePolynomial.parse("1 + x1", 1))
    t01 = make_transition([c0, c1], 0, 1, [(1, 2)], [(1, 2)], [{(0,): "x1"}, {(1,): "1 + x1"}])
    t10 = make_transition([c0, c1], 1, 0, [(1, 2)], [(1, 2)], [{(0,): "x1"}, {(1,): inv}])
    return make_glued_manifold([c0, c1], [t01, t10])


def test_criterion_11_atlas():
    M = _line_atlas()
    ok = M.cocycle_checked and "Taylor-approximated inverse" in M.notes
    charts = [Chart(i, Domain(1, [1], Box(((0, 2),)))) for i in range(3)]
    scale = {(0, 1): 2, (1, 0): Fraction(1, 2), (1, 2): 1, (2, 1): 1, (0, 2): 3, (2, 0): Fraction(1, 3)}
    ts = [make_transition(charts, a, b, [(0, 2)], [(0, 2)], [{(0,): "x1"}, {(1,): s}])
          for (a, b), s in scale.items()]
    try:
        make_glued_manifold(charts, ts)
        witness = None
    except GluingError as exc:
        witness = exc.witness
    ok &= witness is not None and witness["triple"] == [0, 1, 2] and witness["coordinate"] == "xi1"
    rng = random.Random(11)
    overlap = Domain(1, [1], Box(((1, 2),)))
    bad = 0
    for _ in range(100):
        alg = random_algebra(rng, 1)
        local = random_point(rng, overlap, alg)
        local = LambdaPoint(overlap, alg, [Fraction(rng.randint(0, 8), 8) + 1], local.even_souls, local.formal)
        pt = manifold_point(M, 1, local.with_domain(M.chart(1).domain))
        there = transport(M, pt, 1) if pt.chart == 0 else pt
        back = transport(M, there, 0)
        chart1, x1 = fiber_projection(there)
        chart0, x0 = fiber_projection(back)
        ok_here = (chart1, chart0) == (1, 0) and x0 == M.transition(1, 0).morphism.base_map(x1)
        ok_here &= manifold_point(M, 0, back.local) == manifold_point(M, 1, there.local)
        bad += not ok_here
    ok &= bad == 0
    report(11, ok, "Taylor-inverse gluing valid mod K=6; 2-vs-3 triple (0,1,2) rejected; "
           "100 overlap points project consistently")


def test_criterion_12_products_groups():
    rng = random.Random(12)
    bad = 0
    for _ in range(100):
        n = rng.randint(1, 2)
        a, b = random_domain(rng, n), random_domain(rng, n)
        alg = random_algebra(rng, n)
        pa, pb = random_point(rng, a, alg), random_point(rng, b, alg)
        both = product_point(pa, pb)
        bad += split_point(both, a, b) != (pa, pb) or product_point(*split_point(both, a, b)) != both
    G = Domain(0, [1])
    mu = DomainMorphism(product_domain(G, G), G, [{(1, 0): 1, (0, 1): 1}])
    inv = DomainMorphism(G, G, [{(1,): -1}])
    R = make_algebra(1, [0], 6)
    e = LambdaPoint(G, R, [], [], [R.zero()])
    algebras = [make_algebra(1, [k], 6) for k in range(1, 6)]
    group = check_group_object(mu, inv, e, algebras, seed=12, count=20)
    ok = bad == 0 and group.passed and group.samples_run == 100
    report(12, ok, "100 pair/split roundtrips; group laws on 100 points over 5 algebras")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
