"""Charts, transitions and glued manifolds at the level of Lambda-points.

Transitions carry a :class:`DomainMorphism` from the overlap box in the
source chart to the overlap box in the target chart.  Gluing checks compare
pullbacks exactly when all data are polynomial and through local Taylor
jets at sample points otherwise (Taylor-approximated inverses).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import permutations

from .domains import (
    Box,
    Domain,
    DomainMorphism,
    PolySeries,
    compose_domain_morphisms,
    compose_local,
    identity_domain_morphism,
    sample_points,
)
from .errors import GluingError, RangeError, SignatureError, StructureError
from .galgebra import base_projection
from .points import LambdaPoint, evaluate, push_point
from .polynomials import BasePolynomial
from .verdicts import CheckResult


@dataclass(frozen=True)
class Chart:
    index: int
    domain: Domain

    def __post_init__(self):
        if not isinstance(self.domain.region, Box):
            raise StructureError(f"chart {self.index} needs a box region")


@dataclass
class Transition:
    """``psi_{to,from}``: chart ``source`` coordinates on ``overlap_source``
    to chart ``target`` coordinates on ``overlap_target``."""

    source: int
    target: int
    morphism: DomainMorphism

    @property
    def overlap_source(self) -> Box:
        return self.morphism.source.region

    @property
    def overlap_target(self) -> Box:
        return self.morphism.target.region


def make_transition(charts, source: int, target: int, overlap_source, overlap_target, pullbacks,
                    truncation: int = 6) -> Transition:
    by_index = {c.index: c for c in charts}
    a, b = by_index[source].domain, by_index[target].domain
    src = a.restrict(Box(tuple(overlap_source)) if not isinstance(overlap_source, Box) else overlap_source)
    tgt = b.restrict(Box(tuple(overlap_target)) if not isinstance(overlap_target, Box) else overlap_target)
    return Transition(source, target, DomainMorphism(src, tgt, pullbacks, truncation))


def _local_identity(domain: Domain, x0, K):
    sig = domain.formal_signature
    p = domain.p
    out = []
    for b in range(p):
        poly = BasePolynomial.variable(p, b) + x0[b]
        out.append(PolySeries(sig, p, K, {sig.zero_monomial(): poly}, joint=K))
    for j in range(sig.size):
        out.append(PolySeries(sig, p, K, {sig.unit_monomial(j): BasePolynomial.constant(p, 1)}, joint=K))
    return out


def _first_difference(left, right, names):
    for i, (l, r) in enumerate(zip(left, right)):
        if l != r:
            return {"coordinate": names[i], "composite": str(l), "expected": str(r)}
    return None


def _compare_composite(g: DomainMorphism, f: DomainMorphism, expected, region, K):
    """Compare ``g o f`` with ``expected`` on ``region``.

    ``expected`` is a DomainMorphism or ``None`` for the identity.  Returns
    ``(difference or None, base point or None, samples)``.
    """
    names = f.source.coordinate_names("x", "xi")
    polynomial = f.is_polynomial and g.is_polynomial and (expected is None or expected.is_polynomial)
    points = [x for x in sample_points(region, f.source.p, max(f.max_degree(), 1))
              if g.source.contains(f.base_map(x))]
    if not points:
        return None, None, 0
    if polynomial:
        # the triple overlap is cut out pointwise, so compose without region guards
        free = DomainMorphism(g.source.restrict(None), g.target, g.pullbacks, g.truncation,
                              check_base=False)
        gf = compose_domain_morphisms(free, f)
        want = expected if expected is not None else identity_domain_morphism(f.source, K)
        sig = f.source.formal_signature
        left = [PolySeries(sig, f.source.p, K, fam) for fam in gf.pullbacks]
        right = [PolySeries(sig, f.source.p, K, fam) for fam in want.pullbacks]
        diff = _first_difference(left, right, names)
        return diff, None, len(points)
    for x in points:
        left = compose_local(g, f, x, K)
        right = _local_identity(f.source, x, K) if expected is None else expected.local_pullbacks(x, K)
        diff = _first_difference(left, right, names)
        if diff is not None:
            return diff, x, len(points)
    return None, None, len(points)


@dataclass
class GluedManifold:
    charts: list
    transitions: dict  # (source, target) -> Transition
    truncation: int = 6
    report: CheckResult | None = None
    notes: list = field(default_factory=list)

    @property
    def cocycle_checked(self) -> bool:
        return self.report is not None and self.report.passed

    def chart(self, index) -> Chart:
        for c in self.charts:
            if c.index == index:
                return c
        raise StructureError(f"no chart {index}")

    def transition(self, source, target) -> Transition | None:
        return self.transitions.get((source, target))


def check_inverse_pairs(charts, transitions: dict, K: int) -> CheckResult:
    samples = 0
    for (a, b), t in sorted(transitions.items()):
        back = transitions.get((b, a))
        if back is None:
            raise StructureError(f"transition {a}->{b} has no inverse {b}->{a}")
        diff, x, n = _compare_composite(back.morphism, t.morphism, None, t.overlap_source, K)
        samples += n
        if diff is not None:
            return CheckResult(
                False,
                [{"pair": [a, b], "base": None if x is None else [str(v) for v in x], **diff}],
                samples_run=samples, effective_truncation=K,
            )
    return CheckResult(True, [], samples_run=samples, effective_truncation=K)


def check_cocycle(charts, transitions: dict, K: int) -> CheckResult:
    """``psi_{bc} o psi_{ca} = psi_{ba}`` on every nonempty triple overlap.

    Triples ``(a, b, c)`` run over distinct chart indices in lexicographic
    order; the overlap is taken in chart ``a`` coordinates.
    """
    samples = 0
    indices = sorted(c.index for c in charts)
    for a, b, c in permutations(indices, 3):
        t_ca = transitions.get((a, c))
        t_bc = transitions.get((c, b))
        t_ba = transitions.get((a, b))
        if t_ca is None or t_bc is None or t_ba is None:
            continue
        region = t_ca.overlap_source.intersect(t_ba.overlap_source)
        if region is None:
            continue
        diff, x, n = _compare_composite(t_bc.morphism, t_ca.morphism, t_ba.morphism, region, K)
        samples += n
        if diff is not None:
            return CheckResult(
                False,
                [{"triple": [a, b, c],
                  "law": f"psi_{b}{c} o psi_{c}{a} = psi_{b}{a}",
                  "base": None if x is None else [str(v) for v in x], **diff}],
                samples_run=samples, effective_truncation=K,
            )
    return CheckResult(True, [], samples_run=samples, effective_truncation=K)


def make_glued_manifold(charts, transitions, truncation: int = 6) -> GluedManifold:
    """Validate the atlas data and glue."""
    charts = sorted(charts, key=lambda c: c.index)
    shapes = {(c.domain.p, c.domain.q) for c in charts}
    if len(shapes) > 1:
        raise StructureError("charts have different dimensions")
    table = {}
    for t in transitions:
        if (t.source, t.target) in table:
            raise StructureError(f"duplicate transition {t.source}->{t.target}")
        for idx, box in ((t.source, t.overlap_source), (t.target, t.overlap_target)):
            region = next((c.domain.region for c in charts if c.index == idx), None)
            if region is None:
                raise StructureError(f"transition refers to unknown chart {idx}")
            if region.intersect(box) != box:
                raise StructureError(f"overlap {box.bounds} is not inside chart {idx}")
        table[(t.source, t.target)] = t
    K = min([truncation] + [t.morphism.truncation for t in transitions])
    inv = check_inverse_pairs(charts, table, K)
    if not inv.passed:
        raise StructureError(f"transition inverse check failed: {inv.witness}")
    coc = check_cocycle(charts, table, K)
    if not coc.passed:
        raise GluingError(f"cocycle violated: {coc.witness}", witness=coc.witness)
    notes = []
    if any(t.morphism.taylor_approximated for t in transitions):
        notes.append("Taylor-approximated inverse")
    report = CheckResult(
        True, [], samples_run=inv.samples_run + coc.samples_run, effective_truncation=K, notes=notes,
    )
    return GluedManifold(charts, table, K, report, notes)


# ---------------------------------------------------------------------------
# points


@dataclass(frozen=True)
class ManifoldPoint:
    chart: int
    local: LambdaPoint


def transport(M: GluedManifold, pt: ManifoldPoint, target: int) -> ManifoldPoint:
    """Re-express ``pt`` in chart ``target`` through the transition."""
    if target == pt.chart:
        return pt
    t = M.transition(pt.chart, target)
    if t is None or not t.overlap_source.contains(pt.local.base):
        raise RangeError(f"point is not in the overlap of charts {pt.chart} and {target}",
                         witness=pt.local.base)
    image = evaluate(t.morphism, pt.local.with_domain(t.morphism.source))
    return ManifoldPoint(target, image.with_domain(M.chart(target).domain))


def manifold_point(M: GluedManifold, chart: int, local: LambdaPoint) -> ManifoldPoint:
    """Canonical representative: the smallest chart reachable from ``chart``
    whose region contains the transported base."""
    domain = M.chart(chart).domain
    if not domain.same_shape(local.domain):
        raise SignatureError("local point has the wrong shape")
    if not domain.contains(local.base):
        raise RangeError(f"base is outside chart {chart}", witness=local.base)
    pt = ManifoldPoint(chart, local.with_domain(domain))
    for c in M.charts:
        if c.index >= chart:
            break
        t = M.transition(chart, c.index)
        if t is not None and t.overlap_source.contains(local.base):
            return transport(M, pt, c.index)
    return pt


def fiber_projection(pt: ManifoldPoint):
    """``(chart, x_||)``: the image under M(p*), read in coordinates."""
    image = push_point(base_projection(pt.local.algebra), pt.local)
    return pt.chart, image.base


# ---------------------------------------------------------------------------
# products


def product_domain(a: Domain, b: Domain) -> Domain:
    if a.n != b.n:
        raise SignatureError("factors have different n")
    if a.region is None and b.region is None:
        region = None
    else:
        ra = a.region.bounds if a.region is not None else None
        rb = b.region.bounds if b.region is not None else None
        if ra is None or rb is None:
            raise SignatureError("products mix bounded and unbounded regions")
        region = Box(ra + rb)
    return Domain(a.p + b.p, tuple(x + y for x, y in zip(a.q, b.q)), region)


def _formal_layout(a: Domain, b: Domain):
    """Positions of each factor's formal coordinates in the product."""
    la, lb = [], []
    pos = 0
    sa, sb = a.formal_signature, b.formal_signature
    for g in range(len(a.q)):
        for _ in sa.group_slice(g):
            la.append(pos)
            pos += 1
        for _ in sb.group_slice(g):
            lb.append(pos)
            pos += 1
    return la, lb


def product_point(pa: LambdaPoint, pb: LambdaPoint, domain: Domain | None = None) -> LambdaPoint:
    if pa.algebra != pb.algebra:
        raise SignatureError("factor points live over different algebras")
    dom = domain or product_domain(pa.domain, pb.domain)
    la, lb = _formal_layout(pa.domain, pb.domain)
    formal = [None] * dom.nformal
    for pos, s in zip(la, pa.formal):
        formal[pos] = s
    for pos, s in zip(lb, pb.formal):
        formal[pos] = s
    return LambdaPoint(dom, pa.algebra, pa.base + pb.base, pa.even_souls + pb.even_souls, formal)


def split_point(pt: LambdaPoint, a: Domain, b: Domain):
    la, lb = _formal_layout(a, b)
    p = a.p
    left = LambdaPoint(a, pt.algebra, pt.base[:p], pt.even_souls[:p], [pt.formal[i] for i in la])
    right = LambdaPoint(b, pt.algebra, pt.base[p:], pt.even_souls[p:], [pt.formal[i] for i in lb])
    return left, right


def _embed_alpha(alpha, layout, total):
    out = [0] * total
    for e, pos in zip(alpha, layout):
        out[pos] = e
    return tuple(out)


def _embed_poly(poly: BasePolynomial, offset: int, total: int) -> BasePolynomial:
    terms = {}
    for beta, c in poly.items():
        full = [0] * total
        full[offset:offset + len(beta)] = beta
        terms[tuple(full)] = c
    return BasePolynomial(total, terms)


def product_morphism(f: DomainMorphism, g: DomainMorphism) -> DomainMorphism:
    """``f x g`` on the product domains (polynomial data)."""
    src = product_domain(f.source, g.source)
    tgt = product_domain(f.target, g.target)
    la, lb = _formal_layout(f.source, g.source)
    ta, tb = _formal_layout(f.target, g.target)
    P = src.p

    def lift(fam, layout, offset):
        return {_embed_alpha(alpha, layout, src.nformal): _embed_poly(c, offset, P)
                for alpha, c in fam.items()}

    fa = [lift(fam, la, 0) for fam in f.pullbacks]
    fb = [lift(fam, lb, f.source.p) for fam in g.pullbacks]
    fams = fa[:f.target.p] + fb[:g.target.p] + [None] * tgt.nformal
    for pos, fam in zip(ta, fa[f.target.p:]):
        fams[tgt.p + pos] = fam
    for pos, fam in zip(tb, fb[g.target.p:]):
        fams[tgt.p + pos] = fam
    return DomainMorphism(src, tgt, fams, min(f.truncation, g.truncation), check_base=False)


def product_manifold(M: GluedManifold, N: GluedManifold) -> GluedManifold:
    """Charts indexed by pairs, flattened as ``i * len(N.charts) + j``."""
    width = len(N.charts)
    charts = []
    index = {}
    for i, cm in enumerate(M.charts):
        for j, cn in enumerate(N.charts):
            k = i * width + j
            index[(cm.index, cn.index)] = k
            charts.append(Chart(k, product_domain(cm.domain, cn.domain)))
    transitions = []
    K = min(M.truncation, N.truncation)
    for (m1, n1), k1 in index.items():
        for (m2, n2), k2 in index.items():
            if k1 == k2:
                continue
            tm = M.transition(m1, m2) if m1 != m2 else None
            tn = N.transition(n1, n2) if n1 != n2 else None
            if (m1 != m2 and tm is None) or (n1 != n2 and tn is None):
                continue
            fm = tm.morphism if tm else identity_domain_morphism(M.chart(m1).domain, K)
            fn = tn.morphism if tn else identity_domain_morphism(N.chart(n1).domain, K)
            transitions.append(Transition(k1, k2, product_morphism(fm, fn)))
    return make_glued_manifold(charts, transitions, K)


# ---------------------------------------------------------------------------
# group objects


def check_group_object(mu: DomainMorphism, inv: DomainMorphism, unit: LambdaPoint,
                       algebras, *, seed: int = 0, count: int = 20) -> CheckResult:
    """Associativity, unit and inverse laws of the induced group on G(Lambda).

    ``unit`` is the Lambda-point over R of the identity element; it is
    pushed into each algebra along the unit inclusion.
    """
    from .galgebra import unit_morphism
    from .sampling import random_point

    G = inv.source
    if not (mu.target.same_shape(G) and mu.source.same_shape(product_domain(G, G))):
        raise SignatureError("mu must map G x G to G")
    rng = random.Random(seed)
    samples = 0
    ks = []

    def mul(x, y):
        return evaluate(mu, product_point(x, y, mu.source)).with_domain(G)

    for alg in algebras:
        e = push_point(unit_morphism(alg), unit.with_domain(G))
        for _ in range(count):
            x, y, z = (random_point(rng, G, alg) for _ in range(3))
            samples += 1
            checks = {
                "associativity": (mul(mul(x, y), z), mul(x, mul(y, z))),
                "left unit": (mul(e, x), x),
                "right unit": (mul(x, e), x),
                "left inverse": (mul(evaluate(inv, x), x), e),
                "right inverse": (mul(x, evaluate(inv, x)), e),
            }
            for law, (lhs, rhs) in checks.items():
                K = min(lhs.truncation, rhs.truncation)
                ks.append(K)
                if lhs.truncate(K) != rhs.truncate(K):
                    return CheckResult(
                        False,
                        [{"law": law, "algebra": str(alg), "x": x.to_json(), "y": y.to_json(),
                          "z": z.to_json(), "lhs": lhs.to_json(), "rhs": rhs.to_json()}],
                        samples_run=samples, effective_truncation=min(ks),
                    )
    return CheckResult(True, [], samples_run=samples, effective_truncation=min(ks, default=None))
