"""Auxiliary pairing algebras and formal rotations.

For a point over Lambda with generators theta^lambda, the pairing algebra
Lambda' has generators eta^{a lambda}, zeta^b_kappa (degrees copied from
theta) and psi^A (degrees of the formal coordinates).  Every soul then
factors as ``x°^a = sum_lambda eta^{a lambda} zeta^a_lambda`` upstairs, and
rotations of the lambda index inside each degree group fix that pairing.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .domains import Domain
from .errors import GradingError, SignatureError, ValidationError
from .galgebra import AlgebraMorphism, GrassmannAlgebra, apply_morphism, make_algebra


@dataclass(frozen=True)
class PairingAlgebra:
    """Lambda' together with the index maps of its three generator families."""

    algebra: GrassmannAlgebra
    base: GrassmannAlgebra  # the Lambda whose generators are paired
    p: int
    eta_index: dict  # (a, lam) -> generator position
    zeta_index: dict  # (b, kappa) -> generator position
    psi_index: tuple  # A -> generator position

    def eta(self, a, lam):
        return self.algebra.gen(self.eta_index[(a, lam)])

    def zeta(self, b, kappa):
        return self.algebra.gen(self.zeta_index[(b, kappa)])

    def psi(self, A):
        return self.algebra.gen(self.psi_index[A])

    def pairing(self, a):
        """``sum_lambda eta^{a lambda} zeta^a_lambda``."""
        acc = self.algebra.zero()
        for lam in range(self.base.size):
            acc = acc + self.eta(a, lam) * self.zeta(a, lam)
        return acc


def pairing_algebra(base: GrassmannAlgebra, p: int, formal_q) -> PairingAlgebra:
    """Build Lambda' for ``p`` even coordinates and formal shape ``formal_q``.

    Inside each degree group the generators are listed as all eta's, then
    all zeta's, then the psi's.
    """
    formal_q = tuple(formal_q)
    if len(formal_q) != len(base.q):
        raise SignatureError("formal shape and algebra have different n")
    groups = [base.signature.group_slice(pos) for pos in range(len(base.q))]
    q_new = []
    eta, zeta, psi = {}, {}, []
    pos = 0
    for g, group in enumerate(groups):
        for a in range(p):
            for lam in group:
                eta[(a, lam)] = pos
                pos += 1
        for b in range(p):
            for kappa in group:
                zeta[(b, kappa)] = pos
                pos += 1
        for _ in range(formal_q[g]):
            psi.append(pos)
            pos += 1
        q_new.append(2 * p * len(group) + formal_q[g])
    alg = make_algebra(base.n, q_new, base.truncation)
    return PairingAlgebra(alg, base, p, eta, zeta, tuple(psi))


def _split_soul(alg: GrassmannAlgebra, soul):
    """Write a degree-zero soul as ``sum_lambda R_lambda theta^lambda``.

    Each monomial is split off at its first generator; moving that
    generator to the right costs the sign of its self-pairing.
    """
    sig = alg.signature
    parts = [dict() for _ in range(alg.size)]
    for m, c in soul.items():
        lam = next(j for j, e in enumerate(m) if e)
        rest = m[:lam] + (m[lam] - 1,) + m[lam + 1:]
        sign = -1 if sig.odd[lam] else 1
        parts[lam][rest] = parts[lam].get(rest, 0) + sign * c
    return [alg.series(t) for t in parts]


def step1_lift(pt):
    """Lift a Lambda-point to the pairing algebra.

    Returns ``(pa, lifted, phi)`` with ``push_point(phi, lifted) == pt``,
    where the lifted souls are exactly the pairings.
    """
    from .points import LambdaPoint

    alg = pt.algebra
    pa = pairing_algebra(alg, pt.domain.p, pt.domain.q)
    images = [None] * pa.algebra.size
    for a, soul in enumerate(pt.even_souls):
        for lam, r in enumerate(_split_soul(alg, soul)):
            images[pa.eta_index[(a, lam)]] = r
    for (b, kappa), pos in pa.zeta_index.items():
        images[pos] = alg.gen(kappa)
    for A, pos in enumerate(pa.psi_index):
        images[pos] = pt.formal[A]
    phi = AlgebraMorphism(pa.algebra, alg, images)
    lifted = LambdaPoint(
        pt.domain, pa.algebra, pt.base,
        [pa.pairing(a) for a in range(pt.domain.p)],
        [pa.psi(A) for A in range(len(pa.psi_index))],
    )
    return pa, lifted, phi


def _matrix(block, size):
    rows = [[Fraction(v) for v in row] for row in block]
    if len(rows) != size or any(len(r) != size for r in rows):
        raise ValidationError(f"block must be {size}x{size}")
    return rows


def _is_orthogonal(O) -> bool:
    size = len(O)
    for i in range(size):
        for j in range(size):
            dot = sum(O[i][k] * O[j][k] for k in range(size))
            if dot != (1 if i == j else 0):
                return False
    return True


def formal_rotation(pa: PairingAlgebra, blocks) -> AlgebraMorphism:
    """``R*`` rotating the lambda index of eta^{a.} and zeta^a_. by ``O^a``.

    ``blocks[a]`` is a square matrix over the generators of the paired
    algebra; it must be orthogonal and must not mix degree groups.
    """
    blocks = list(blocks)
    if len(blocks) != pa.p:
        raise ValidationError(f"need {pa.p} blocks, got {len(blocks)}")
    size = pa.base.size
    degs = pa.base.signature.generator_degrees
    mats = []
    for a, block in enumerate(blocks):
        O = _matrix(block, size)
        for i in range(size):
            for j in range(size):
                if O[i][j] and degs[i] != degs[j]:
                    raise GradingError(
                        f"block {a + 1} mixes generators {i + 1} and {j + 1} of different degrees"
                    )
        if not _is_orthogonal(O):
            raise ValidationError(f"block {a + 1} is not orthogonal")
        mats.append(O)
    alg = pa.algebra
    images = [alg.gen(j) for j in range(alg.size)]
    for a, O in enumerate(mats):
        for lam in range(size):
            eta = alg.zero()
            zeta = alg.zero()
            for k in range(size):
                if O[k][lam]:
                    eta = eta + pa.eta(a, k) * O[k][lam]
                    zeta = zeta + pa.zeta(a, k) * O[k][lam]
            images[pa.eta_index[(a, lam)]] = eta
            images[pa.zeta_index[(a, lam)]] = zeta
    R = AlgebraMorphism(alg, alg, images)
    for a in range(pa.p):
        pairing = pa.pairing(a)
        if apply_morphism(R, pairing) != pairing:
            raise AssertionError(f"rotation failed to fix pairing {a + 1}")
    return R


def _solve(M, B):
    """``M^{-1} B`` by Gauss-Jordan elimination over the rationals."""
    n = len(M)
    aug = [list(M[i]) + list(B[i]) for i in range(n)]
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col])
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def cayley_orthogonal(A):
    """Rational orthogonal matrix ``(I + A)^{-1} (I - A)`` from skew ``A``."""
    n = len(A)
    eye = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    plus = [[eye[i][j] + A[i][j] for j in range(n)] for i in range(n)]
    minus = [[eye[i][j] - A[i][j] for j in range(n)] for i in range(n)]
    return _solve(plus, minus)


def random_orthogonal(rng: random.Random, size: int):
    A = [[Fraction(0)] * size for _ in range(size)]
    for i in range(size):
        for j in range(i + 1, size):
            v = Fraction(rng.randint(-3, 3), rng.randint(1, 3))
            A[i][j], A[j][i] = v, -v
    return cayley_orthogonal(A)


def random_rotation_blocks(rng: random.Random, pa: PairingAlgebra) -> list:
    """One block-diagonal orthogonal matrix per even coordinate."""
    size = pa.base.size
    sig = pa.base.signature
    blocks = []
    for _ in range(pa.p):
        O = [[Fraction(0)] * size for _ in range(size)]
        for pos in range(len(pa.base.q)):
            group = list(sig.group_slice(pos))
            if not group:
                continue
            Q = random_orthogonal(rng, len(group))
            for i, gi in enumerate(group):
                for j, gj in enumerate(group):
                    O[gi][gj] = Q[i][j]
        blocks.append(O)
    return blocks


def pairing_domain_point(pa: PairingAlgebra, domain: Domain, base):
    """The generic point of ``domain`` over Lambda' (souls are the pairings)."""
    from .points import LambdaPoint

    return LambdaPoint(
        domain, pa.algebra, base,
        [pa.pairing(a) for a in range(pa.p)],
        [pa.psi(A) for A in range(len(pa.psi_index))],
    )
