"""Z_2^n-Grassmann algebras and their morphisms.

Via the isomorphism between Z_2^n-points and Grassmann algebras, a
:class:`GrassmannAlgebra` also stands for the point R^{0|q}; products of
points correspond to :func:`algebra_product`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import GradingError, SignatureError, TruncationError
from .gseries import GeneratorSignature, GradedSeries, truncate


@dataclass(frozen=True)
class GrassmannAlgebra:
    signature: GeneratorSignature
    truncation: int = 6

    def __post_init__(self):
        if self.truncation < 0:
            raise TruncationError("truncation order must be nonnegative")

    @property
    def n(self) -> int:
        return self.signature.n

    @property
    def q(self) -> tuple:
        return self.signature.q

    @property
    def size(self) -> int:
        return self.signature.size

    def zero(self) -> GradedSeries:
        return GradedSeries.zero(self.signature, self.truncation)

    def one(self) -> GradedSeries:
        return self.constant(1)

    def constant(self, value) -> GradedSeries:
        return GradedSeries.constant(self.signature, self.truncation, value)

    def gen(self, j: int) -> GradedSeries:
        """The ``j``-th generator (0-based)."""
        return GradedSeries.generator(self.signature, self.truncation, j)

    @property
    def generators(self) -> tuple:
        return tuple(self.gen(j) for j in range(self.size))

    def series(self, terms) -> GradedSeries:
        return GradedSeries(self.signature, self.truncation, terms)

    def parse(self, text: str) -> GradedSeries:
        from .parsing import parse_series_expression

        return parse_series_expression(text, self)

    def with_truncation(self, K: int) -> GrassmannAlgebra:
        return GrassmannAlgebra(self.signature, K)

    def owns(self, s: GradedSeries) -> bool:
        return s.signature == self.signature

    def __str__(self):
        return f"Lambda^{self.q} (n={self.n}, K={self.truncation})"


def make_algebra(n: int, q: Sequence[int], K: int = 6) -> GrassmannAlgebra:
    return GrassmannAlgebra(GeneratorSignature(n, tuple(q)), K)


class AlgebraMorphism:
    """Unital, degree-preserving algebra map, given on generators.

    Images are validated eagerly.  When the source and target truncation
    orders differ, every result is only known modulo the smaller order,
    which is recorded as :attr:`effective_truncation`.
    """

    def __init__(self, source: GrassmannAlgebra, target: GrassmannAlgebra,
                 images: Sequence):
        if source.n != target.n:
            raise SignatureError(f"n mismatch: {source.n} vs {target.n}")
        images = tuple(images)
        if len(images) != source.size:
            raise SignatureError(
                f"need {source.size} generator images, got {len(images)}"
            )
        self.source = source
        self.target = target
        self.effective_truncation = min(source.truncation, target.truncation)
        checked = []
        for j, img in enumerate(images):
            if isinstance(img, str):
                img = target.parse(img)
            elif not isinstance(img, GradedSeries):
                img = target.constant(img)
            if img.signature != target.signature:
                raise SignatureError(f"image of generator {j + 1} is not over the target algebra")
            if img.truncation < self.effective_truncation:
                raise TruncationError(f"image of generator {j + 1} is known only to order {img.truncation}")
            img = truncate(img, self.effective_truncation)
            want = source.signature.generator_degrees[j]
            if not img.is_homogeneous(want):
                raise GradingError(
                    f"image of generator g{j + 1} must have degree {want}, got {sorted(img.degrees())}"
                )
            checked.append(img)
        self.images = tuple(checked)

    def __call__(self, s: GradedSeries) -> GradedSeries:
        return apply_morphism(self, s)

    def __eq__(self, other):
        if not isinstance(other, AlgebraMorphism):
            return NotImplemented
        return (
            self.source == other.source
            and self.target == other.target
            and self.images == other.images
        )

    def __hash__(self):
        return hash((self.source, self.target, self.images))

    def __repr__(self):
        imgs = ", ".join(f"g{j + 1} -> {img}" for j, img in enumerate(self.images))
        return f"AlgebraMorphism({self.source} -> {self.target}: {imgs})"


def make_morphism(source: GrassmannAlgebra, target: GrassmannAlgebra, images) -> AlgebraMorphism:
    return AlgebraMorphism(source, target, images)


def identity_morphism(alg: GrassmannAlgebra) -> AlgebraMorphism:
    return AlgebraMorphism(alg, alg, alg.generators)


def apply_morphism(m: AlgebraMorphism, s: GradedSeries) -> GradedSeries:
    """Substitute generator images into every monomial of ``s``."""
    if s.signature != m.source.signature:
        raise SignatureError("series is not over the morphism's source algebra")
    K = min(m.effective_truncation, s.truncation)
    sig = m.target.signature
    images = [truncate(img, K) for img in m.images]
    powers: dict = {}

    def power(j, e):
        key = (j, e)
        if key not in powers:
            powers[key] = images[j] ** e
        return powers[key]

    acc = GradedSeries.zero(sig, K)
    for mono, c in s.items():
        if sum(mono) > K:
            continue
        term = GradedSeries.constant(sig, K, c)
        for j, e in enumerate(mono):
            if e:
                term = term * power(j, e)
                if term.is_zero():
                    break
        acc = acc + term
    return acc


def compose_morphisms(g: AlgebraMorphism, f: AlgebraMorphism) -> AlgebraMorphism:
    """``g o f`` (apply ``f`` first)."""
    if f.target.signature != g.source.signature:
        raise SignatureError("cannot compose: f's target is not g's source")
    K = min(f.effective_truncation, g.effective_truncation)
    target = g.target if K == g.target.truncation else g.target.with_truncation(K)
    images = [apply_morphism(g, img) for img in f.images]
    images = [truncate(img, K) for img in images]
    return AlgebraMorphism(f.source, target, images)


def base_projection(alg: GrassmannAlgebra) -> AlgebraMorphism:
    """The canonical projection onto R (the algebra with no generators)."""
    target = make_algebra(alg.n, (0,) * len(alg.q), alg.truncation)
    return AlgebraMorphism(alg, target, [target.zero()] * alg.size)


def unit_morphism(alg: GrassmannAlgebra) -> AlgebraMorphism:
    """The inclusion of R (no generators) as constants of ``alg``."""
    source = make_algebra(alg.n, (0,) * len(alg.q), alg.truncation)
    return AlgebraMorphism(source, alg, [])


def _group_inclusion(small: GrassmannAlgebra, big: GrassmannAlgebra, offsets) -> AlgebraMorphism:
    images = []
    for pos in range(len(small.q)):
        for k, _ in enumerate(small.signature.group_slice(pos)):
            images.append(big.gen(big.signature.group_slice(pos).start + offsets[pos] + k))
    return AlgebraMorphism(small, big, images)


def algebra_product(a: GrassmannAlgebra, b: GrassmannAlgebra):
    """R^{0|m} x R^{0|n} = R^{0|m+n}.

    Returns ``(product, incl_a, incl_b)`` where the inclusions send the
    generators of each factor to their copies in the product.
    """
    if a.n != b.n:
        raise SignatureError(f"n mismatch: {a.n} vs {b.n}")
    K = min(a.truncation, b.truncation)
    prod = make_algebra(a.n, tuple(x + y for x, y in zip(a.q, b.q)), K)
    a_k, b_k = a.with_truncation(K), b.with_truncation(K)
    incl_a = _group_inclusion(a_k, prod, [0] * len(a.q))
    incl_b = _group_inclusion(b_k, prod, list(a.q))
    return prod, incl_a, incl_b


def directed_supremum(a: GrassmannAlgebra, b: GrassmannAlgebra):
    """Componentwise-max signature together with both inclusions."""
    if a.n != b.n:
        raise SignatureError(f"n mismatch: {a.n} vs {b.n}")
    K = min(a.truncation, b.truncation)
    sup = make_algebra(a.n, tuple(max(x, y) for x, y in zip(a.q, b.q)), K)
    zeros = [0] * len(a.q)
    return (
        sup,
        _group_inclusion(a.with_truncation(K), sup, zeros),
        _group_inclusion(b.with_truncation(K), sup, zeros),
    )

