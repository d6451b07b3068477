"""Z_2^n degrees, the commutation sign rule and the standard ordering.

A degree is a plain tuple of 0/1 values.  The ambient ``n`` is always the
length of the tuple; there is no global state.
"""

from __future__ import annotations

from itertools import product
from typing import Iterable, Sequence

from .errors import SignatureError

Degree = tuple

MAX_N = 16


def as_degree(bits: Iterable[int], n: int | None = None) -> Degree:
    """Validate ``bits`` and return it as a degree tuple."""
    deg = tuple(int(b) for b in bits)
    if any(b not in (0, 1) for b in deg):
        raise SignatureError(f"degree entries must be 0 or 1, got {deg}")
    if n is not None and len(deg) != n:
        raise SignatureError(f"expected a degree of length {n}, got {deg}")
    if len(deg) > MAX_N:
        raise SignatureError(f"n={len(deg)} exceeds the supported maximum {MAX_N}")
    return deg


def zero_degree(n: int) -> Degree:
    return (0,) * n


def _check_lengths(a: Sequence[int], b: Sequence[int]) -> None:
    if len(a) != len(b):
        raise SignatureError(f"degree length mismatch: {tuple(a)} vs {tuple(b)}")


def degree_add(a: Degree, b: Degree) -> Degree:
    """Componentwise sum mod 2."""
    _check_lengths(a, b)
    return tuple(x ^ y for x, y in zip(a, b))


def scalar_product_parity(a: Degree, b: Degree) -> int:
    """Standard scalar product mod 2; the commutation sign is ``(-1)**result``."""
    _check_lengths(a, b)
    return sum(x & y for x, y in zip(a, b)) & 1


def is_odd(d: Degree) -> bool:
    return scalar_product_parity(d, d) == 1


def is_even(d: Degree) -> bool:
    return not is_odd(d)


def commutation_sign(a: Degree, b: Degree) -> int:
    return -1 if scalar_product_parity(a, b) else 1


def enumerate_nonzero_degrees(n: int) -> list[Degree]:
    """The ``2**n - 1`` nonzero degrees in lexicographic order.

    Entry ``i`` of the list is the degree usually written gamma_{i+1}.
    """
    if n < 0:
        raise SignatureError("n must be nonnegative")
    if n > MAX_N:
        raise SignatureError(f"n={n} exceeds the supported maximum {MAX_N}")
    # itertools.product yields tuples in lexicographic order already
    return [d for d in product((0, 1), repeat=n) if any(d)]


def degree_index(d: Degree) -> int:
    """Position of a nonzero degree in :func:`enumerate_nonzero_degrees`."""
    if not any(d):
        raise SignatureError("the zero degree has no index among nonzero degrees")
    value = 0
    for bit in d:
        value = 2 * value + bit
    return value - 1
