"""Fixed-weight ballot strings and the swap pairing between two of them.

Strings are ordinary ``str`` objects over ``"01"``.  Bit positions are
numbered from 1 starting at the rightmost character, and the 1-based index
``pi`` of a string is its rank within its weight class in increasing binary
value.
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from math import comb

from .errors import InvalidArgument, ResourceLimit

MAX_LENGTH = 24


def weight(bits: str) -> int:
    return bits.count("1")


def bit_at(bits: str, position: int) -> str:
    """Character at a right-to-left 1-based position."""
    return bits[len(bits) - position]


def _check_bits(bits, n=None):
    if not bits or set(bits) - {"0", "1"}:
        raise InvalidArgument(f"not a bit string: {bits!r}")
    if n is not None and len(bits) != n:
        raise InvalidArgument(f"expected {n} bits, got {bits!r}")


@dataclass(frozen=True)
class WeightClass:
    """All ``n``-bit strings with exactly ``s`` ones, sorted by value."""

    n: int
    s: int
    strings: tuple

    @property
    def dim(self) -> int:
        return len(self.strings)

    @cached_property
    def indices(self) -> tuple:
        """Basis indices of the strings, i.e. their binary values."""
        return tuple(int(b, 2) for b in self.strings)

    def string_of(self, pi: int) -> str:
        if not 1 <= pi <= len(self.strings):
            raise InvalidArgument(f"pi={pi} outside 1..{len(self.strings)}")
        return self.strings[pi - 1]

    def __len__(self):
        return len(self.strings)

    def __iter__(self):
        return iter(self.strings)


def enumerate_weight_class(n: int, s: int) -> WeightClass:
    if n < 1:
        raise InvalidArgument(f"string length must be positive, got {n}")
    if n > MAX_LENGTH:
        raise ResourceLimit(f"string length {n} exceeds the cap of {MAX_LENGTH}")
    if not 0 <= s <= n:
        raise InvalidArgument(f"weight s={s} outside 0..{n}")
    values = sorted(sum(1 << p for p in ones) for ones in combinations(range(n), s))
    strings = tuple(format(v, f"0{n}b") for v in values)
    assert len(strings) == comb(n, s)
    return WeightClass(n, s, strings)


def index_of(cls: WeightClass, bits: str) -> int:
    """1-based index ``pi`` of ``bits`` within ``cls``."""
    _check_bits(bits, cls.n)
    if weight(bits) != cls.s:
        raise InvalidArgument(f"{bits!r} has weight {weight(bits)}, expected {cls.s}")
    values = cls.indices
    return bisect.bisect_left(values, int(bits, 2)) + 1


def diff_sets(m: str, m_prime: str) -> tuple:
    """Positions where the strings differ, split by the bit value in ``m``.

    Returns ``(w0, w1)``: ``w0`` holds positions where ``m`` has 0 (and
    ``m_prime`` has 1), ``w1`` those where ``m`` has 1.
    """
    _check_bits(m)
    _check_bits(m_prime, len(m))
    if weight(m) != weight(m_prime):
        raise InvalidArgument(f"{m!r} and {m_prime!r} have different weights")
    n = len(m)
    w0 = frozenset(p for p in range(1, n + 1) if bit_at(m, p) == "0" and bit_at(m_prime, p) == "1")
    w1 = frozenset(p for p in range(1, n + 1) if bit_at(m, p) == "1" and bit_at(m_prime, p) == "0")
    return w0, w1


@dataclass(frozen=True)
class SwapPairing:
    """Disjoint position pairs; each pair is ``(0-position, 1-position)``."""

    pairs: tuple = ()

    def __post_init__(self):
        pairs = tuple((int(a), int(b)) for a, b in self.pairs)
        flat = [p for pair in pairs for p in pair]
        if len(set(flat)) != len(flat):
            raise InvalidArgument(f"positions repeat within pairing {pairs}")
        object.__setattr__(self, "pairs", pairs)

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)


def swap_pairing(m: str, m_prime: str) -> SwapPairing:
    """Pair the k-th smallest position of ``w0`` with the k-th smallest of ``w1``."""
    w0, w1 = diff_sets(m, m_prime)
    return SwapPairing(tuple(zip(sorted(w0), sorted(w1))))


def apply_swaps(m: str, pairing) -> str:
    _check_bits(m)
    n = len(m)
    chars = list(m)
    for a, b in pairing:
        if not (1 <= a <= n and 1 <= b <= n):
            raise InvalidArgument(f"swap ({a}, {b}) outside positions 1..{n}")
        chars[n - a], chars[n - b] = chars[n - b], chars[n - a]
    return "".join(chars)
