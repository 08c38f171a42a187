"""Constant preprocessing: odd normalization, CSD recoding and cheap bounds."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable


class ZeroConstantError(ValueError):
    pass


@dataclass(frozen=True)
class OddNormalized:
    original: int
    odd: int
    shift: int
    negated: bool

    def reconstruct(self) -> int:
        value = self.odd << self.shift
        return -value if self.negated else value


@dataclass(frozen=True)
class CsdForm:
    digits: tuple[int, ...]  # least significant first
    nonzero_count: int

    @property
    def value(self) -> int:
        return sum(d << k for k, d in enumerate(self.digits))


def normalize_constant(c: int) -> OddNormalized:
    if c == 0:
        raise ZeroConstantError("zero constant: a zero target needs no adder and must be dropped")
    magnitude = abs(c)
    shift = (magnitude & -magnitude).bit_length() - 1
    return OddNormalized(original=c, odd=magnitude >> shift, shift=shift, negated=c < 0)


def csd(c: int) -> CsdForm:
    """Canonical signed digit form of a positive odd integer (non-adjacent form)."""
    if c < 1 or c % 2 == 0:
        raise ValueError(f"csd expects a positive odd integer, got {c}")
    digits = []
    n = c
    while n:
        if n & 1:
            d = 2 - (n & 3)  # +1 when n = 1 mod 4, -1 when n = 3 mod 4
            n -= d
        else:
            d = 0
        digits.append(d)
        n >>= 1
    return CsdForm(digits=tuple(digits), nonzero_count=sum(1 for d in digits if d))


def ad_lower_bound(c: int) -> int:
    """Lower bound on the adder depth of any graph producing ``c``.

    An adder at depth d sums at most 2**d signed powers of two, so a constant
    with n nonzero CSD digits needs depth ceil(log2(n)).
    """
    n = csd(c).nonzero_count
    return (n - 1).bit_length()


def adder_count_upper_bound(targets: Iterable[int]) -> int:
    """Adders used by the per-constant CSD expansion (no sharing)."""
    return sum(csd(c).nonzero_count - 1 for c in set(targets))


def odd_targets(constants: Iterable[int]) -> list[int]:
    """Distinct odd fundamentals for a list of signed targets, first-seen order, 1 excluded."""
    seen: list[int] = []
    for c in constants:
        odd = normalize_constant(c).odd
        if odd != 1 and odd not in seen:
            seen.append(odd)
    return seen


def msb_index(value: int) -> int:
    """Index of the top set bit of a positive integer."""
    if value < 1:
        raise ValueError("msb of a non-positive value")
    return value.bit_length() - 1


def default_wordlength(odd_constants: Iterable[int]) -> int:
    """ceil(log2(max odd target)), at least 1."""
    top = max(odd_constants, default=1)
    return max(1, (top - 1).bit_length())
