import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mcmopt.numeric import (
    ZeroConstantError,
    ad_lower_bound,
    adder_count_upper_bound,
    csd,
    default_wordlength,
    msb_index,
    normalize_constant,
    odd_targets,
)


def min_signed_digits(c: int, width: int = 8) -> int:
    """Fewest nonzero digits over every {-1,0,1} string of the given width."""
    best = None
    for digits in itertools.product((-1, 0, 1), repeat=width):
        if sum(d << k for k, d in enumerate(digits)) == c:
            n = sum(1 for d in digits if d)
            best = n if best is None else min(best, n)
    return best


@pytest.mark.parametrize(
    "c, odd, shift, negated",
    [(12, 3, 2, False), (-7, 7, 0, True), (49, 49, 0, False), (1, 1, 0, False), (-64, 1, 6, True)],
)
def test_normalize(c, odd, shift, negated):
    n = normalize_constant(c)
    assert (n.odd, n.shift, n.negated) == (odd, shift, negated)
    assert n.reconstruct() == c


def test_normalize_zero():
    with pytest.raises(ZeroConstantError):
        normalize_constant(0)


def test_csd_examples():
    assert csd(7).digits == (-1, 0, 0, 1) and csd(7).nonzero_count == 2
    assert csd(1).digits == (1,) and csd(1).nonzero_count == 1
    f = csd(45)
    assert f.nonzero_count == 4
    assert {k: d for k, d in enumerate(f.digits) if d} == {0: 1, 2: -1, 4: -1, 6: 1}


@pytest.mark.parametrize("c", [0, -3, 4])
def test_csd_rejects(c):
    with pytest.raises(ValueError):
        csd(c)


def test_csd_minimal_against_brute_force():
    for c in range(1, 128, 2):
        assert csd(c).nonzero_count == min_signed_digits(c), c


@given(st.integers(min_value=0, max_value=2**40).map(lambda k: 2 * k + 1))
def test_csd_properties(c):
    f = csd(c)
    assert f.value == c
    assert all(not (a and b) for a, b in zip(f.digits, f.digits[1:]))
    assert f.nonzero_count == sum(1 for d in f.digits if d)


@given(st.integers(min_value=-(2**30), max_value=2**30).filter(bool))
def test_normalize_roundtrip(c):
    n = normalize_constant(c)
    assert n.odd % 2 == 1 and n.reconstruct() == c


@pytest.mark.parametrize("c, bound", [(49, 2), (1, 0), (7, 1), (45, 2), (3, 1)])
def test_ad_lower_bound(c, bound):
    assert ad_lower_bound(c) == bound


@pytest.mark.parametrize("targets, bound", [({7}, 1), ({49, 51}, 5), (set(), 0)])
def test_adder_count_upper_bound(targets, bound):
    assert adder_count_upper_bound(targets) == bound


def test_small_helpers():
    assert odd_targets([12, -7, 3, 1, 8, 6]) == [3, 7]
    assert msb_index(343) == 8
    with pytest.raises(ValueError):
        msb_index(0)
    assert default_wordlength([51]) == 6
    assert default_wordlength([]) == 1
