import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from matching.dynamics import bifurcation_member
from matching.symbolic import (V, VF, W, WF, Word, interval_from_pseudocenter,
                               is_pseudocenter, matching_index, word_norm)
from matching.windows import (ExponentSequence, Incomparable, NotMinimal, alo_compare,
                              cf_encode, is_admissible, plateau_scan, tuning_index,
                              tuning_window, window_bifurcation_member, window_blocks,
                              window_digits, window_pseudocenter_word)

HALF = interval_from_pseudocenter(F(1, 2), 2)
EIGHTH = interval_from_pseudocenter(F(1, 8), 2)
SEEDS = [HALF, EIGHTH, interval_from_pseudocenter(F(3, 16), 2),
         interval_from_pseudocenter(F(7, 32), 2), interval_from_pseudocenter(F(2, 3), 3)]


def W2(text):
    return Word.parse(text, 2)


def test_tuning_window_examples():
    t = tuning_window(HALF)
    assert (t.xi_T, t.xi_R) == (F(1, 6), F(2, 3))
    assert tuning_window(EIGHTH).xi_T == F(13, 120)
    t = tuning_window(interval_from_pseudocenter(F(2, 3), 3))
    assert (t.xi_T, t.xi_R) == (F(3, 4) - F(1, 3), F(3, 4))
    assert t.to_json()["xiT"] == "5/12"


@pytest.mark.parametrize("seed", SEEDS)
def test_window_contains_seed_interval(seed):
    t = tuning_window(seed)
    assert t.xi_T < seed.xi_L < seed.xi_R == t.xi_R


def test_admissible_examples():
    assert is_admissible((W, VF)) == (True, None)
    assert is_admissible((W, V)) == (False, 2)
    assert is_admissible((VF, WF, WF, V, W)) == (True, None)
    assert is_admissible((V,)) == (False, 1)


FORBIDDEN = {(V, V), (V, WF), (VF, VF), (VF, W), (W, V), (W, WF), (WF, VF), (WF, W)}
blocks = st.lists(st.sampled_from([W, V, WF, VF]), max_size=20)


@given(blocks)
def test_admissible_is_forbidden_pair_test(b):
    ok = (not b or b[0] in (W, VF)) and all(p not in FORBIDDEN for p in zip(b, b[1:]))
    assert is_admissible(tuple(b))[0] == ok


@given(blocks)
def test_admissible_suffix_closure(b):
    b = tuple(b)
    if not is_admissible(b)[0]:
        return
    for k in range(len(b)):
        if b[k] in (W, VF):
            assert is_admissible(b[k:])[0]


@given(st.lists(st.integers(0, 4), max_size=12))
def test_window_blocks_are_admissible(n):
    assert is_admissible(window_blocks(n))[0]


def test_admissible_words_stay_above_window_start():
    # every admissible word of blocks is a prefix of a point >= 1/6 for w = 10
    table = {W: HALF.w, V: HALF.v, WF: W2("01"), VF: W2("0")}
    words = [()]
    for _ in range(8):
        words = [u + (b,) for u in words for b in (W, V, WF, VF) if is_admissible(u + (b,))[0]]
        for u in words:
            digits = Word((), 2)
            for b in u:
                digits = digits + table[b]
            # the sup over continuations of the prefix is value + 2^-len
            assert digits.value + F(1, 2 ** len(digits)) > F(1, 6)


def test_alo_compare_examples():
    assert alo_compare((1, 0), (2, 0)) == -1
    assert alo_compare((1, 3), (1, 2)) == -1
    assert alo_compare((1, 2, 3), (1, 2, 3)) == 0
    with pytest.raises(Incomparable):
        alo_compare((1, 2), (1, 2, 3))


@given(st.lists(st.integers(0, 5), min_size=3, max_size=8),
       st.lists(st.integers(0, 5), min_size=3, max_size=8))
def test_alo_is_antisymmetric(a, b):
    try:
        r = alo_compare(a, b)
    except Incomparable:
        return
    assert alo_compare(b, a) == -r


even_periods = st.lists(st.integers(0, 4), min_size=1, max_size=3).map(
    lambda n: tuple(n) * 2 if len(n) % 2 else tuple(n))


@given(even_periods, even_periods)
@settings(max_examples=200)
def test_alo_order_matches_real_order(a, b):
    """With exponents numbered from n1 the order is the order of the points."""
    x = window_digits(HALF, a).repeating_value()
    y = window_digits(HALF, b).repeating_value()
    r = alo_compare(ExponentSequence((), a), ExponentSequence((), b), start=1)
    assert r == (x > y) - (x < y)


def test_window_membership_examples():
    assert window_bifurcation_member(ExponentSequence((), (1,))) == (True, None)
    # numbered from n1, (1,0)~ is the minimal rotation and (0,1)~ is not
    assert window_bifurcation_member(ExponentSequence((), (1, 0))) == (True, None)
    assert window_bifurcation_member(ExponentSequence((), (0, 1))) == (False, 1)


@given(even_periods)
@settings(max_examples=100, deadline=None)
def test_window_membership_agrees_with_dynamics(n):
    x = window_digits(HALF, n).repeating_value()
    assert window_bifurcation_member(ExponentSequence((), n))[0] == \
        bifurcation_member(2, x).member


def test_window_pseudocenter_examples():
    assert window_pseudocenter_word(HALF, (0, 0)) == W2("01")
    assert window_pseudocenter_word(HALF, (0, 0)).value == F(1, 4)
    assert window_pseudocenter_word(HALF, (1, 0)).value == F(3, 16)
    with pytest.raises(NotMinimal):
        window_pseudocenter_word(HALF, (0, 1))


@pytest.mark.parametrize("seed", SEEDS)
def test_window_pseudocenters_inside_window(seed):
    t = tuning_window(seed)
    rng = random.Random(7)
    found = 0
    for _ in range(60):
        n = tuple(rng.randint(0, 3) for _ in range(2 * rng.randint(1, 3)))
        try:
            z = window_pseudocenter_word(seed, n)
        except NotMinimal:
            continue
        if len(z) > 60:
            continue
        found += 1
        assert is_pseudocenter(z.value, seed.base)[0]
        assert t.xi_T <= z.value <= t.xi_R
        assert tuning_index(seed, n) == word_norm(z)
    assert found >= 5


def test_tuning_index_examples():
    assert tuning_index(EIGHTH, (1, 1)) == 0
    assert tuning_index(HALF, (3, 0)) == 0
    assert tuning_index(EIGHTH, (0, 1)) == 2
    z = window_digits(EIGHTH, (0, 1))
    assert word_norm(z) == 2 and matching_index(z) == 3


def test_cf_encode_examples():
    assert cf_encode(HALF, (1, 1)) == W2("01")
    assert cf_encode(HALF, (2, 1)) == W2("0011")
    with pytest.raises(ValueError):
        cf_encode(HALF, (0, 1))


def _cf_value(a):
    x = F(0)
    for q in reversed(a):
        x = 1 / (q + x)
    return x


def test_cf_encode_is_order_preserving():
    rng = random.Random(3)
    for _ in range(100):
        n = 2 * rng.randint(1, 3)
        a = tuple(rng.randint(1, 4) for _ in range(n))
        b = tuple(rng.randint(1, 4) for _ in range(n))
        if a == b:
            continue
        # periodic continuation keeps both infinite and comparable
        xa = cf_encode(HALF, a).repeating_value()
        xb = cf_encode(HALF, b).repeating_value()
        ca, cb = _cf_value(a * 8), _cf_value(b * 8)
        assert (xa < xb) == (ca < cb)


def test_plateau_top():
    top = plateau_scan(0, F(7, 10), 12, 2)[0]
    assert (top.lo, top.hi, top.kind) == (F(1, 6), F(2, 3), "neutralWindow")


def test_plateau_left_of_eighth():
    found = {(c.lo, c.hi) for c in plateau_scan(F(1, 10), F(1, 8), 10, 2)}
    assert (F(125, 1152), F(1, 9)) in found


def test_plateau_slope_three():
    top = plateau_scan(0, F(3, 4), 6, 3)[0]
    assert (top.lo, top.hi) == (F(5, 12), F(3, 4))


def test_plateau_right_of_top_is_empty():
    assert plateau_scan(F(2, 3) + F(1, 100), F(99, 100), 10, 2) == []
