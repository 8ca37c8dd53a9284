import json

import pytest
from hypothesis import assume, given, strategies as st

from lensspec.lens import are_isometric, are_isospectral
from lensspec.towers import (
    TowerLevel,
    TowerSpec,
    build_dd_lens,
    build_tower,
    dd_pair_check,
    is_good,
    is_hereditarily_good,
    is_reversible,
    is_self_reversing,
    is_univalent,
    is_useful,
    reversing_shift,
    shift_to_zero_sum,
    useful_tuple,
    verify_tower,
)

import oracles

PRIMES_TO_50 = [p for p in range(3, 51) if oracles.is_prime(p)]


def test_univalent_examples():
    assert is_univalent((1, 3, 6), 7)
    assert not is_univalent((1, 3, 6), 5)
    assert not is_univalent((0, 0), 9)


def test_self_reversing_examples():
    assert is_self_reversing((1, 12), 13)
    assert not is_self_reversing((1, 2, 8), 11)
    assert all(is_self_reversing(a, 2) for a in [(0, 1, 1), (1, 1, 1), (3, 4)])


def test_reversible_examples():
    assert is_reversible((1, 3, 6), 8)
    assert not is_reversible((1, 3, 6), 11)
    assert is_reversible((1, 3, 6), 2)
    c = reversing_shift((1, 3, 6), 8)
    assert sorted((x + c) % 8 for x in (1, 3, 6)) == sorted(-x % 8 for x in (1, 3, 6))


def test_goodness_examples():
    assert is_hereditarily_good((1, 3, 6), 14)
    assert is_useful((1, 3, 6), 11)
    assert not is_hereditarily_good((1, 3, 6), 15)


def test_build_dd_lens_examples():
    assert str(build_dd_lens(11, 1, (1, 2, 8))) == "L(121;12,23,89)"
    assert str(build_dd_lens(11, 1, (-1, -2, -8))) == "L(121;111,100,34)"
    assert build_dd_lens(5, 3, (0, 0, 0)).s == (1, 1, 1)
    assert build_dd_lens(11, 1, (1, 2, 8)).manifold_flag
    with pytest.raises(ValueError):
        build_dd_lens(2, 1, (1, 1))


def test_dd_pair_check_examples():
    r = dd_pair_check(11, 1, (1, 2, 8))
    assert r.isospectral and not r.isometric and r.cutoff == 846 and r.consistent
    assert json.loads(r.to_json())["isospectral"] is True
    assert dd_pair_check(7, 1, (1, 3, 6)).isometric
    assert dd_pair_check(9, 1, (1, 8, 0)).isometric


def test_useful_tuple_examples():
    assert useful_tuple(3, 11).a == (1, 2, 8)
    assert useful_tuple(4, 17).a == (1, 2, 3, 11)
    for n, r in [(3, 11), (4, 17), (5, 29), (6, 37)]:
        a = useful_tuple(n, r).a
        assert sum(a) == r and is_useful(a, r) and not is_self_reversing(a, r)
    with pytest.raises(ValueError):
        useful_tuple(3, 9)
    with pytest.raises(ValueError):
        useful_tuple(4, 13)


def test_shift_to_zero_sum_examples():
    assert shift_to_zero_sum((2, 3, 9), 11).a == (1, 2, 8)
    assert shift_to_zero_sum((1, 2, 8), 11).a == (1, 2, 8)
    b = shift_to_zero_sum((2, 3, 9), 11).a
    assert is_useful(b, 11)
    for t in (1, 2):
        assert are_isometric(build_dd_lens(11, t, (2, 3, 9)), build_dd_lens(11, t, b))
    with pytest.raises(ValueError):
        shift_to_zero_sum((1, 2, 3), 6)


def test_build_tower_levels():
    T = build_tower(11, 1, 12, (1, 2, 8), 2)
    assert [lv.t_j for lv in T.levels] == [1, 12, 144]
    assert [lv.q for lv in T.levels] == [121, 1452, 17424]
    T0 = build_tower(11, 1, 12, (1, 2, 8), 0)
    assert len(T0.levels) == 1 and T0.levels[0].M == build_dd_lens(11, 1, (1, 2, 8))
    with pytest.raises(ValueError):
        build_tower(11, 1, 13, (1, 2, 8), 2)
    with pytest.raises(ValueError):
        build_tower(11, 1, 12, (1, 3, 6, 1), 1)


def test_covering_congruence_instance():
    assert (11 * 12 * 1 + 1 - 12) % 121 == 0


def test_verify_tower_shallow():
    rep = verify_tower(build_tower(11, 1, 12, (1, 2, 8), 3), full_check_depth=0)
    assert rep.ok
    assert rep.checks[0]["full"]["isospectral"] and rep.checks[1]["full"] is None
    assert json.loads(rep.to_json())["levels"][3]["q"] == 121 * 12**3


def test_tampered_tower_fails_congruence():
    r, a = 11, (1, 2, 8)
    levels = tuple(TowerLevel(j, 13**j, build_dd_lens(r, 13**j, a), build_dd_lens(r, 13**j, [-x for x in a]))
                   for j in range(3))
    rep = verify_tower(TowerSpec(r, 1, 13, a, 2, levels), full_check_depth=-1)
    assert not rep.ok
    assert {f.check for f in rep.failures} == {"congruence"}
    assert rep.failures[0].level == 0 and "mod 121" in rep.failures[0].witness


def test_tower_volume_ratio():
    T = build_tower(17, 2, 18, (1, 2, 3, 11), 3)
    for lo, hi in zip(T.levels, T.levels[1:]):
        assert hi.q == lo.q * T.k


# ---------------------------------------------------------------- properties

@st.composite
def zero_sum_tuples(draw):
    n = draw(st.sampled_from([3, 4, 5]))
    r = draw(st.sampled_from([p for p in PRIMES_TO_50 if p % n]))
    head = draw(st.lists(st.integers(0, r - 1), min_size=n - 1, max_size=n - 1))
    return tuple(head) + (-sum(head) % r,), r


@given(zero_sum_tuples())
def test_zero_sum_not_self_reversing_is_irreversible(ar):
    a, r = ar
    assume(not is_self_reversing(a, r))
    assert not is_reversible(a, r)


@given(st.integers(3, 20), st.integers(1, 3), st.lists(st.integers(0, 40), min_size=2, max_size=4))
def test_reversible_iff_isometric(r, t, a):
    M = build_dd_lens(r, t, a)
    N = build_dd_lens(r, t, [-x for x in a])
    assert is_reversible(a, r) == are_isometric(M, N)


@given(st.integers(3, 13), st.integers(1, 2), st.lists(st.integers(0, 12), min_size=3, max_size=3))
def test_hereditarily_good_pairs_are_isospectral(r, t, a):
    assume(is_hereditarily_good(a, r))
    assert are_isospectral(build_dd_lens(r, t, a), build_dd_lens(r, t, [-x for x in a]))


@given(st.integers(1, 30), st.lists(st.integers(-30, 30), min_size=1, max_size=5))
def test_predicate_algebra(r, a):
    if is_useful(a, r):
        assert is_hereditarily_good(a, r)
    if is_hereditarily_good(a, r):
        assert is_good(a, r)
    if is_univalent(a, r):
        assert is_good(a, r)
    if is_self_reversing(a, r):
        assert reversing_shift(a, r) == 0


@given(st.sampled_from([p for p in PRIMES_TO_50 if p > 9]), st.lists(st.integers(0, 60), min_size=3, max_size=3))
def test_shift_preserves_usefulness_and_isometry(r, a):
    assume(is_useful(a, r))
    b = shift_to_zero_sum(a, r).a
    assert sum(b) % r == 0 and is_useful(b, r)
    assert are_isometric(build_dd_lens(r, 1, a), build_dd_lens(r, 1, b))
