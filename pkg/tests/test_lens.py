import itertools
import json
import random
from math import comb, gcd

import pytest
from hypothesis import given, strategies as st

from lensspec import theta
from lensspec.lens import (
    LensError,
    SpectrumSlice,
    are_isometric,
    are_isospectral,
    canonical_key,
    harmonic_invariant_dim,
    isospectral_cutoff,
    isospectrality,
    lattice_count,
    lattice_counts,
    make_lens,
    monomial_oracle_dim,
    parse_lens,
    spectrum_slice,
)

import oracles


def test_make_lens_flags():
    L = make_lens(11, [1, 2, 3])
    assert L.manifold_flag and L.effective_order == 11 and L.n == 3 and L.dimension == 5
    M = make_lens(12, [0, 2])
    assert not M.manifold_flag and M.effective_order == 6
    S = make_lens(1, [1, 1])
    assert S.manifold_flag and S.effective_order == 1


def test_make_lens_reduces_and_rejects_low_dimension():
    assert make_lens(7, [-1, 9]).s == (6, 2)
    with pytest.raises(LensError, match="dimension below 3 unsupported"):
        make_lens(7, [1])


@pytest.mark.parametrize("text,q,s", [("L(11;1,2,3)", 11, (1, 2, 3)), (" L ( 7 ; 1 , -4 ) ", 7, (1, 3))])
def test_parse_lens(text, q, s):
    L = parse_lens(text)
    assert (L.q, L.s) == (q, s)
    assert parse_lens(str(L)) == L


@pytest.mark.parametrize("bad", ["L(11;1,2", "L(11)", "M(3;1,1)", "L(3;1;1)", "", "L(0;1,1)"])
def test_parse_lens_rejects_malformed(bad):
    with pytest.raises(LensError):
        parse_lens(bad)


def test_canonical_key_examples():
    assert canonical_key(make_lens(7, [1, 2])).canonical_s == (1, 2)
    assert canonical_key(make_lens(7, [1, 4])).canonical_s == (1, 2)
    assert canonical_key(make_lens(11, [3, 1, 2])) == canonical_key(make_lens(11, [1, 2, 3]))
    assert canonical_key(make_lens(2, [1, 1])).canonical_s == (1, 1)
    assert canonical_key(make_lens(1, [0, 0])).canonical_s == (0, 0)


def test_isometry_examples():
    assert are_isometric(make_lens(7, [1, 2]), make_lens(7, [1, 4]))
    assert not are_isometric(make_lens(11, [1, 2, 3]), make_lens(11, [1, 2, 4]))
    L = make_lens(13, [1, 5, 6])
    assert are_isometric(L, L)
    assert not are_isometric(make_lens(7, [1, 2]), make_lens(7, [1, 2, 3]))


def test_isometry_uses_generated_group():
    # L(12;2,4) generates the same rotation group as L(6;1,2)
    assert are_isometric(make_lens(12, [2, 4]), make_lens(6, [1, 2]))
    assert not are_isometric(make_lens(12, [2, 4]), make_lens(6, [1, 1]))


@pytest.mark.parametrize("q,n,K", [(11, 3, 76), (1, 2, 2), (121, 3, 846), (1452, 3, 10163)])
def test_isospectral_cutoff_examples(q, n, K):
    assert isospectral_cutoff(q, n) == K


def test_lattice_count_examples():
    assert lattice_count(make_lens(5, [1, 2]), 0) == 1
    assert lattice_count(make_lens(1, [1, 1]), 1) == 4
    assert lattice_count(make_lens(11, [1, 2, 3]), 1) == 0


def test_spectrum_slice_examples():
    assert spectrum_slice(make_lens(1, [1, 1]), 3).multiplicities == (1, 4, 9, 16)
    assert spectrum_slice(make_lens(2, [1, 1]), 3).multiplicities == (1, 0, 9, 0)
    A = spectrum_slice(make_lens(11, [1, 2, 3]), 76)
    B = spectrum_slice(make_lens(11, [1, 2, 4]), 76)
    assert A.multiplicities == B.multiplicities
    assert A.eigenvalues[:3] == (0, 5, 12)


def test_spectrum_slice_json_round_trip():
    sl = spectrum_slice(make_lens(9, [1, 2, 4]), 12)
    d = json.loads(sl.to_json())
    assert set(d) == {"q", "n", "K", "counts", "mults"}
    assert SpectrumSlice.from_json(d) == sl


def test_flagship_pair_agrees_far_beyond_cutoff():
    A, B = make_lens(11, [1, 2, 3]), make_lens(11, [1, 2, 4])
    assert all(harmonic_invariant_dim(A, k) == harmonic_invariant_dim(B, k) for k in range(101))
    assert are_isospectral(A, B)
    assert oracles.same_generating_function(11, (1, 2, 3), (1, 2, 4))


def test_non_isospectral_three_dimensional():
    assert not are_isospectral(make_lens(8, [1, 3]), make_lens(8, [1, 1]))
    assert not oracles.same_generating_function(8, (1, 3), (1, 1))


def test_isospectrality_short_circuits():
    r = isospectrality(make_lens(11, [1, 2, 3]), make_lens(13, [1, 2, 3]))
    assert not r and r.reason == "group orders differ"
    r = isospectrality(make_lens(11, [1, 2, 3]), make_lens(11, [1, 2]))
    assert not r and r.reason == "dimensions differ"


def test_cutoff_override_is_heuristic():
    r = isospectrality(make_lens(11, [1, 2, 3]), make_lens(11, [1, 2, 4]), cutoff=20)
    assert r.isospectral and r.heuristic
    assert not isospectrality(make_lens(11, [1, 2, 3]), make_lens(11, [1, 2, 4])).heuristic


def test_monomial_oracle_examples():
    assert monomial_oracle_dim(make_lens(1, [1, 1]), 2) == 9
    assert monomial_oracle_dim(make_lens(11, [1, 2, 3]), 0) == 1
    L = make_lens(11, [1, 2, 3])
    assert monomial_oracle_dim(L, 3) == harmonic_invariant_dim(L, 3)
    with pytest.raises(ValueError, match="oracle budget"):
        monomial_oracle_dim(L, 41)


# ---------------------------------------------------------------- properties

lens_params = st.integers(1, 30).flatmap(
    lambda q: st.tuples(st.just(q), st.lists(st.integers(0, max(q - 1, 0)), min_size=2, max_size=4)))


@given(lens_params)
def test_oracle_agreement(qs):
    q, s = qs
    L = make_lens(q, s)
    kmax = 20 if len(s) <= 3 else 12
    for k in range(kmax + 1):
        assert harmonic_invariant_dim(L, k) == monomial_oracle_dim(L, k)


@given(lens_params)
def test_counts_match_enumeration(qs):
    q, s = qs
    counts = lattice_counts(make_lens(q, s), 6)
    assert list(counts) == [oracles.lattice_count(q, s, k) for k in range(7)]


@given(st.integers(1, 50), st.lists(st.integers(-100, 100), min_size=2, max_size=4), st.randoms(use_true_random=False))
def test_canonical_key_invariant_under_isometries(q, s, rnd):
    L = make_lens(q, s)
    units = [t for t in range(1, q + 1) if gcd(t, q) == 1]
    t = rnd.choice(units)
    image = [rnd.choice((1, -1)) * t * x for x in s]
    rnd.shuffle(image)
    assert canonical_key(make_lens(q, image)) == canonical_key(L)


@given(st.integers(2, 13), st.lists(st.integers(1, 12), min_size=2, max_size=3),
       st.lists(st.integers(1, 12), min_size=2, max_size=3))
def test_isometry_matches_brute_force(q, s1, s2):
    if len(s1) != len(s2):
        return
    A, B = make_lens(q, s1), make_lens(q, s2)
    if A.manifold_flag and B.manifold_flag:
        assert are_isometric(A, B) == oracles.isometric(q, A.s, B.s)


@given(st.integers(3, 20), st.lists(st.integers(1, 19), min_size=2, max_size=3), st.integers(1, 19))
def test_isometric_implies_isospectral(q, s, t):
    if gcd(t, q) != 1:
        return
    A = make_lens(q, s)
    B = make_lens(q, [-t * x for x in reversed(s)])
    assert are_isometric(A, B) and are_isospectral(A, B)


@given(lens_params)
def test_counts_bounded_by_full_lattice(qs):
    q, s = qs
    L = make_lens(q, s)
    K = 15
    counts = lattice_counts(L, K)
    full = [theta.full_lattice_count(L.n, k) for k in range(K + 1)]
    assert all(c <= f for c, f in zip(counts, full))
    assert (list(counts) == full) == (L.effective_order == 1)


@given(lens_params)
def test_multiplicity_formula(qs):
    q, s = qs
    sl = spectrum_slice(make_lens(q, s), 18)
    n = len(s)
    assert sl.lattice_counts[0] == 1 and sl.multiplicities[0] == 1
    for k in range(19):
        expect = sum(comb(r + n - 2, n - 2) * sl.lattice_counts[k - 2 * r] for r in range(k // 2 + 1))
        assert sl.multiplicities[k] == expect >= 0


def test_isospectrality_is_transitive_on_a_sample():
    rng = random.Random(3)
    q = 13
    pool = [make_lens(q, [1, 2, 3]), make_lens(q, [1, 2, 4])]
    pool += [make_lens(q, [rng.randrange(1, q) for _ in range(3)]) for _ in range(10)]
    rel = {(i, j): are_isospectral(a, b) for (i, a), (j, b) in itertools.product(enumerate(pool), repeat=2)}
    for i, j, k in itertools.product(range(len(pool)), repeat=3):
        assert rel[i, i]
        assert rel[i, j] == rel[j, i]
        if rel[i, j] and rel[j, k]:
            assert rel[i, k]
