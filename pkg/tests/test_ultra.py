"""Tests for ultraset/ultrafilter enumeration and the T2/T3 harnesses."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from termmonad.caps import CheckFailed
from termmonad.ultra import (double_powerset_unit, family_count, is_ultrafilter,
                             is_ultraset, majority_family, partition_criterion, pp_apply,
                             pp_endofunctor, sub_functor_check, subset_count, ultrafilters,
                             ultrasets, ultrasets_via_pairs, verify_T2_is_US,
                             verify_T3_is_UF, verify_Td_is_identity_like)
from termmonad.finset import FinMap, FinSet


def test_unit_families():
    assert double_powerset_unit(1, 0) == 0b10  # only {0}, which is X itself
    # X=2, x=0: {0} (mask 1) and {0,1} (mask 3)
    assert double_powerset_unit(2, 0) == (1 << 1) | (1 << 3)
    # 2^{n-1} subsets contain a given point
    assert bin(double_powerset_unit(3, 1)).count("1") == 4


@pytest.mark.parametrize("n,count", [(0, 0), (1, 1), (2, 2), (3, 8), (4, 128)])
def test_ultraset_counts(n, count):
    assert len(ultrasets(n)) == count
    if n >= 1:
        # derived closed form, oracle = the brute-force filter itself
        assert count == 2 ** (2 ** (n - 1) - 1)


@pytest.mark.parametrize("n", [0, 1, 2, 3, 4])
def test_ultraset_two_routes_agree(n):
    assert ultrasets(n) == ultrasets_via_pairs(n)


@pytest.mark.parametrize("n,count", [(0, 0), (1, 1), (2, 2), (3, 3), (4, 4)])
def test_ultrafilters_are_principal(n, count):
    uf = ultrafilters(n)
    assert len(uf) == count
    assert sorted(double_powerset_unit(n, x) for x in range(n)) == uf


def test_majority_family_is_ultraset_not_ultrafilter():
    fam = majority_family(3)
    assert fam in ultrasets(3)
    assert not is_ultrafilter(fam, 3)
    assert not partition_criterion(fam, 3)


def test_partition_criterion_on_principal():
    for n in (1, 2, 3):
        for x in range(n):
            assert partition_criterion(double_powerset_unit(n, x), n)


def test_partition_criterion_requires_ultraset():
    with pytest.raises(CheckFailed):
        partition_criterion(0b1, 2)  # contains the empty set


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_partition_lemma_equivalence(n):
    # the lemma: an ultraset is an ultrafilter iff the 3-partition criterion holds
    for fam in ultrasets(n):
        assert partition_criterion(fam, n) == is_ultrafilter(fam, n)


def test_all_size2_ultrasets_are_principal():
    assert all(partition_criterion(f, 2) for f in ultrasets(2))


# --- PP functor ------------------------------------------------------------------

def test_pp_functor_laws():
    universe = [FinSet(0), FinSet(1), FinSet(2)]
    F = pp_endofunctor(universe)
    assert F.check_laws() == []


def test_pp_identity_action():
    g = FinMap(FinSet(3), FinSet(3), (0, 1, 2))
    for fam in ultrasets(3):
        assert pp_apply(g, fam) == fam


def test_pp_constant_action_is_welldefined_on_us():
    g = FinMap(FinSet(3), FinSet(1), (0, 0, 0))
    for fam in ultrasets(3):
        assert is_ultraset(pp_apply(g, fam), 1)


@settings(max_examples=50)
@given(st.integers(1, 3), st.integers(1, 3), st.data())
def test_pp_functorial_random(n, m, data):
    f = FinMap(FinSet(n), FinSet(m), tuple(data.draw(st.integers(0, m - 1)) for _ in range(n)))
    k = data.draw(st.integers(1, 3))
    g = FinMap(FinSet(m), FinSet(k), tuple(data.draw(st.integers(0, k - 1)) for _ in range(m)))
    fam = data.draw(st.integers(0, family_count(n) - 1))
    assert pp_apply(g, pp_apply(f, fam)) == pp_apply(f.then(g), fam)


# --- harnesses -------------------------------------------------------------------

@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_T2_is_US(n):
    rep = verify_T2_is_US(n)
    assert rep["ok"], rep


def test_T2_is_US_size4():
    rep = verify_T2_is_US(4, check_action=False)
    assert rep["ok"] and rep["count"] == 128, rep


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_T3_is_UF(n):
    rep = verify_T3_is_UF(n)
    assert rep["ok"], rep


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_T4_is_identity_like(n):
    rep = verify_Td_is_identity_like(n, 4)
    assert rep["ok"], rep


def test_sub_functor_chain():
    rep = sub_functor_check(3)
    assert rep["ok"], rep
    assert rep["counts"][3] == (3, 8, 256)
