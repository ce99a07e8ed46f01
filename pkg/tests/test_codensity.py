"""Tests for the D-completion: both algorithms, unit, action, mu, terminality."""

import pytest

from termmonad.caps import Caps, CheckFailed, EnumerationTooLarge
from termmonad.categories import FinSetCat, FinVectCat, VectObject, cyclic, FinGrpCat
from termmonad.codensity import (associativity_report, codensity_endofunctor,
                                 codensity_object, end_equalizer_object, functor_action,
                                 identity_endofunctor, multiplication, terminal_map,
                                 terminal_map_checks, uniqueness_audit, unit,
                                 unit_laws_report)
from termmonad.finset import FinMap, FinSet, compose, identity

CAT = FinSetCat()
TWO, THREE = FinSet(2), FinSet(3)


def test_epsilon_iso_on_D():
    # D = {3}, c = 3: T(3) ≅ 3 and the unit is a bijection
    T = codensity_object(CAT, THREE, [THREE])
    assert T.carrier.size == 3
    assert unit(T).is_bijective()


def test_T2_of_3_has_8_families():
    T = codensity_object(CAT, THREE, [TWO])
    assert T.carrier.size == 8


def test_T2_of_empty_is_empty():
    T = codensity_object(CAT, FinSet(0), [TWO])
    assert T.carrier.size == 0
    # unique empty map into the empty codensity object
    assert unit(T).table == ()


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_algorithm_agreement(n):
    a = codensity_object(CAT, FinSet(n), [TWO])
    b = end_equalizer_object(CAT, FinSet(n), [TWO])
    assert a.families == b.families


def test_algorithm_agreement_two_object_D():
    D = [FinSet(1), TWO]
    a = codensity_object(CAT, THREE, D)
    b = end_equalizer_object(CAT, THREE, D)
    assert a.families == b.families


def test_retract_closure():
    # 1 and 2 are retracts of 3, so T_{3} has bijective unit there
    for n in (1, 2, 3):
        T = codensity_object(CAT, FinSet(n), [THREE])
        assert unit(T).is_bijective()


def test_adjoining_one_to_two_changes_nothing_on_sets():
    # constant endomaps of 2 already enforce the arity-0 cut, so T_{1,2} = T_2
    for n in range(4):
        a = codensity_object(CAT, FinSet(n), [TWO])
        b = codensity_object(CAT, FinSet(n), [FinSet(1), TWO])
        assert a.carrier.size == b.carrier.size


def test_unit_is_principal_family():
    T = codensity_object(CAT, THREE, [TWO])
    eta = unit(T)
    for x in range(3):
        fam = T.families[eta(x)]
        for pos, o in enumerate(T.comma.objects):
            assert fam[pos] == o.f(x)


def test_functor_action_identity_and_unit_naturality():
    T3 = codensity_object(CAT, THREE, [TWO])
    T2 = codensity_object(CAT, TWO, [TWO])
    assert functor_action(T3, T3, identity(THREE)).table == tuple(range(8))
    g = FinMap(TWO, THREE, (0, 2))
    Tg = functor_action(T2, T3, g)
    assert compose(Tg, unit(T2)).table == compose(unit(T3), g).table


def test_multiplication_epsilon_case_is_bijection():
    T = codensity_object(CAT, THREE, [THREE])
    T2, mu = multiplication(T)
    assert mu.is_bijective()


def test_monad_laws_D2_c2_exhaustive():
    T = codensity_object(CAT, TWO, [TWO])
    rep = unit_laws_report(T)
    assert rep["failures"] == []
    rep = associativity_report(T)
    assert rep["failures"] == [] and rep["checked"] == 2


def test_monad_laws_D3_c3_exhaustive():
    T = codensity_object(CAT, THREE, [THREE])
    assert unit_laws_report(T)["failures"] == []
    assert associativity_report(T)["failures"] == []


def test_unit_laws_D2_c3_pointwise():
    # T²(3) is astronomically large; the unit laws are still checkable
    # pointwise on all 8 elements of T(3)
    T = codensity_object(CAT, THREE, [TWO])
    rep = unit_laws_report(T)
    assert rep["checked"] == 8 and rep["failures"] == []


def test_T2_of_3_associativity_is_capped():
    # T²(3) has 2^127 families; the solver must bail out at the cap
    T = codensity_object(CAT, THREE, [TWO])
    with pytest.raises(EnumerationTooLarge):
        associativity_report(T, Caps(solutions=1000, enumeration=2 ** 20))


def test_group_codensity_epsilon():
    # FinGrp: D = {C3}, c = C3: the completion is the group itself
    cat = FinGrpCat()
    c3 = cyclic(3)
    T = codensity_object(cat, c3, [c3])
    assert T.carrier.size == 3
    assert T.structure.size == 3


def test_terminal_map_for_T_itself_is_identity():
    universe = [FinSet(1), TWO, THREE]
    F = codensity_endofunctor(CAT, [TWO], universe)
    T = codensity_object(CAT, THREE, [TWO])
    delta = terminal_map(F, CAT, [TWO], THREE, T)
    assert delta.table == tuple(range(8))


def test_terminal_map_for_identity_is_unit():
    universe = [FinSet(1), TWO, THREE]
    F = identity_endofunctor(universe)
    T = codensity_object(CAT, THREE, [TWO])
    delta = terminal_map(F, CAT, [TWO], THREE, T)
    assert delta.table == unit(T).table
    checks = terminal_map_checks(F, CAT, [TWO])
    assert checks["failures"] == []


def test_terminal_map_rejects_non_preserving_functor():
    # PP does not preserve 2 (its unit at 2 is not a bijection)
    from termmonad.ultra import pp_endofunctor
    universe = [FinSet(1), TWO]
    F = pp_endofunctor(universe)
    with pytest.raises(CheckFailed):
        terminal_map(F, CAT, [TWO], TWO)


def test_uniqueness_audit_identity():
    universe = [FinSet(1), TWO]
    F = identity_endofunctor(universe)
    rep = uniqueness_audit(F, CAT, [TWO], universe)
    assert rep["count"] == 1


def test_uniqueness_audit_T_itself():
    universe = [FinSet(1), TWO]
    F = codensity_endofunctor(CAT, [TWO], universe)
    rep = uniqueness_audit(F, CAT, [TWO], universe)
    assert rep["count"] == 1


def test_vect_codensity_single_object_is_homogeneous_maps():
    # over F2, dim 2: families over (V ↓ {K}) are the maps V* -> K fixing 0;
    # 8 of them (dimension 3), strictly more than dim V** = 2
    cat = FinVectCat(2)
    V = VectObject(2, 2)
    K = VectObject(2, 1)
    T = codensity_object(cat, V, [K])
    assert T.carrier.size == 8
