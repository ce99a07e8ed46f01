"""Tests for canonical finite sets, maps, products and the limit solver."""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from termmonad.caps import Caps, EnumerationTooLarge, StructuralError
from termmonad.finset import (Diagram, FinMap, FinSet, IndexedProduct, all_maps, compose,
                              equalizer, find_retraction, identity, limit, limit_bruteforce,
                              parallel_pair_diagram, power)


def fmap(dom, cod, *table):
    return FinMap(FinSet(dom), FinSet(cod), table)


# --- FinSet / FinMap basics -------------------------------------------------

def test_finset_labels_checked():
    FinSet(2, ("a", "b"))
    with pytest.raises(StructuralError):
        FinSet(2, ("a", "a"))
    with pytest.raises(StructuralError):
        FinSet(2, ("a",))


def test_finmap_validation():
    with pytest.raises(StructuralError):
        fmap(2, 2, 0)
    with pytest.raises(StructuralError):
        fmap(1, 2, 5)


def test_composition_and_identity():
    f = fmap(2, 3, 1, 2)
    g = fmap(3, 2, 0, 0, 1)
    assert compose(g, f).table == (0, 1)
    assert f.then(identity(FinSet(3))).table == f.table
    assert identity(FinSet(2)).then(f).table == f.table


small_maps = st.integers(1, 4).flatmap(
    lambda n: st.integers(1, 4).flatmap(
        lambda m: st.tuples(st.just(n), st.just(m),
                            st.tuples(*([st.integers(0, m - 1)] * n)))))


@given(small_maps, small_maps, small_maps)
def test_composition_associative(a, b, c):
    # random triples, composed where codomains line up
    f = FinMap(FinSet(a[0]), FinSet(a[1]), a[2])
    g = FinMap(FinSet(a[1]), FinSet(b[1]), tuple(b[2][i % b[0]] for i in range(a[1])))
    h = FinMap(FinSet(b[1]), FinSet(c[1]), tuple(c[2][i % c[0]] for i in range(b[1])))
    assert f.then(g).then(h).table == f.then(g.then(h)).table


def test_json_roundtrip():
    f = fmap(3, 2, 0, 1, 1)
    assert FinMap.from_json(f.to_json()) == f
    s = FinSet(2, ("x", "y"))
    assert FinSet.from_json(s.to_json()) == s


# --- powers and reindexing ---------------------------------------------------

def test_power_basics():
    p = power(FinSet(2), range(3))
    assert p.size == 8
    assert p.tuple_of(5) == (1, 0, 1)
    assert p.code_of((1, 0, 1)) == 5
    # projections select components
    for k in range(3):
        pr = p.projection(k)
        assert all(pr(c) == p.tuple_of(c)[k] for c in range(8))


def test_power_empty_index_is_terminal():
    p = power(FinSet(5), [])
    assert p.size == 1
    assert p.tuple_of(0) == ()


def test_power_cap_rejected():
    # 3^27 indices blows the default cap
    with pytest.raises(EnumerationTooLarge):
        power(FinSet(3), range(27))


def test_reindex_contravariant_on_instance():
    c = FinSet(3)
    ps = power(c, ["a", "b"])
    pt = power(c, ["u", "v", "w"])
    f = {"a": "v", "b": "w"}
    r = ps.reindex(pt, f.__getitem__)
    for code in range(pt.size):
        t = pt.tuple_of(code)
        assert ps.tuple_of(r(code)) == (t[1], t[2])


@settings(max_examples=40)
@given(st.integers(2, 3), st.integers(1, 3), st.integers(1, 3), st.integers(1, 3),
       st.data())
def test_reindex_functorial(csize, ns, nm, nt, data):
    # reindex(g∘f) = reindex(f) ∘ reindex(g) as maps c^T -> c^S
    c = FinSet(csize)
    S, M, T = list(range(ns)), list(range(nm)), list(range(nt))
    f = [data.draw(st.integers(0, nm - 1)) for _ in S]
    g = [data.draw(st.integers(0, nt - 1)) for _ in M]
    ps, pm, pt = power(c, S), power(c, M), power(c, T)
    via_m = compose(ps.reindex(pm, lambda s: f[s]), pm.reindex(pt, lambda m: g[m]))
    direct = ps.reindex(pt, lambda s: g[f[s]])
    assert via_m.table == direct.table


# --- equalizers ---------------------------------------------------------------

def test_equalizer_equal_maps_is_identity():
    f = fmap(3, 2, 0, 1, 0)
    e, incl = equalizer(f, f)
    assert e.size == 3 and incl.table == (0, 1, 2)


def test_equalizer_of_swap_is_empty():
    e, _ = equalizer(identity(FinSet(2)), fmap(2, 2, 1, 0))
    assert e.size == 0


def test_equalizer_pointwise():
    f = fmap(3, 2, 0, 0, 1)
    g = fmap(3, 2, 0, 1, 1)
    # oracle: pointwise comparison
    expected = tuple(x for x in range(3) if f(x) == g(x))
    assert expected == (0, 2)
    e, incl = equalizer(f, g)
    assert incl.table == expected


def test_equalizer_requires_parallel():
    with pytest.raises(StructuralError):
        equalizer(fmap(2, 2, 0, 1), fmap(2, 3, 0, 1))


# --- limits -------------------------------------------------------------------

def test_limit_empty_diagram_is_singleton():
    res = limit(Diagram())
    assert res.carrier.size == 1 and res.tuples == [()]


def test_limit_single_node_is_the_node():
    d = Diagram()
    d.add_node(FinSet(4))
    res = limit(d)
    assert res.tuples == [(0,), (1,), (2,), (3,)]


def test_limit_of_parallel_pair_is_equalizer():
    f = fmap(3, 2, 0, 0, 1)
    g = fmap(3, 2, 0, 1, 1)
    res = limit(parallel_pair_diagram(f, g))
    e, incl = equalizer(f, g)
    assert [t[0] for t in res.tuples] == list(incl.table)


def test_pullback_of_two_to_one():
    d = Diagram()
    a = d.add_node(FinSet(2))
    b = d.add_node(FinSet(2))
    c = d.add_node(FinSet(1))
    d.add_arrow(a, c, fmap(2, 1, 0, 0))
    d.add_arrow(b, c, fmap(2, 1, 0, 0))
    res = limit(d)
    # oracle: exhaustive check of 2x2 tuples
    assert res.carrier.size == 4
    assert res.tuples == [(0, 0, 0), (0, 1, 0), (1, 0, 0), (1, 1, 0)]


def test_limit_with_empty_node():
    d = Diagram()
    d.add_node(FinSet(0))
    d.add_node(FinSet(3))
    assert limit(d).carrier.size == 0


def test_projections_commute():
    d = Diagram()
    a = d.add_node(FinSet(3))
    b = d.add_node(FinSet(2))
    m = fmap(3, 2, 0, 1, 1)
    d.add_arrow(a, b, m)
    res = limit(d)
    pa, pb = res.projection(a), res.projection(b)
    assert compose(m, pa).table == pb.table


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_limit_agrees_with_bruteforce(data):
    # random small diagrams whose product is well under 2^16
    n_nodes = data.draw(st.integers(1, 4))
    sizes = [data.draw(st.integers(0, 4)) for _ in range(n_nodes)]
    d = Diagram()
    for s in sizes:
        d.add_node(FinSet(s))
    n_arrows = data.draw(st.integers(0, 5))
    for _ in range(n_arrows):
        s = data.draw(st.integers(0, n_nodes - 1))
        t = data.draw(st.integers(0, n_nodes - 1))
        if sizes[t] == 0:
            continue
        table = tuple(data.draw(st.integers(0, sizes[t] - 1)) for _ in range(sizes[s]))
        d.add_arrow(s, t, FinMap(FinSet(sizes[s]), FinSet(sizes[t]), table))
    assert limit(d).tuples == limit_bruteforce(d)


def test_limit_solution_cap():
    d = Diagram()
    for _ in range(4):
        d.add_node(FinSet(4))
    with pytest.raises(EnumerationTooLarge):
        limit(d, Caps(solutions=10))


# --- retractions ----------------------------------------------------------------

def test_find_retraction_exists():
    a, b = FinSet(2), FinSet(3)
    r = find_retraction(a, b, FinMap(a, b, (0, 1)))
    assert r is not None
    assert compose(r, FinMap(a, b, (0, 1))).table == (0, 1)


def test_find_retraction_not_injective():
    a, b = FinSet(3), FinSet(2)
    for table in itertools.product(range(2), repeat=3):
        assert find_retraction(a, b, FinMap(a, b, table)) is None


def test_find_retraction_constant():
    a, b = FinSet(1), FinSet(5)
    r = find_retraction(a, b, FinMap(a, b, (3,)))
    assert r is not None and r.table == (0,) * 5


def test_all_maps_count_and_order():
    ms = all_maps(FinSet(2), FinSet(3))
    assert len(ms) == 9
    assert [m.table for m in ms][:3] == [(0, 0), (0, 1), (0, 2)]
