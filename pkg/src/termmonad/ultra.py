"""Powerset machinery: ultrafilters, ultrasets, the 3-partition criterion,
and the harnesses identifying 2- and 3-completions with US and UF.

Subsets of X are bitmasks over elements; a family A ⊆ P(X) is a bitmask over
subset masks.  The (US2) axiom is a pairwise complement scan, and the |X|=4
enumeration is 65536 words.  The chi transport (subset ↦ characteristic map
with 1 = "in") is fixed bit-exactly so the T2 ↔ US bijection is reproducible.
"""

from __future__ import annotations

import itertools
from typing import Optional, Sequence

from .caps import Caps, DEFAULT_CAPS, CheckFailed, StructuralError, guard
from .categories import FinSetCat
from .codensity import (CodensityObject, EndofunctorTable, codensity_object,
                        end_equalizer_object, functor_action, unit)
from .finset import FinMap, FinSet


def subset_count(n: int) -> int:
    return 1 << n


def family_count(n: int) -> int:
    return 1 << (1 << n)


def complement(mask: int, n: int) -> int:
    return ((1 << n) - 1) ^ mask


def double_powerset_unit(n: int, x: int) -> int:
    """η_X(x): the principal family of all subsets containing x."""
    if not 0 <= x < n:
        raise StructuralError("element out of range")
    fam = 0
    for m in range(subset_count(n)):
        if (m >> x) & 1:
            fam |= 1 << m
    return fam


def is_ultraset(fam: int, n: int) -> bool:
    """(US1) ∅ ∉ A and (US2) exactly one of each complementary pair in A."""
    if fam & 1:
        return False
    full = (1 << n) - 1
    for m in range(subset_count(n)):
        c = full ^ m
        if m < c:
            if ((fam >> m) & 1) == ((fam >> c) & 1):
                return False
        elif m == c:
            # Y = X∖Y happens only for n=0; "exactly one of" the single set
            if not (fam >> m) & 1:
                return False
    return True


def is_ultrafilter(fam: int, n: int) -> bool:
    """Full axioms: ultraset + upward closure + binary intersections."""
    if not is_ultraset(fam, n):
        return False
    members = [m for m in range(subset_count(n)) if (fam >> m) & 1]
    for m in members:
        for t in range(subset_count(n)):
            if t & m == m and not (fam >> t) & 1:
                return False
    for m1 in members:
        for m2 in members:
            if not (fam >> (m1 & m2)) & 1:
                return False
    return True


def ultrasets(n: int, cap: int = 4) -> list[int]:
    """All ultrasets on an n-set, by brute-force filter of P(P(X))."""
    if n > cap:
        raise StructuralError(f"ultraset enumeration capped at |X| <= {cap}")
    return [fam for fam in range(family_count(n)) if is_ultraset(fam, n)]


def ultrasets_via_pairs(n: int) -> list[int]:
    """Second route: choose one subset from each complementary pair (US2),
    then filter (US1).  Agrees with the plain filter; scales to |X|=5."""
    if n == 0:
        return []
    full = (1 << n) - 1
    pairs = [(m, full ^ m) for m in range(subset_count(n)) if m < (full ^ m)]
    out = []
    for choice in itertools.product((0, 1), repeat=len(pairs)):
        fam = 0
        for (lo, hi), pick in zip(pairs, choice):
            fam |= 1 << (hi if pick else lo)
        if not fam & 1:
            out.append(fam)
    out.sort()
    return out


def ultrafilters(n: int, cap: int = 5) -> list[int]:
    """All ultrafilters on an n-set; principal families, one per element."""
    if n > cap:
        raise StructuralError(f"ultrafilter enumeration capped at |X| <= {cap}")
    if n <= 4:
        return [fam for fam in range(family_count(n)) if is_ultrafilter(fam, n)]
    # |X| = 5: the raw 2^32 scan is pointless; stage the same axioms
    return [fam for fam in ultrasets_via_pairs(n) if is_ultrafilter(fam, n)]


def majority_family(n: int) -> int:
    """{Y : |Y| ≥ (n+1)/2} for odd n: the paper's ultraset that is not an
    ultrafilter once n ≥ 3."""
    if n % 2 == 0:
        raise StructuralError("majority family needs odd |X|")
    k = (n + 1) // 2
    fam = 0
    for m in range(subset_count(n)):
        if bin(m).count("1") >= k:
            fam |= 1 << m
    return fam


def partition_criterion(fam: int, n: int) -> bool:
    """True iff every 3-partition X = P0 ⊔ P1 ⊔ P2 has exactly one part in A."""
    if not is_ultraset(fam, n):
        raise CheckFailed("not an ultraset", fam)
    for assign in itertools.product(range(3), repeat=n):
        parts = [0, 0, 0]
        for x, i in enumerate(assign):
            parts[i] |= 1 << x
        hits = sum(1 for p in parts if (fam >> p) & 1)
        if hits != 1:
            return False
    return True


# --- the PP endofunctor on FinSet ----------------------------------------------

def pp_apply(g: FinMap, fam: int) -> int:
    """PP(g)(A) = {Z ⊆ Y : g^{-1}(Z) ∈ A} (double preimage, covariant)."""
    n, m = g.dom.size, g.cod.size
    out = 0
    for z in range(subset_count(m)):
        pre = 0
        for x in range(n):
            if (z >> g(x)) & 1:
                pre |= 1 << x
        if (fam >> pre) & 1:
            out |= 1 << z
    return out


def pp_endofunctor(universe: Sequence[FinSet], caps: Caps = DEFAULT_CAPS) -> EndofunctorTable:
    def obj_fn(x: FinSet) -> FinSet:
        guard("PP carrier", family_count(x.size), caps.enumeration)
        return FinSet(family_count(x.size))

    def arr_fn(f: FinMap) -> FinMap:
        dom, cod = obj_fn(f.dom), obj_fn(f.cod)
        return FinMap(dom, cod, tuple(pp_apply(f, fam) for fam in range(dom.size)))

    def unit_fn(x: FinSet) -> FinMap:
        return FinMap(x, obj_fn(x), tuple(double_powerset_unit(x.size, v) for v in x))

    return EndofunctorTable("PP", obj_fn, arr_fn, unit_fn, universe)


# --- transports between codensity families and powerset families -----------------

def chi_table(mask: int, n: int) -> tuple:
    """Characteristic map of a subset mask as a table X -> 2 (1 = member)."""
    return tuple((mask >> x) & 1 for x in range(n))


def family_to_mask(T: CodensityObject, fam_idx: int) -> int:
    """Transport a D={2} codensity family through chi into P(P(X))."""
    n = T.cat.underlying(T.base).size
    out = 0
    fam = T.families[fam_idx]
    for m in range(subset_count(n)):
        pos = T.comma.position(0, chi_table(m, n))
        if fam[pos]:
            out |= 1 << m
    return out


def mask_to_family(T: CodensityObject, mask: int) -> Optional[int]:
    """Inverse transport; None when the mask is not a natural family."""
    n = T.cat.underlying(T.base).size
    values = []
    for o in T.comma.objects:
        m = 0
        for x in range(n):
            if o.f(x):
                m |= 1 << x
        values.append((mask >> m) & 1)
    return T._index.get(tuple(values))


# --- verification harnesses --------------------------------------------------------

def verify_T2_is_US(n: int, caps: Caps = DEFAULT_CAPS, check_action: bool = True) -> dict:
    """T2(X) transported through chi equals ultrasets(X), unit-compatibly,
    with the comma-CSP and end-equalizer routes agreeing."""
    cat = FinSetCat()
    two = FinSet(2)
    X = FinSet(n)
    T = codensity_object(cat, X, [two], caps)
    E = end_equalizer_object(cat, X, [two], caps)
    report = {"size": n, "count": T.carrier.size}
    report["algorithms_agree"] = T.families == E.families
    transported = sorted(family_to_mask(T, i) for i in range(T.carrier.size))
    us = ultrasets(n)
    report["matches_ultrasets"] = transported == us
    eta = unit(T)
    report["units_match"] = all(
        family_to_mask(T, eta(x)) == double_powerset_unit(n, x) for x in range(n))
    if check_action:
        ok = True
        for m in range(n + 1):
            Y = FinSet(m)
            TY = codensity_object(cat, Y, [two], caps)
            for table in itertools.product(range(m), repeat=n):
                g = FinMap(X, Y, tuple(table))
                Tg = functor_action(T, TY, g)
                for i in range(T.carrier.size):
                    if family_to_mask(TY, Tg(i)) != pp_apply(g, family_to_mask(T, i)):
                        ok = False
        report["action_matches_pp"] = ok
    report["ok"] = all(v for k, v in report.items() if k not in ("size", "count"))
    return report


def verify_Td_is_identity_like(n: int, d: int, caps: Caps = DEFAULT_CAPS) -> dict:
    """|T_{d}(X)| = |X| with the unit a bijection onto principal families."""
    cat = FinSetCat()
    X = FinSet(n)
    T = codensity_object(cat, X, [FinSet(d)], caps)
    eta = unit(T)
    report = {"size": n, "d": d, "count": T.carrier.size,
              "count_is_size": T.carrier.size == n,
              "unit_bijective": eta.is_bijective()}
    report["ok"] = report["count_is_size"] and report["unit_bijective"]
    return report


def verify_T3_is_UF(n: int, caps: Caps = DEFAULT_CAPS) -> dict:
    """T3(X) ≅ X ≅ UF(X) with units matching, via the comma-CSP route."""
    rep = verify_Td_is_identity_like(n, 3, caps)
    uf = ultrafilters(n)
    rep["uf_count"] = len(uf)
    rep["matches_uf"] = len(uf) == n and sorted(
        double_powerset_unit(n, x) for x in range(n)) == uf
    rep["ok"] = rep["ok"] and rep["matches_uf"]
    return rep


def sub_functor_check(max_size: int = 4) -> dict:
    """UF ⊆ US ⊆ PP with agreeing units, and the PP action restricts to both."""
    report = {"containments": True, "units": True, "functorial": True, "witness": None,
              "counts": {}}
    members = {}
    for n in range(max_size + 1):
        uf = set(ultrafilters(n))
        us = set(ultrasets(n))
        members[n] = (uf, us)
        report["counts"][n] = (len(uf), len(us), family_count(n))
        if not uf <= us:
            report["containments"] = False
            report["witness"] = ("uf not in us", n)
        for x in range(n):
            if double_powerset_unit(n, x) not in uf:
                report["units"] = False
                report["witness"] = ("unit not an ultrafilter", n, x)
    for n in range(max_size + 1):
        for m in range(max_size + 1):
            for table in itertools.product(range(m), repeat=n):
                g = FinMap(FinSet(n), FinSet(m), tuple(table))
                uf, us = members[n]
                for fam in us:
                    if not is_ultraset(pp_apply(g, fam), m):
                        report["functorial"] = False
                        report["witness"] = ("us action", n, m, table, fam)
                for fam in uf:
                    if not is_ultrafilter(pp_apply(g, fam), m):
                        report["functorial"] = False
                        report["witness"] = ("uf action", n, m, table, fam)
    report["ok"] = report["containments"] and report["units"] and report["functorial"]
    return report
