"""The D-completion T_D: comma-limit and end-equalizer routes, unit,
functor action, multiplication, terminal maps and uniqueness audits.

Two independent algorithms compute T_D(c).  The comma-limit route is the
scalable one (backtracking over the comma diagram); the end-equalizer route
materializes the full product and filters, and serves as the oracle.  They
must agree as ordered lists wherever both run.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .caps import Caps, DEFAULT_CAPS, CheckFailed, EnumerationTooLarge, StructuralError, guard
from .categories import (Category, CatDiagram, CommaCategory, FinSetCat, GroupObject,
                         StructuredLimit, comma, limit_in_category)
from .finset import FinMap, FinSet, compose, identity


@dataclass
class CodensityObject:
    """T_D(c): the families (d,f) ↦ x satisfying naturality, in canonical order."""

    cat: Category
    base: object
    D: list
    comma: CommaCategory
    families: list[tuple]
    carrier: FinSet
    structure: object = None

    def __post_init__(self):
        self._index = {t: i for i, t in enumerate(self.families)}

    def index_of(self, family: tuple) -> int:
        return self._index[family]

    def family_value(self, fam_idx: int, d_index: int, f_table: tuple) -> int:
        return self.families[fam_idx][self.comma.position(d_index, f_table)]

    def family_to_json(self, fam_idx: int) -> dict:
        vals = [[o.d_index, list(o.f.table), v]
                for o, v in zip(self.comma.objects, self.families[fam_idx])]
        return {"base": self.cat.underlying(self.base).size,
                "D": [self.cat.underlying(d).size for d in self.D],
                "values": vals}


def codensity_object(cat: Category, c, D: Sequence, caps: Caps = DEFAULT_CAPS) -> CodensityObject:
    """T_D(c) as the limit of the comma projection (CSP route)."""
    cc = comma(cat, c, D, caps)
    objects = [D[o.d_index] for o in cc.objects]
    arrows = [(s, t, alpha) for s, t, alpha in cc.arrows()]
    res = limit_in_category(CatDiagram(cat, objects, arrows), caps)
    return CodensityObject(cat, c, list(D), cc, res.tuples, res.carrier, res.structure)


def end_equalizer_object(cat: Category, c, D: Sequence,
                         caps: Caps = DEFAULT_CAPS) -> CodensityObject:
    """T_D(c) as eq(prod_d d^{hom(c,d)} => prod_{alpha} d2^{hom(c,d1)}).

    Materializes the product, so use only at small scale; this is the oracle
    the CSP route is validated against.
    """
    cc = comma(cat, c, D, caps)
    sizes = [cat.underlying(D[o.d_index]).size for o in cc.objects]
    total = 1
    for s in sizes:
        total *= s
    guard("end-equalizer product", total, caps.enumeration)
    constraints = [(s, t, alpha.table) for s, t, alpha in cc.arrows()]
    families = []
    for tup in itertools.product(*(range(s) for s in sizes)):
        if all(alpha[tup[s]] == tup[t] for s, t, alpha in constraints):
            families.append(tup)
    return CodensityObject(cat, c, list(D), cc, families, FinSet(len(families)), None)


def unit(T: CodensityObject) -> FinMap:
    """η_c: x ↦ the principal family (d,f) ↦ f(x)."""
    base = T.cat.underlying(T.base)
    table = []
    for x in range(base.size):
        fam = tuple(o.f(x) for o in T.comma.objects)
        if fam not in T._index:
            raise CheckFailed("principal family is not natural (internal bug)", fam)
        table.append(T._index[fam])
    return FinMap(base, T.carrier, tuple(table))


def functor_action(T_src: CodensityObject, T_tgt: CodensityObject, g: FinMap) -> FinMap:
    """T(g): T(c) → T(c') for g: c → c', by reindexing along f ↦ f∘g."""
    if len(T_src.D) != len(T_tgt.D):
        raise StructuralError("functor action must keep D fixed")
    table = []
    for fam in T_src.families:
        out = []
        for o in T_tgt.comma.objects:
            fg = compose(o.f, g)  # (f∘g): c → d
            out.append(fam[T_src.comma.position(o.d_index, fg.table)])
        out = tuple(out)
        if out not in T_tgt._index:
            raise CheckFailed("functor action left the family set (internal bug)", out)
        table.append(T_tgt._index[out])
    return FinMap(T_src.carrier, T_tgt.carrier, tuple(table))


def rebase(T: CodensityObject):
    """The object usable as a new base for iterating T (T(c) itself)."""
    if T.cat.kind == "finset":
        return T.carrier
    if T.cat.kind == "fingrp":
        if not isinstance(T.structure, GroupObject):
            raise StructuralError("missing group structure on codensity object")
        return T.structure
    raise StructuralError("rebasing is realized for FinSet and FinGrp only")


@dataclass
class MonadLevel:
    """T(c) together with the comma category of its own carrier (for μ)."""

    T: CodensityObject
    comma2: CommaCategory
    ev_positions: list[int]  # comma position of (d, ev_f) in comma2, per comma object of T

    @staticmethod
    def build(T: CodensityObject, caps: Caps = DEFAULT_CAPS) -> "MonadLevel":
        cat = T.cat
        base2 = rebase(T)
        comma2 = comma(cat, base2, T.D, caps)
        ev_positions = []
        for pos, o in enumerate(T.comma.objects):
            ev_table = tuple(fam[pos] for fam in T.families)
            ev_positions.append(comma2.position(o.d_index, ev_table))
        return MonadLevel(T, comma2, ev_positions)

    def mu_component(self, y: Sequence[int]) -> tuple:
        """μ(y) for y a family over comma2, without enumerating T²."""
        return tuple(y[p] for p in self.ev_positions)

    def unit_family_at_T(self, x: int) -> tuple:
        """η_{T(c)}(x) as a family over comma2."""
        return tuple(o.f(x) for o in self.comma2.objects)

    def T_eta_family(self, x: int, eta: FinMap) -> tuple:
        """T(η_c)(x) as a family over comma2 (pointwise functor action)."""
        fam = self.T.families[x]
        out = []
        for o in self.comma2.objects:
            f_eta = compose(o.f, eta)  # T(c)→d precomposed with c→T(c)
            out.append(fam[self.T.comma.position(o.d_index, f_eta.table)])
        return tuple(out)


def multiplication(T: CodensityObject, caps: Caps = DEFAULT_CAPS):
    """μ_c: T²(c) → T(c) tabulated; raises EnumerationTooLarge when T² blows up."""
    level = MonadLevel.build(T, caps)
    T2 = codensity_object(T.cat, rebase(T), T.D, caps)
    table = []
    for y in T2.families:
        out = level.mu_component(y)
        if out not in T._index:
            raise CheckFailed("μ output is not a natural family (internal bug)", out)
        table.append(T._index[out])
    return T2, FinMap(T2.carrier, T.carrier, tuple(table))


def unit_laws_report(T: CodensityObject, caps: Caps = DEFAULT_CAPS) -> dict:
    """μ∘ηT = id = μ∘Tη, checked pointwise on T(c) (no T² enumeration)."""
    level = MonadLevel.build(T, caps)
    eta = unit(T)
    failures = []
    for x in range(T.carrier.size):
        left = level.mu_component(level.unit_family_at_T(x))
        if left != T.families[x]:
            failures.append(("mu∘etaT", x))
        right = level.mu_component(level.T_eta_family(x, eta))
        if right != T.families[x]:
            failures.append(("mu∘Teta", x))
    return {"checked": T.carrier.size, "failures": failures}


def associativity_report(T: CodensityObject, caps: Caps = DEFAULT_CAPS) -> dict:
    """μ∘μT = μ∘Tμ on all of T³(c); caller catches EnumerationTooLarge."""
    T2, mu = multiplication(T, caps)
    T3, mu_at_T = multiplication(T2, caps)
    T_mu = functor_action(T3, T2, mu)
    lhs = compose(mu, mu_at_T)
    rhs = compose(mu, T_mu)
    failures = [w for w in range(T3.carrier.size) if lhs(w) != rhs(w)]
    return {"checked": T3.carrier.size, "failures": failures}


# --- coaugmented endofunctors on FinSet ------------------------------------------

class EndofunctorTable:
    """A coaugmented endofunctor on FinSet given by programmatic maps.

    All functor-law checking is confined to the explicit universe; global
    statements are only ever reported as verified on that universe.
    """

    def __init__(self, name: str, obj_fn: Callable[[FinSet], FinSet],
                 arr_fn: Callable[[FinMap], FinMap],
                 unit_fn: Callable[[FinSet], FinMap],
                 universe: Sequence[FinSet]):
        self.name = name
        self.obj = obj_fn
        self.arr = arr_fn
        self.unit = unit_fn
        self.universe = list(universe)

    def check_laws(self, maps: Optional[Sequence[FinMap]] = None) -> list:
        """Functoriality and unit naturality on the universe; returns failures."""
        failures = []
        if maps is None:
            maps = universe_maps(self.universe)
        for x in self.universe:
            if self.arr(identity(x)).table != identity(self.obj(x)).table:
                failures.append(("F(id)=id", x.size))
        for f in maps:
            for g in maps:
                if f.cod.size != g.dom.size:
                    continue
                lhs = self.arr(f.then(g))
                rhs = self.arr(f).then(self.arr(g))
                if lhs.table != rhs.table:
                    failures.append(("F(g∘f)=F(g)∘F(f)", (f.table, g.table)))
        for f in maps:
            lhs = compose(self.arr(f), self.unit(f.dom))
            rhs = compose(self.unit(f.cod), f)
            if lhs.table != rhs.table:
                failures.append(("unit naturality", f.table))
        return failures


def universe_maps(universe: Sequence[FinSet]) -> list[FinMap]:
    from .finset import all_maps
    out = []
    for a in universe:
        for b in universe:
            out.extend(all_maps(a, b))
    return out


def identity_endofunctor(universe: Sequence[FinSet]) -> EndofunctorTable:
    return EndofunctorTable("Id", lambda x: x, lambda f: f, identity, universe)


def codensity_endofunctor(cat: Category, D: Sequence, universe: Sequence[FinSet],
                          caps: Caps = DEFAULT_CAPS) -> EndofunctorTable:
    """T_D packaged as an EndofunctorTable (FinSet only), memoized per base size."""
    cache: dict[int, CodensityObject] = {}

    def T_at(x: FinSet) -> CodensityObject:
        if x.size not in cache:
            cache[x.size] = codensity_object(cat, x, D, caps)
        return cache[x.size]

    def obj_fn(x: FinSet) -> FinSet:
        return T_at(x).carrier

    def arr_fn(f: FinMap) -> FinMap:
        return functor_action(T_at(f.dom), T_at(f.cod), f)

    def unit_fn(x: FinSet) -> FinMap:
        return unit(T_at(x))

    ef = EndofunctorTable(f"T_D", obj_fn, arr_fn, unit_fn, universe)
    ef.codensity_at = T_at
    return ef


# --- the terminal map δ: F → T_D ----------------------------------------------------

def terminal_map(F: EndofunctorTable, cat: Category, D: Sequence, c: FinSet,
                 T_c: Optional[CodensityObject] = None,
                 caps: Caps = DEFAULT_CAPS) -> FinMap:
    """δ_c(u) = family (d,f) ↦ (η^F_d)^{-1}(F(f)(u)).

    Requires every d ∈ D to be preserved by F (unit a bijection there).
    """
    if cat.kind != "finset":
        raise StructuralError("terminal_map is realized over FinSet")
    inverses = {}
    for i, d in enumerate(D):
        eta_d = F.unit(d)
        if not eta_d.is_bijective():
            raise CheckFailed(f"D not preserved by {F.name}", d.size)
        inverses[i] = eta_d.inverse()
    if T_c is None:
        T_c = codensity_object(cat, c, D, caps)
    Fc = F.obj(c)
    table = []
    for u in range(Fc.size):
        fam = []
        for o in T_c.comma.objects:
            Ff = F.arr(o.f)
            fam.append(inverses[o.d_index](Ff(u)))
        fam = tuple(fam)
        if fam not in T_c._index:
            raise CheckFailed("terminal map output is not a natural family", (u, fam))
        table.append(T_c._index[fam])
    return FinMap(Fc, T_c.carrier, tuple(table))


def terminal_map_checks(F: EndofunctorTable, cat: Category, D: Sequence,
                        caps: Caps = DEFAULT_CAPS) -> dict:
    """δ is natural over the universe and satisfies δ∘η^F = η^T."""
    Ts = {x.size: codensity_object(cat, x, D, caps) for x in F.universe}
    deltas = {x.size: terminal_map(F, cat, D, x, Ts[x.size], caps) for x in F.universe}
    failures = []
    for x in F.universe:
        lhs = compose(deltas[x.size], F.unit(x))
        rhs = unit(Ts[x.size])
        if lhs.table != rhs.table:
            failures.append(("δ∘η^F = η^T", x.size))
    for f in universe_maps(F.universe):
        Tg = functor_action(Ts[f.dom.size], Ts[f.cod.size], f)
        lhs = compose(deltas[f.cod.size], F.arr(f))
        rhs = compose(Tg, deltas[f.dom.size])
        if lhs.table != rhs.table:
            failures.append(("naturality", f.table))
    return {"failures": failures, "deltas": deltas}


def uniqueness_audit(F: EndofunctorTable, cat: Category, D: Sequence,
                     universe: Sequence[FinSet], caps: Caps = DEFAULT_CAPS) -> dict:
    """Count ALL coaugmentation-compatible natural transformations F → T_D
    on the universe.  Exhaustive; raises EnumerationTooLarge above the cap.
    """
    Ts = {x.size: codensity_object(cat, x, D, caps) for x in universe}
    etas_T = {x.size: unit(Ts[x.size]) for x in universe}
    per_object: dict[int, list[tuple]] = {}
    for x in universe:
        Fx = F.obj(x)
        Tx = Ts[x.size].carrier
        eta_F = F.unit(x)
        forced: dict[int, int] = {}
        for p in range(x.size):
            u = eta_F(p)
            v = etas_T[x.size](p)
            if forced.get(u, v) != v:
                return {"count": 0, "reason": "coaugmentation is inconsistent"}
            forced[u] = v
        free = [u for u in range(Fx.size) if u not in forced]
        guard("uniqueness audit candidates",
              (Tx.size ** len(free)) if free else 1, caps.audit)
        cands = []
        for assign in itertools.product(range(Tx.size), repeat=len(free)):
            table = [0] * Fx.size
            for u, v in forced.items():
                table[u] = v
            for u, v in zip(free, assign):
                table[u] = v
            cands.append(tuple(table))
        if Tx.size == 0 and Fx.size > 0:
            cands = []
        per_object[x.size] = cands
    maps = universe_maps(universe)
    actions = {}
    for f in maps:
        actions[(f.dom.size, f.cod.size, f.table)] = (
            F.arr(f), functor_action(Ts[f.dom.size], Ts[f.cod.size], f))
    sizes = [x.size for x in universe]
    total = 1
    for s in sizes:
        total *= max(1, len(per_object[s]))
    guard("uniqueness audit product", total, caps.audit)
    found = []
    for combo in itertools.product(*(per_object[s] for s in sizes)):
        t = dict(zip(sizes, combo))
        ok = True
        for f in maps:
            Ff, Tf = actions[(f.dom.size, f.cod.size, f.table)]
            tx, ty = t[f.dom.size], t[f.cod.size]
            if any(ty[Ff(u)] != Tf(tx[u]) for u in range(Ff.dom.size)):
                ok = False
                break
        if ok:
            found.append(t)
            if len(found) > 4:
                break
    return {"count": len(found), "transformations": found}


def continuation_monad(d: int, caps: Caps = DEFAULT_CAPS):
    """The naive double dual monad X ↦ d^{hom(X,d)} (as a set monad)."""
    from .monads import ContinuationMonad
    return ContinuationMonad(d, caps)
