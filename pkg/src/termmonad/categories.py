"""Finite concrete categories with enumerable hom-sets: FinSet, FinGrp, FinVect(q).

Every morphism is carried by a FinMap on underlying element codes, so the
comma-category and limit machinery is uniform across kinds.  Structured kinds
(groups, vector spaces) add their own morphism checks and equip limits with
pointwise structure, verifying closure.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import gcd, prod
from typing import Optional, Sequence

from .caps import Caps, DEFAULT_CAPS, StructuralError, guard
from .finset import Diagram, FinMap, FinSet, all_maps, compose, identity, limit


# --- groups -------------------------------------------------------------------

class GroupObject:
    """A finite group given by its multiplication table (validated)."""

    def __init__(self, mul: Sequence[Sequence[int]], name: str = "G"):
        self.mul = tuple(tuple(row) for row in mul)
        self.size = len(self.mul)
        self.name = name
        if any(len(row) != self.size for row in self.mul):
            raise StructuralError("multiplication table must be square")
        ident = None
        for e in range(self.size):
            if all(self.mul[e][x] == x == self.mul[x][e] for x in range(self.size)):
                ident = e
                break
        if ident is None:
            raise StructuralError("no identity element")
        self.identity = ident
        inv = [None] * self.size
        for x in range(self.size):
            for y in range(self.size):
                if self.mul[x][y] == ident and self.mul[y][x] == ident:
                    inv[x] = y
                    break
        if any(v is None for v in inv):
            raise StructuralError("missing inverses")
        self.inverse = tuple(inv)
        for a in range(self.size):
            for b in range(self.size):
                for c in range(self.size):
                    if self.mul[self.mul[a][b]][c] != self.mul[a][self.mul[b][c]]:
                        raise StructuralError(f"not associative at {(a, b, c)}")

    def op(self, a: int, b: int) -> int:
        return self.mul[a][b]

    def element_order(self, a: int) -> int:
        x, n = a, 1
        while x != self.identity:
            x = self.mul[x][a]
            n += 1
        return n

    def exponent(self) -> int:
        out = 1
        for a in range(self.size):
            o = self.element_order(a)
            out = out * o // gcd(out, o)
        return out

    def underlying(self) -> FinSet:
        return FinSet(self.size)

    def __repr__(self):
        return f"GroupObject({self.name}, size={self.size})"


def cyclic(n: int) -> GroupObject:
    return GroupObject([[(a + b) % n for b in range(n)] for a in range(n)], f"C{n}")


def direct_product(g: GroupObject, h: GroupObject) -> GroupObject:
    size = g.size * h.size
    def enc(a, b):
        return a * h.size + b
    mul = [[0] * size for _ in range(size)]
    for a1, b1, a2, b2 in itertools.product(range(g.size), range(h.size),
                                            range(g.size), range(h.size)):
        mul[enc(a1, b1)][enc(a2, b2)] = enc(g.mul[a1][a2], h.mul[b1][b2])
    return GroupObject(mul, f"{g.name}x{h.name}")


def klein_four() -> GroupObject:
    return GroupObject(direct_product(cyclic(2), cyclic(2)).mul, "C2xC2")


def symmetric3() -> GroupObject:
    """S3 on {0,1,2}; elements are permutations in lexicographic one-line order."""
    perms = sorted(itertools.permutations(range(3)))
    idx = {p: i for i, p in enumerate(perms)}
    # (p*q)(x) = p(q(x))
    mul = [[idx[tuple(p[q[x]] for x in range(3))] for q in perms] for p in perms]
    return GroupObject(mul, "S3")


NAMED_GROUPS = {
    "c1": lambda: cyclic(1),
    "c2": lambda: cyclic(2),
    "c3": lambda: cyclic(3),
    "c4": lambda: cyclic(4),
    "c5": lambda: cyclic(5),
    "c6": lambda: cyclic(6),
    "klein4": klein_four,
    "c2xc2": klein_four,
    "s3": symmetric3,
}


def is_group_hom(g: GroupObject, h: GroupObject, table: Sequence[int]) -> bool:
    return all(table[g.mul[a][b]] == h.mul[table[a]][table[b]]
               for a in range(g.size) for b in range(g.size))


def group_homs(g: GroupObject, h: GroupObject) -> list[FinMap]:
    """All homomorphisms g -> h via backtracking with product propagation.

    Exact for any finite groups; ordered lexicographically by table.
    """
    n = g.size
    out = []

    def extend(assign: dict) -> Optional[dict]:
        # close under deduced products; None on conflict
        assign = dict(assign)
        changed = True
        while changed:
            changed = False
            keys = list(assign)
            for a in keys:
                for b in keys:
                    ab = g.mul[a][b]
                    v = h.mul[assign[a]][assign[b]]
                    if ab in assign:
                        if assign[ab] != v:
                            return None
                    else:
                        assign[ab] = v
                        changed = True
        return assign

    def search(assign: dict):
        if len(assign) == n:
            table = tuple(assign[a] for a in range(n))
            if is_group_hom(g, h, table):
                out.append(FinMap(g.underlying(), h.underlying(), table))
            return
        a = min(x for x in range(n) if x not in assign)
        for v in range(h.size):
            nxt = extend({**assign, a: v})
            if nxt is not None:
                search(nxt)

    search({g.identity: h.identity})
    out.sort(key=lambda m: m.table)
    return out


def group_homs_bruteforce(g: GroupObject, h: GroupObject,
                          caps: Caps = DEFAULT_CAPS) -> list[FinMap]:
    """Oracle route: filter every set map."""
    guard(f"group hom brute force {g.name}->{h.name}", h.size ** g.size, caps.enumeration)
    out = []
    for table in itertools.product(range(h.size), repeat=g.size):
        if is_group_hom(g, h, table):
            out.append(FinMap(g.underlying(), h.underlying(), table))
    return out


def generating_set(g: GroupObject) -> list[int]:
    """A small generating set, greedily: try singletons, then pairs, etc."""
    def generates(gens):
        seen = {g.identity}
        frontier = [g.identity]
        while frontier:
            x = frontier.pop()
            for s in gens:
                y = g.mul[x][s]
                if y not in seen:
                    seen.add(y)
                    frontier.append(y)
        return len(seen) == g.size

    for k in range(1, g.size + 1):
        for gens in itertools.combinations(range(g.size), k):
            if generates(gens):
                return list(gens)
    return list(range(g.size))


def group_homs_generators(g: GroupObject, h: GroupObject) -> list[FinMap]:
    """Second route: enumerate generator images, extend by words, verify."""
    gens = generating_set(g)
    # express every element as identity or product (element, generator)
    word = {g.identity: None}
    frontier = [g.identity]
    while frontier:
        x = frontier.pop(0)
        for s in gens:
            y = g.mul[x][s]
            if y not in word:
                word[y] = (x, s)
                frontier.append(y)
    order = sorted(word)  # all elements reached
    if len(order) != g.size:
        raise StructuralError("generating set does not generate")
    out = []
    for images in itertools.product(range(h.size), repeat=len(gens)):
        img = {g.identity: h.identity}
        gen_img = dict(zip(gens, images))
        ok = True
        for y in order:
            if word[y] is None:
                continue
            x, s = word[y]
            img[y] = h.mul[img[x]][gen_img[s]]
        table = tuple(img[a] for a in range(g.size))
        if is_group_hom(g, h, table):
            out.append(FinMap(g.underlying(), h.underlying(), table))
    dedup = sorted({m.table for m in out})
    return [FinMap(g.underlying(), h.underlying(), t) for t in dedup]


# --- finite fields and vector spaces -------------------------------------------

_GF4_ADD = ((0, 1, 2, 3), (1, 0, 3, 2), (2, 3, 0, 1), (3, 2, 1, 0))
_GF4_MUL = ((0, 0, 0, 0), (0, 1, 2, 3), (0, 2, 3, 1), (0, 3, 1, 2))


class GF:
    """Arithmetic tables for GF(q), q in {2,3,4,5} (4 = F2[x]/(x^2+x+1))."""

    def __init__(self, q: int):
        if q in (2, 3, 5):
            self.add = tuple(tuple((a + b) % q for b in range(q)) for a in range(q))
            self.mul = tuple(tuple((a * b) % q for b in range(q)) for a in range(q))
        elif q == 4:
            self.add, self.mul = _GF4_ADD, _GF4_MUL
        else:
            raise StructuralError(f"unsupported field order {q}")
        self.q = q
        self.neg = tuple(next(b for b in range(q) if self.add[a][b] == 0) for a in range(q))

    def sub(self, a: int, b: int) -> int:
        return self.add[a][self.neg[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise StructuralError("zero has no inverse")
        return next(b for b in range(self.q) if self.mul[a][b] == 1)


@lru_cache(maxsize=None)
def field(q: int) -> GF:
    return GF(q)


class VectObject:
    """F_q^dim with vectors enumerated as coordinate tuples (lexicographic)."""

    def __init__(self, q: int, dim: int, caps: Caps = DEFAULT_CAPS):
        guard(f"vector enumeration q={q} dim={dim}", q ** dim, min(caps.enumeration, 2 ** 16))
        self.q = q
        self.dim = dim
        self.field = field(q)
        self.size = q ** dim

    def decode(self, code: int) -> tuple:
        out = []
        for i in range(self.dim - 1, -1, -1):
            out.append((code // (self.q ** i)) % self.q)
        return tuple(out)

    def encode(self, vec: Sequence[int]) -> int:
        code = 0
        for v in vec:
            code = code * self.q + v
        return code

    def add_codes(self, a: int, b: int) -> int:
        fa, fb = self.decode(a), self.decode(b)
        return self.encode([self.field.add[x][y] for x, y in zip(fa, fb)])

    def scale_code(self, lam: int, a: int) -> int:
        return self.encode([self.field.mul[lam][x] for x in self.decode(a)])

    def underlying(self) -> FinSet:
        return FinSet(self.size)

    def __repr__(self):
        return f"VectObject(q={self.q}, dim={self.dim})"


def matrix_to_finmap(v: VectObject, w: VectObject, mat: Sequence[Sequence[int]]) -> FinMap:
    """mat is rows x cols = w.dim x v.dim over F_q; acts on column vectors."""
    f = v.field
    table = []
    for code in range(v.size):
        x = v.decode(code)
        y = [0] * w.dim
        for i in range(w.dim):
            acc = 0
            for j in range(v.dim):
                acc = f.add[acc][f.mul[mat[i][j]][x[j]]]
            y[i] = acc
        table.append(w.encode(y))
    return FinMap(v.underlying(), w.underlying(), tuple(table))


def is_linear(v: VectObject, w: VectObject, m: FinMap) -> bool:
    for a in range(v.size):
        for b in range(v.size):
            if m(v.add_codes(a, b)) != w.add_codes(m(a), m(b)):
                return False
        for lam in range(v.q):
            if m(v.scale_code(lam, a)) != w.scale_code(lam, m(a)):
                return False
    return True


# --- the category interface -----------------------------------------------------

class Category:
    """Uniform interface; objects are kind-specific, morphisms are FinMaps."""

    kind = "abstract"

    def underlying(self, obj) -> FinSet:
        raise NotImplementedError

    def hom(self, c, d, caps: Caps = DEFAULT_CAPS) -> list[FinMap]:
        raise NotImplementedError

    def is_morphism(self, c, d, m: FinMap) -> bool:
        raise NotImplementedError

    def identity(self, c) -> FinMap:
        return identity(self.underlying(c))


class FinSetCat(Category):
    kind = "finset"

    def underlying(self, obj: FinSet) -> FinSet:
        return obj

    def hom(self, c, d, caps: Caps = DEFAULT_CAPS) -> list[FinMap]:
        return all_maps(c, d, caps)

    def is_morphism(self, c, d, m: FinMap) -> bool:
        return m.dom.size == c.size and m.cod.size == d.size


class FinGrpCat(Category):
    kind = "fingrp"

    def underlying(self, obj: GroupObject) -> FinSet:
        return obj.underlying()

    def hom(self, c, d, caps: Caps = DEFAULT_CAPS) -> list[FinMap]:
        return group_homs(c, d)

    def is_morphism(self, c, d, m: FinMap) -> bool:
        return is_group_hom(c, d, m.table)


class FinVectCat(Category):
    kind = "finvect"

    def __init__(self, q: int):
        self.q = q

    def underlying(self, obj: VectObject) -> FinSet:
        return obj.underlying()

    def hom(self, c, d, caps: Caps = DEFAULT_CAPS) -> list[FinMap]:
        guard(f"linear maps {c.dim}->{d.dim} over F{self.q}",
              self.q ** (c.dim * d.dim), caps.enumeration)
        mats = itertools.product(
            *(itertools.product(range(self.q), repeat=c.dim) for _ in range(d.dim)))
        return [matrix_to_finmap(c, d, mat) for mat in mats]

    def is_morphism(self, c, d, m: FinMap) -> bool:
        return is_linear(c, d, m)


# --- comma categories -------------------------------------------------------------

@dataclass(frozen=True)
class CommaObject:
    d_index: int
    f: FinMap  # base -> D[d_index]


class CommaCategory:
    """c ↓ D for a base object c and a finite list D of target objects.

    Objects are pairs (d, f: c→d) sorted by (index of d in D, lexicographic
    f-table); arrows are all post-composition squares alpha∘f = f'.
    """

    def __init__(self, cat: Category, c, D: Sequence, caps: Caps = DEFAULT_CAPS):
        if not D:
            raise StructuralError("comma category needs a nonempty target list")
        self.cat = cat
        self.base = c
        self.D = list(D)
        self.objects: list[CommaObject] = []
        for i, d in enumerate(self.D):
            for f in cat.hom(c, d, caps):
                self.objects.append(CommaObject(i, f))
        self._pos = {(o.d_index, o.f.table): k for k, o in enumerate(self.objects)}
        self.homs = {(i, j): cat.hom(self.D[i], self.D[j], caps)
                     for i in range(len(self.D)) for j in range(len(self.D))}

    def position(self, d_index: int, f_table: tuple) -> int:
        return self._pos[(d_index, f_table)]

    def arrows(self):
        """Yield (src_pos, tgt_pos, alpha) for every comma arrow."""
        for k, o in enumerate(self.objects):
            for j in range(len(self.D)):
                for alpha in self.homs[(o.d_index, j)]:
                    tgt = self.position(j, compose(alpha, o.f).table)
                    yield k, tgt, alpha

    def arrow_count(self) -> int:
        return sum(1 for _ in self.arrows())

    def diagram(self) -> Diagram:
        dg = Diagram()
        for o in self.objects:
            dg.add_node(self.cat.underlying(self.D[o.d_index]))
        for s, t, alpha in self.arrows():
            dg.add_arrow(s, t, alpha)
        return dg


def comma(cat: Category, c, D: Sequence, caps: Caps = DEFAULT_CAPS) -> CommaCategory:
    return CommaCategory(cat, c, D, caps)


# --- limits with structure ----------------------------------------------------------

@dataclass
class CatDiagram:
    cat: Category
    objects: list
    arrows: list[tuple[int, int, FinMap]]


@dataclass
class StructuredLimit:
    carrier: FinSet
    tuples: list[tuple]
    structure: object  # None | GroupObject | VectStructure

    def index_of(self, t: tuple) -> int:
        return self.tuples.index(t)


@dataclass
class VectStructure:
    q: int
    dim: int


def limit_in_category(diag: CatDiagram, caps: Caps = DEFAULT_CAPS) -> StructuredLimit:
    """Underlying limit plus pointwise structure for FinGrp / FinVect.

    A closure failure would mean the arrows were not structure maps; it is
    trapped as a StructuralError rather than silently patched.
    """
    cat = diag.cat
    dg = Diagram()
    for o in diag.objects:
        dg.add_node(cat.underlying(o))
    for s, t, m in diag.arrows:
        if not cat.is_morphism(diag.objects[s], diag.objects[t], m):
            raise StructuralError("diagram arrow is not a morphism of the category")
        dg.add_arrow(s, t, m)
    res = limit(dg, caps)
    if cat.kind == "finset":
        return StructuredLimit(res.carrier, res.tuples, None)
    if cat.kind == "fingrp":
        pos = {t: i for i, t in enumerate(res.tuples)}
        mul = []
        for t1 in res.tuples:
            row = []
            for t2 in res.tuples:
                t = tuple(diag.objects[i].mul[a][b] for i, (a, b) in enumerate(zip(t1, t2)))
                if t not in pos:
                    raise StructuralError("limit solution set not closed under product")
                row.append(pos[t])
            mul.append(row)
        return StructuredLimit(res.carrier, res.tuples, GroupObject(mul, "lim"))
    if cat.kind == "finvect":
        pos = {t: i for i, t in enumerate(res.tuples)}
        q = diag.objects[0].q if diag.objects else cat.q
        for t1 in res.tuples:
            for t2 in res.tuples:
                t = tuple(diag.objects[i].add_codes(a, b)
                          for i, (a, b) in enumerate(zip(t1, t2)))
                if t not in pos:
                    raise StructuralError("limit solution set not closed under addition")
            for lam in range(q):
                t = tuple(diag.objects[i].scale_code(lam, a) for i, a in enumerate(t1))
                if t not in pos:
                    raise StructuralError("limit solution set not closed under scaling")
        n = len(res.tuples)
        dim = 0
        while q ** dim < n:
            dim += 1
        if q ** dim != n:
            raise StructuralError("solution count is not a power of q")
        return StructuredLimit(res.carrier, res.tuples, VectStructure(q, dim))
    raise StructuralError(f"unknown category kind {cat.kind}")


def universal_property_audit(diag: CatDiagram, lim: StructuredLimit, apexes: Sequence,
                             caps: Caps = DEFAULT_CAPS) -> int:
    """For each enumerated competing cone, assert a unique mediating morphism.

    Returns the number of cones audited.  Exhaustive, so apex/hom sizes must
    stay desk scale.
    """
    cat = diag.cat
    checked = 0
    projections = [FinMap(lim.carrier, cat.underlying(o), tuple(t[i] for t in lim.tuples))
                   for i, o in enumerate(diag.objects)]
    for apex in apexes:
        legs_options = [cat.hom(apex, o, caps) for o in diag.objects]
        a_size = cat.underlying(apex).size
        guard("mediating-candidate enumeration",
              (lim.carrier.size ** a_size) if a_size else 1, caps.audit)
        candidates = list(itertools.product(range(lim.carrier.size), repeat=a_size))
        for legs in itertools.product(*legs_options):
            if any(compose(m, legs[s]).table != legs[t].table for s, t, m in diag.arrows):
                continue
            checked += 1
            mediators = [cand for cand in candidates
                         if all(tuple(pr(cand[x]) for x in range(a_size)) == legs[i].table
                                for i, pr in enumerate(projections))]
            if len(mediators) != 1:
                raise StructuralError(
                    f"universal property violated: {len(mediators)} mediators for a cone")
    return checked


# --- JSON descriptors ----------------------------------------------------------------

def object_from_json(data: dict):
    kind = data["kind"]
    if kind == "finset":
        return FinSetCat(), FinSet.from_json(data)
    if kind == "fingrp":
        if "name" in data:
            return FinGrpCat(), NAMED_GROUPS[data["name"].lower()]()
        return FinGrpCat(), GroupObject(data["table"])
    if kind == "finvect":
        return FinVectCat(int(data["q"])), VectObject(int(data["q"]), int(data["dim"]))
    raise StructuralError(f"unknown object kind {kind}")
