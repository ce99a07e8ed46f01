"""Built-in monads on finite sets, given programmatically on structured values.

A monad here acts on ESets (finite sets of hashable Python values), so it can
be evaluated not only on the verification universe but on any small set that
shows up while iterating (equalizer sub-functors, towers).  Continuation
monads d^{hom(-,d)} get special treatment: an element of DD_d(Y) is a table
over maps Y -> d, which stops being materializable once Y is itself a large
carrier; such elements are handled lazily and the equalizer membership test
falls back to an exact principality rule (see ContinuationMonad.equalizes).
"""

from __future__ import annotations

import itertools
import zlib
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .caps import Caps, DEFAULT_CAPS, EnumerationTooLarge, StructuralError, guard
from .categories import GroupObject, NAMED_GROUPS, cyclic
from .finset import FinSet


@dataclass(frozen=True)
class ESet:
    """A finite set of hashable values in a fixed canonical order."""

    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "index", {v: i for i, v in enumerate(self.values)})
        if len(self.index) != len(self.values):
            raise StructuralError("duplicate values in ESet")

    @property
    def size(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)


def eset_of_size(n: int) -> ESet:
    return ESet(tuple(range(n)))


@dataclass(frozen=True)
class EMap:
    """A map of ESets, tabulated by index."""

    dom: ESet
    cod: ESet
    table: tuple

    def value_apply(self, v):
        return self.cod.values[self.table[self.dom.index[v]]]

    def __call__(self, i: int) -> int:
        return self.table[i]


def emap_from_fn(dom: ESet, cod: ESet, fn: Callable) -> EMap:
    return EMap(dom, cod, tuple(cod.index[fn(v)] for v in dom.values))


@dataclass
class Universe:
    """The verification universe: plain sets of the given sizes, all maps."""

    sizes: tuple = (0, 1, 2, 3)

    def __post_init__(self):
        self.esets = {n: eset_of_size(n) for n in self.sizes}

    def objects(self) -> list[ESet]:
        return [self.esets[n] for n in self.sizes]

    def maps(self) -> list[EMap]:
        out = []
        for n in self.sizes:
            for m in self.sizes:
                for table in itertools.product(range(m), repeat=n):
                    out.append(EMap(self.esets[n], self.esets[m], table))
        return out


class SetMonad:
    """Interface for a monad on finite sets with structured element values."""

    name = "abstract"
    default_sizes = (0, 1, 2, 3)

    def __init__(self, caps: Caps = DEFAULT_CAPS):
        self.caps = caps
        self._carrier_cache: dict[tuple, ESet] = {}

    # -- object / arrow / unit / mult on element values

    def carrier(self, Y: ESet) -> ESet:
        key = Y.values
        if key not in self._carrier_cache:
            self._carrier_cache[key] = ESet(tuple(self._elements(Y)))
        return self._carrier_cache[key]

    def _elements(self, Y: ESet) -> list:
        raise NotImplementedError

    def map_el(self, f: EMap, v):
        raise NotImplementedError

    def unit_el(self, Y: ESet, y):
        raise NotImplementedError

    def mult_el(self, Y: ESet, w):
        raise NotImplementedError

    def mult_sub(self, Y: ESet, subvalues: Sequence, w):
        """μ restricted along a sub-carrier; structural monads need no lift."""
        return self.mult_el(Y, w)

    def random_el(self, Z: ESet, rng):
        MZ = self.carrier(Z)
        return MZ.values[rng.randrange(MZ.size)]

    def can_materialize_square(self, Y: ESet) -> bool:
        """Whether M(M(Y)) is enumerable under the caps."""
        try:
            self.carrier(self.carrier(Y))
            return True
        except EnumerationTooLarge:
            return False

    # -- equalizer of M => M²

    def unit_emap(self, Y: ESet) -> EMap:
        MY = self.carrier(Y)
        return EMap(Y, MY, tuple(MY.index[self.unit_el(Y, y)] for y in Y.values))

    def equalizes(self, Y: ESet, v) -> bool:
        """M(η_Y)(v) == η_{M(Y)}(v), compared as values of M(M(Y))."""
        MY = self.carrier(Y)
        a = self.map_el(self.unit_emap(Y), v)
        b = self.unit_el(MY, v)
        return a == b

    def terminal_members(self, Y: ESet) -> list:
        MY = self.carrier(Y)
        return [v for v in MY.values if self.equalizes(Y, v)]

    def image_preserved(self, Y: ESet) -> bool:
        """Whether η_Y is a bijection onto the equalizer members at Y."""
        members = self.terminal_members(Y)
        units = [self.unit_el(Y, y) for y in Y.values]
        return len(set(units)) == Y.size and set(units) == set(members)


class IdentityMonad(SetMonad):
    name = "identity"

    def _elements(self, Y):
        return list(Y.values)

    def map_el(self, f, v):
        return f.value_apply(v)

    def unit_el(self, Y, y):
        return y

    def mult_el(self, Y, w):
        return w


NOTHING = ("nothing",)


class MaybeMonad(SetMonad):
    name = "maybe"

    def _elements(self, Y):
        return [("just", y) for y in Y.values] + [NOTHING]

    def map_el(self, f, v):
        return ("just", f.value_apply(v[1])) if v[0] == "just" else NOTHING

    def unit_el(self, Y, y):
        return ("just", y)

    def mult_el(self, Y, w):
        return w[1] if w[0] == "just" else NOTHING


class WriterMonad(SetMonad):
    name = "writer"

    def __init__(self, group: Optional[GroupObject] = None, caps: Caps = DEFAULT_CAPS):
        super().__init__(caps)
        self.group = group if group is not None else cyclic(2)
        self.name = f"writer({self.group.name})"

    def _elements(self, Y):
        return [(y, g) for y in Y.values for g in range(self.group.size)]

    def map_el(self, f, v):
        return (f.value_apply(v[0]), v[1])

    def unit_el(self, Y, y):
        return (y, self.group.identity)

    def mult_el(self, Y, w):
        (y, a), b = w
        return (y, self.group.mul[a][b])


class ConstOneMonad(SetMonad):
    name = "const1"

    def _elements(self, Y):
        return ["*"]

    def map_el(self, f, v):
        return "*"

    def unit_el(self, Y, y):
        return "*"

    def mult_el(self, Y, w):
        return "*"


class PowersetMonad(SetMonad):
    def __init__(self, nonempty: bool = False, caps: Caps = DEFAULT_CAPS):
        super().__init__(caps)
        self.nonempty = nonempty
        self.name = "powerset1" if nonempty else "powerset"

    def _elements(self, Y):
        guard(f"{self.name} carrier", 2 ** Y.size, self.caps.enumeration)
        out = []
        for mask in range(2 ** Y.size):
            if self.nonempty and mask == 0:
                continue
            out.append(frozenset(Y.values[i] for i in range(Y.size) if (mask >> i) & 1))
        return out

    def map_el(self, f, v):
        return frozenset(f.value_apply(x) for x in v)

    def unit_el(self, Y, y):
        return frozenset([y])

    def mult_el(self, Y, w):
        out = set()
        for member in w:
            out |= member
        return frozenset(out)

    def random_el(self, Z, rng):
        out = [v for v in Z.values if rng.getrandbits(1)]
        if self.nonempty and not out and Z.size:
            out = [Z.values[rng.randrange(Z.size)]]
        return frozenset(out)


class LazyDD:
    """A continuation-monad element too large to tabulate; call on a map tuple."""

    __slots__ = ("fn",)

    def __init__(self, fn: Callable):
        self.fn = fn

    def __call__(self, g_tuple: tuple) -> int:
        return self.fn(g_tuple)


def _digits(code: int, base: int, length: int) -> tuple:
    out = [0] * length
    for i in range(length - 1, -1, -1):
        out[i] = code % base
        code //= base
    return tuple(out)


def _code(digits: Sequence[int], base: int) -> int:
    out = 0
    for d in digits:
        out = out * base + d
    return out


class ContinuationMonad(SetMonad):
    """DD_d: Y ↦ d^{maps(Y,d)} with unit = evaluation and the standard μ.

    Elements of DD_d(Y) are tuples of length d^|Y| indexed by map codes, or
    LazyDD callables when that table would exceed the caps.
    """

    def __init__(self, d: int, caps: Caps = DEFAULT_CAPS):
        super().__init__(caps)
        if d < 2:
            raise StructuralError("continuation monad needs |d| >= 2")
        self.d = d
        self.name = f"dd{d}"
        self.default_sizes = (0, 1, 2, 3) if d == 2 else (0, 1, 2)
        self._ev_cache: dict = {}

    def table_len(self, Y: ESet) -> int:
        return self.d ** Y.size

    def _elements(self, Y):
        tlen = self.table_len(Y)
        guard(f"dd{self.d} element table", tlen, self.caps.table)
        guard(f"dd{self.d} carrier", self.d ** tlen, self.caps.enumeration)
        return list(itertools.product(range(self.d), repeat=tlen))

    def eval_el(self, u, g_tuple: tuple) -> int:
        if isinstance(u, LazyDD):
            return u(g_tuple)
        return u[_code(g_tuple, self.d)]

    def map_el(self, f: EMap, u):
        k, d = f.dom.size, self.d
        tlen = d ** f.cod.size
        if tlen > self.caps.table or isinstance(u, LazyDD):
            # stay lazy: consumers (mu, eval) only probe a few coordinates
            return LazyDD(lambda h: self.eval_el(u, tuple(h[f.table[i]] for i in range(k))))
        out = []
        for hcode in range(tlen):
            h = _digits(hcode, d, f.cod.size)
            out.append(self.eval_el(u, tuple(h[f.table[i]] for i in range(k))))
        return tuple(out)

    def unit_el(self, Y: ESet, y):
        i = Y.index[y]
        tlen = self.table_len(Y)
        if tlen > self.caps.table:
            return LazyDD(lambda g: g[i])
        place = self.d ** (Y.size - 1 - i)
        return tuple((gcode // place) % self.d for gcode in range(tlen))

    def mult_el(self, Y: ESet, w):
        MY = self.carrier(Y)
        return self.mult_sub(Y, MY.values, w)

    def mult_sub(self, Y: ESet, subvalues: Sequence, w):
        # ev_g tables depend only on (Y, subvalues); caching them makes a law
        # sweep over M(Y) linear instead of quadratic in |M(Y)|
        key = (Y.values, id(subvalues))
        evs = self._ev_cache.get(key)
        if evs is None:
            d = self.d
            evs = []
            for gcode in range(self.table_len(Y)):
                g = _digits(gcode, d, Y.size)
                evs.append(tuple(self.eval_el(u, g) for u in subvalues))
            self._ev_cache[key] = (subvalues, evs)
        else:
            evs = evs[1]
        return tuple(self.eval_el(w, ev) for ev in evs)

    def random_el(self, Z: ESet, rng):
        tlen = self.table_len(Z)
        if tlen <= self.caps.table:
            return tuple(rng.randrange(self.d) for _ in range(tlen))
        seed = rng.getrandbits(32)
        d = self.d

        def fn(g_tuple: tuple) -> int:
            # digit values are < 256, so bytes() is a fast stable encoding
            return zlib.crc32(bytes(g_tuple), seed) % d

        return LazyDD(fn)

    # A direct comparison of M(η)(v) and η_{M}(v) needs a table over maps
    # M(Y) -> d.  When that is too large, membership is decided exactly by
    # principality: for any G: M(Y) -> d, (ηM v)(G) = G(v) while (Mη v)(G)
    # depends only on G restricted to the unit image, so taking G's that
    # agree on the unit image but differ at v rules out every v outside the
    # image, and unit elements satisfy the equation identically.
    _DIRECT_TABLE = 2 ** 12

    def equalizes(self, Y: ESet, v) -> bool:
        MY = self.carrier(Y)
        if self.d ** MY.size <= min(self.caps.table, self._DIRECT_TABLE):
            return super().equalizes(Y, v)
        return self.is_principal(Y, v)

    def is_principal(self, Y: ESet, v) -> bool:
        return any(v == self.unit_el(Y, y) for y in Y.values)

    def m2_coords(self, Y: ESet, v, G_tuple: tuple) -> tuple[int, int]:
        """(M(η)(v), η_M(v)) evaluated at one coordinate G: M(Y) -> d."""
        MY = self.carrier(Y)
        m_eta = self.eval_el(v, tuple(G_tuple[MY.index[self.unit_el(Y, y)]] for y in Y.values))
        eta_m = G_tuple[MY.index[v]]
        return m_eta, eta_m

    def terminal_members(self, Y: ESet) -> list:
        try:
            return super().terminal_members(Y)
        except EnumerationTooLarge:
            # carrier not enumerable; the members are the unit image, which is
            # only materializable while single tables still fit
            guard(f"dd{self.d} member table", self.table_len(Y), self.caps.table)
            out = []
            for y in Y.values:
                u = self.unit_el(Y, y)
                if u not in out:
                    out.append(u)
            return out

    def image_preserved(self, Y: ESet) -> bool:
        try:
            return super().image_preserved(Y)
        except EnumerationTooLarge:
            pass
        # lazy regime: distinct points are separated by indicator maps, and
        # nothing outside the unit image equalizes (principality rule)
        units = [self.unit_el(Y, y) for y in Y.values]
        for i, y in enumerate(Y.values):
            g = tuple(1 if v == y else 0 for v in Y.values)
            for j in range(i + 1, Y.size):
                if self.eval_el(units[i], g) == self.eval_el(units[j], g):
                    return False
        return True


class CorruptedMult(SetMonad):
    """Negative-control wrapper: breaks μ on one chosen input."""

    def __init__(self, inner: SetMonad, size: int = 1):
        super().__init__(inner.caps)
        self.inner = inner
        self.size = size
        self.name = f"corrupted({inner.name})"
        self.default_sizes = inner.default_sizes

    def _elements(self, Y):
        return list(self.inner.carrier(Y).values)

    def map_el(self, f, v):
        return self.inner.map_el(f, v)

    def unit_el(self, Y, y):
        return self.inner.unit_el(Y, y)

    def mult_el(self, Y, w):
        good = self.inner.mult_el(Y, w)
        if Y.size == self.size:
            MY = self.carrier(Y)
            return MY.values[(MY.index[good] + 1) % MY.size]
        return good

    def mult_sub(self, Y, subvalues, w):
        return self.inner.mult_sub(Y, subvalues, w)


class TabulatedMonad(SetMonad):
    """A monad given by explicit tables on its universe sizes.

    The descriptor must provide, per size n: the carrier size, the unit
    table, the two canonical maps into M² (unit_at_M and M_unit) and the
    mult table; plus arrow tables keyed by universe map tables.  Enough for
    law checks and the first equalizer level.
    """

    name = "tabulated"

    def __init__(self, data: dict, caps: Caps = DEFAULT_CAPS):
        super().__init__(caps)
        self.data = data
        self.name = data.get("name", "tabulated")
        self.default_sizes = tuple(int(n) for n in data["sizes"])
        self.obj_sizes = {int(k): int(v) for k, v in data["obj"].items()}
        self.units = {int(k): tuple(v) for k, v in data["unit"].items()}
        self.mults = {int(k): tuple(v) for k, v in data["mult"].items()}
        self.unit_at_m = {int(k): tuple(v) for k, v in data["unit_at_M"].items()}
        self.m_unit = {int(k): tuple(v) for k, v in data["M_unit"].items()}
        self.arrs = {(int(n), int(m), tuple(t)): tuple(out) for n, m, t, out in data["arr"]}

    def _n_of(self, Y: ESet) -> int:
        if Y.values != tuple(range(Y.size)):
            raise EnumerationTooLarge("tabulated monad beyond its universe", Y.size, 0)
        return Y.size

    def _elements(self, Y):
        return [("m", self._n_of(Y), i) for i in range(self.obj_sizes[self._n_of(Y)])]

    def map_el(self, f, v):
        key = (f.dom.size, f.cod.size, f.table)
        if key not in self.arrs:
            raise EnumerationTooLarge("tabulated arrow missing", key, 0)
        return ("m", f.cod.size, self.arrs[key][v[2]])

    def unit_el(self, Y, y):
        if isinstance(y, tuple) and y and y[0] == "m":
            # unit at a carrier object: the provided η_{M(n)} table
            return ("m2", y[1], self.unit_at_m[y[1]][y[2]])
        n = self._n_of(Y)
        return ("m", n, self.units[n][Y.index[y]])

    def unit_emap(self, Y: ESet) -> EMap:
        MY = self.carrier(Y)
        n = self._n_of(Y)
        return EMap(Y, MY, tuple(self.units[n]))

    def equalizes(self, Y, v) -> bool:
        n = v[1]
        return self.m_unit[n][v[2]] == self.unit_at_m[n][v[2]]

    def mult_el(self, Y, w):
        n = self._n_of(Y)
        return ("m", n, self.mults[n][w[2]])


def tabulate_monad(M: SetMonad, sizes: Sequence[int]) -> dict:
    """Export a builtin to the tabulated JSON descriptor (small sizes only)."""
    out = {"name": f"tabulated({M.name})", "sizes": list(sizes), "obj": {}, "unit": {},
           "mult": {}, "unit_at_M": {}, "M_unit": {}, "arr": []}
    for n in sizes:
        Y = eset_of_size(n)
        MY = M.carrier(Y)
        M2Y = M.carrier(MY)
        out["obj"][str(n)] = MY.size
        out["unit"][str(n)] = [MY.index[M.unit_el(Y, y)] for y in Y.values]
        out["unit_at_M"][str(n)] = [M2Y.index[M.unit_el(MY, v)] for v in MY.values]
        eta = M.unit_emap(Y)
        out["M_unit"][str(n)] = [M2Y.index[M.map_el(eta, v)] for v in MY.values]
        out["mult"][str(n)] = [MY.index[M.mult_el(Y, w)] for w in M2Y.values]
        # the unit arrow X -> M(X) itself, so M(eta) is applicable from tables
        out["arr"].append([n, MY.size, list(eta.table), out["M_unit"][str(n)]])
    for n in sizes:
        for m in sizes:
            Y, Z = eset_of_size(n), eset_of_size(m)
            MY, MZ = M.carrier(Y), M.carrier(Z)
            for table in itertools.product(range(m), repeat=n):
                f = EMap(Y, Z, table)
                out["arr"].append([n, m, list(table),
                                   [MZ.index[M.map_el(f, v)] for v in MY.values]])
    return out


def build_monad(name: str, params: Optional[dict] = None, caps: Caps = DEFAULT_CAPS) -> SetMonad:
    params = params or {}
    key = name.lower()
    if key in ("identity", "id"):
        return IdentityMonad(caps)
    if key == "maybe":
        return MaybeMonad(caps)
    if key == "writer":
        gname = params.get("group", "c2")
        group = NAMED_GROUPS[gname]() if isinstance(gname, str) else GroupObject(gname)
        return WriterMonad(group, caps)
    if key == "powerset":
        return PowersetMonad(False, caps)
    if key in ("powerset1", "nonempty-powerset"):
        return PowersetMonad(True, caps)
    if key in ("dd2", "dd3"):
        return ContinuationMonad(int(key[2]), caps)
    if key in ("const1", "constant-1"):
        return ConstOneMonad(caps)
    raise StructuralError(f"unknown monad spec {name!r}")


BUILTIN_NAMES = ["identity", "maybe", "writer", "powerset", "powerset1", "dd2", "dd3", "const1"]
