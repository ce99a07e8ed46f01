"""Canonical finite sets, total maps, indexed products and finite limits.

Elements of a finite set are always the integers 0..size-1; optional labels
are cosmetic.  Every solution set produced here is emitted in lexicographic
order of its tuples, so downstream computations are deterministic and
diffable.  The limit solver is a backtracking search with arc-consistency
propagation over functional constraints: comma-category instances have huge
naive products (e.g. 3^27) but tiny solution sets.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from .caps import Caps, DEFAULT_CAPS, EnumerationTooLarge, StructuralError, guard


@dataclass(frozen=True)
class FinSet:
    """A finite set with elements 0..size-1."""

    size: int
    labels: Optional[tuple] = None

    def __post_init__(self):
        if self.size < 0:
            raise StructuralError("negative size")
        if self.labels is not None:
            labels = tuple(self.labels)
            object.__setattr__(self, "labels", labels)
            if len(labels) != self.size or len(set(labels)) != self.size:
                raise StructuralError("labels must be distinct and match size")

    def __iter__(self):
        return iter(range(self.size))

    def __len__(self):
        return self.size

    def label(self, x: int):
        return self.labels[x] if self.labels is not None else x

    def to_json(self) -> dict:
        out = {"size": self.size}
        if self.labels is not None:
            out["labels"] = list(self.labels)
        return out

    @staticmethod
    def from_json(data: dict) -> "FinSet":
        return FinSet(int(data["size"]), tuple(data["labels"]) if "labels" in data else None)


EMPTY = FinSet(0)
ONE = FinSet(1)


@dataclass(frozen=True)
class FinMap:
    """A total map between FinSets, tabulated on the domain."""

    dom: FinSet
    cod: FinSet
    table: tuple

    def __post_init__(self):
        table = tuple(self.table)
        object.__setattr__(self, "table", table)
        if len(table) != self.dom.size:
            raise StructuralError("table length must equal dom size")
        if any(not (0 <= v < self.cod.size) for v in table):
            raise StructuralError("table entry out of codomain range")

    def __call__(self, x: int) -> int:
        return self.table[x]

    def then(self, g: "FinMap") -> "FinMap":
        """Diagrammatic composition: (self.then(g))(x) = g(self(x))."""
        if g.dom.size != self.cod.size:
            raise StructuralError("non-composable maps")
        return FinMap(self.dom, g.cod, tuple(g.table[v] for v in self.table))

    def is_injective(self) -> bool:
        return len(set(self.table)) == self.dom.size

    def is_bijective(self) -> bool:
        return self.dom.size == self.cod.size and self.is_injective()

    def inverse(self) -> "FinMap":
        if not self.is_bijective():
            raise StructuralError("map is not bijective")
        inv = [0] * self.cod.size
        for x, y in enumerate(self.table):
            inv[y] = x
        return FinMap(self.cod, self.dom, tuple(inv))

    def to_json(self) -> dict:
        return {"dom": self.dom.to_json(), "cod": self.cod.to_json(), "table": list(self.table)}

    @staticmethod
    def from_json(data: dict) -> "FinMap":
        return FinMap(FinSet.from_json(data["dom"]), FinSet.from_json(data["cod"]),
                      tuple(int(v) for v in data["table"]))


def identity(a: FinSet) -> FinMap:
    return FinMap(a, a, tuple(range(a.size)))


def compose(g: FinMap, f: FinMap) -> FinMap:
    """Classical composition g∘f."""
    return f.then(g)


def constant(a: FinSet, b: FinSet, value: int) -> FinMap:
    return FinMap(a, b, (value,) * a.size)


def all_maps(a: FinSet, b: FinSet, caps: Caps = DEFAULT_CAPS) -> list[FinMap]:
    """All maps a -> b in lexicographic table order."""
    guard(f"maps {a.size}->{b.size}", b.size ** a.size if a.size else 1, caps.enumeration)
    return [FinMap(a, b, t) for t in itertools.product(range(b.size), repeat=a.size)]


class IndexedProduct:
    """Product of FinSets indexed by an arbitrary finite key sequence.

    Elements are realized as tuples; the carrier FinSet codes them in
    lexicographic (big-endian mixed radix) order, so integer order equals
    tuple order.
    """

    def __init__(self, index: Sequence, factors: Sequence[FinSet], caps: Caps = DEFAULT_CAPS):
        self.index = list(index)
        self.factors = list(factors)
        if len(self.index) != len(self.factors):
            raise StructuralError("index/factor length mismatch")
        size = 1
        for f in self.factors:
            size *= f.size
        guard("indexed product", size, caps.enumeration)
        self.size = size
        self.carrier = FinSet(size)
        self._pos = {k: i for i, k in enumerate(self.index)}
        # big-endian place values
        self._weights = [0] * len(self.factors)
        w = 1
        for i in range(len(self.factors) - 1, -1, -1):
            self._weights[i] = w
            w *= self.factors[i].size

    def tuple_of(self, code: int) -> tuple:
        out = []
        for i, f in enumerate(self.factors):
            out.append((code // self._weights[i]) % f.size if f.size else 0)
        return tuple(out)

    def code_of(self, values: Sequence[int]) -> int:
        if len(values) != len(self.factors):
            raise StructuralError("tuple arity mismatch")
        code = 0
        for i, v in enumerate(values):
            if not (0 <= v < self.factors[i].size):
                raise StructuralError("tuple entry out of range")
            code += v * self._weights[i]
        return code

    def projection(self, key) -> FinMap:
        i = self._pos[key]
        return FinMap(self.carrier, self.factors[i],
                      tuple(self.tuple_of(c)[i] for c in range(self.size)))

    def reindex(self, other: "IndexedProduct", key_map: Callable) -> FinMap:
        """Contravariant action: for key_map: self.index -> other.index,
        returns the map other.carrier -> self.carrier picking component
        key_map(k) at position k."""
        positions = [other._pos[key_map(k)] for k in self.index]
        table = []
        for code in range(other.size):
            t = other.tuple_of(code)
            table.append(self.code_of([t[p] for p in positions]))
        return FinMap(other.carrier, self.carrier, tuple(table))


def power(c: FinSet, index: Sequence, caps: Caps = DEFAULT_CAPS) -> IndexedProduct:
    """c^S: the product of copies of c indexed by S."""
    return IndexedProduct(list(index), [c] * len(list(index)), caps)


def equalizer(f: FinMap, g: FinMap) -> tuple[FinSet, FinMap]:
    """The subset {x | f(x)=g(x)} with its inclusion, in canonical order."""
    if f.dom != g.dom or f.cod != g.cod:
        raise StructuralError("equalizer requires parallel maps")
    members = tuple(x for x in range(f.dom.size) if f.table[x] == g.table[x])
    e = FinSet(len(members))
    return e, FinMap(e, f.dom, members)


@dataclass
class Diagram:
    """A finite diagram of FinSets: nodes plus functional arrows."""

    nodes: list[FinSet] = field(default_factory=list)
    arrows: list[tuple[int, int, FinMap]] = field(default_factory=list)

    def add_node(self, a: FinSet) -> int:
        self.nodes.append(a)
        return len(self.nodes) - 1

    def add_arrow(self, src: int, tgt: int, m: FinMap) -> None:
        if m.dom.size != self.nodes[src].size or m.cod.size != self.nodes[tgt].size:
            raise StructuralError("arrow map does not match node sets")
        self.arrows.append((src, tgt, m))


@dataclass
class LimitResult:
    carrier: FinSet
    tuples: list[tuple]
    diagram: Diagram

    def projection(self, node: int) -> FinMap:
        return FinMap(self.carrier, self.diagram.nodes[node],
                      tuple(t[node] for t in self.tuples))

    def index_of(self, t: tuple) -> int:
        return self._index[t]

    def __post_init__(self):
        self._index = {t: i for i, t in enumerate(self.tuples)}


def _revise(domains: list[set], arrows_by_src, arrows_by_tgt, queue: list) -> bool:
    """Arc-consistency over functional constraints; False on a wipeout."""
    while queue:
        a = queue.pop()
        src, tgt, m = a
        dsrc, dtgt = domains[src], domains[tgt]
        # forward: values of tgt must be hit from src
        image = {m.table[x] for x in dsrc}
        new_tgt = dtgt & image
        if new_tgt != dtgt:
            if not new_tgt:
                return False
            domains[tgt] = new_tgt
            for b in arrows_by_src[tgt]:
                queue.append(b)
            for b in arrows_by_tgt[tgt]:
                queue.append(b)
            dtgt = new_tgt
        # backward: src values must map into tgt domain
        new_src = {x for x in dsrc if m.table[x] in dtgt}
        if new_src != dsrc:
            if not new_src:
                return False
            domains[src] = new_src
            for b in arrows_by_src[src]:
                queue.append(b)
            for b in arrows_by_tgt[src]:
                queue.append(b)
    return True


def limit(diagram: Diagram, caps: Caps = DEFAULT_CAPS) -> LimitResult:
    """All node-indexed tuples compatible with every arrow.

    Backtracking with most-constrained-variable ordering and AC-3 style
    propagation; solutions are sorted lexicographically at the end.
    """
    n = len(diagram.nodes)
    if n == 0:
        return LimitResult(FinSet(1), [()], diagram)
    domains: list[set] = [set(range(node.size)) for node in diagram.nodes]
    arrows_by_src = [[] for _ in range(n)]
    arrows_by_tgt = [[] for _ in range(n)]
    for arr in diagram.arrows:
        arrows_by_src[arr[0]].append(arr)
        arrows_by_tgt[arr[1]].append(arr)

    if not _revise(domains, arrows_by_src, arrows_by_tgt, list(diagram.arrows)):
        return LimitResult(FinSet(0), [], diagram)

    solutions: list[tuple] = []

    def search(domains: list[set], unassigned: set):
        if not unassigned:
            solutions.append(tuple(next(iter(domains[i])) for i in range(n)))
            if len(solutions) > caps.solutions:
                raise EnumerationTooLarge("limit solutions", len(solutions), caps.solutions)
            return
        var = min(unassigned, key=lambda i: (len(domains[i]), i))
        rest = unassigned - {var}
        for val in sorted(domains[var]):
            trial = [set(d) for d in domains]
            trial[var] = {val}
            queue = list(arrows_by_src[var]) + list(arrows_by_tgt[var])
            if _revise(trial, arrows_by_src, arrows_by_tgt, queue):
                # propagation may have singled out other nodes
                still = {i for i in rest if len(trial[i]) > 1}
                search(trial, still)

    search(domains, set(range(n)))
    solutions.sort()
    return LimitResult(FinSet(len(solutions)), solutions, diagram)


def limit_bruteforce(diagram: Diagram, caps: Caps = DEFAULT_CAPS) -> list[tuple]:
    """Oracle: filter the full product. Only usable when the product is small."""
    size = 1
    for node in diagram.nodes:
        size *= node.size
    guard("brute-force limit product", size, caps.enumeration)
    out = []
    for t in itertools.product(*(range(node.size) for node in diagram.nodes)):
        if all(m.table[t[s]] == t[d] for s, d, m in diagram.arrows):
            out.append(t)
    return out


def parallel_pair_diagram(f: FinMap, g: FinMap) -> Diagram:
    d = Diagram()
    a = d.add_node(f.dom)
    b = d.add_node(f.cod)
    d.add_arrow(a, b, f)
    d.add_arrow(a, b, g)
    return d


def find_retraction(a: FinSet, b: FinSet, section: FinMap) -> Optional[FinMap]:
    """Some r: b -> a with r∘section = id, or None when section is not injective."""
    if section.dom != a or section.cod != b:
        raise StructuralError("section must be a map a -> b")
    if not section.is_injective():
        return None
    if a.size == 0:
        return FinMap(b, a, ()) if b.size == 0 else None
    table = [0] * b.size
    for x in range(a.size):
        table[section.table[x]] = x
    return FinMap(b, a, tuple(table))
