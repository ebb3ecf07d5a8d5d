# ================================================
# File: netsym/network/monoid.py
# ================================================
import itertools
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from ..config import MONOID_ENUMERATION_BOUND
from ..errors import BoundExceeded, InvalidNetwork
from ..utils.helpers import log, validate_network_dict


@dataclass(frozen=True)
class CellMap:
    """A total map on cells, stored 0-indexed: image[i] = sigma(i)."""

    image: Tuple[int, ...]

    def __post_init__(self):
        n = len(self.image)
        if n == 0 or any(not 0 <= v < n for v in self.image):
            raise InvalidNetwork("Cell map entries must lie in 1..N.", {"map": [v + 1 for v in self.image]})

    @classmethod
    def from_external(cls, image: Sequence[int]) -> "CellMap":
        return cls(tuple(int(v) - 1 for v in image))

    @classmethod
    def identity(cls, num_cells: int) -> "CellMap":
        return cls(tuple(range(num_cells)))

    def to_external(self) -> List[int]:
        return [v + 1 for v in self.image]

    def __call__(self, i: int) -> int:
        return self.image[i]

    def __len__(self) -> int:
        return len(self.image)

    def compose(self, other: "CellMap") -> "CellMap":
        """self after other: i -> self(other(i))."""
        return CellMap(tuple(self.image[v] for v in other.image))

    def is_identity(self) -> bool:
        return all(v == i for i, v in enumerate(self.image))

    def __str__(self) -> str:
        if len(self.image) < 10:
            return "[" + "".join(str(v + 1) for v in self.image) + "]"
        return str(self.to_external())


@dataclass(frozen=True)
class NetworkSpec:
    num_cells: int
    maps: Tuple[CellMap, ...]

    def __post_init__(self):
        if not self.maps:
            raise InvalidNetwork("A network needs at least one input map.")
        for m in self.maps:
            if len(m) != self.num_cells:
                raise InvalidNetwork(f"Map {m} does not act on {self.num_cells} cells.")
        if len(set(self.maps)) != len(self.maps):
            raise InvalidNetwork("Input maps must be pairwise distinct.")

    @classmethod
    def from_external(cls, num_cells: int, maps: Sequence[Sequence[int]]) -> "NetworkSpec":
        data = validate_network_dict({"cells": num_cells, "maps": [list(m) for m in maps]})
        return cls(data["cells"], tuple(CellMap.from_external(m) for m in data["maps"]))

    @classmethod
    def from_dict(cls, data: Dict) -> "NetworkSpec":
        data = validate_network_dict(data)
        return cls(data["cells"], tuple(CellMap.from_external(m) for m in data["maps"]))

    def to_dict(self) -> Dict:
        return {"cells": self.num_cells, "maps": [m.to_external() for m in self.maps]}

    @property
    def size(self) -> int:
        return len(self.maps)

    def index_of(self, cell_map: CellMap) -> Optional[int]:
        try:
            return self.maps.index(cell_map)
        except ValueError:
            return None

    def identity_index(self) -> Optional[int]:
        return self.index_of(CellMap.identity(self.num_cells))


@dataclass(frozen=True)
class MonoidTable:
    """table[j][k] = index of sigma_j o sigma_k (0-indexed)."""

    size: int
    table: Tuple[Tuple[int, ...], ...]
    unit_index: Optional[int] = None

    def __post_init__(self):
        if self.size < 1 or len(self.table) != self.size:
            raise InvalidNetwork("Composition table must be a nonempty square array.")
        for row in self.table:
            if len(row) != self.size or any(not 0 <= v < self.size for v in row):
                raise InvalidNetwork("Composition table entries must index its elements.", {"row": list(row)})
        if self.unit_index is not None and not self._is_unit(self.unit_index):
            raise InvalidNetwork(f"Element {self.unit_index + 1} is not a unit of the table.")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], one_indexed: bool = True) -> "MonoidTable":
        offset = 1 if one_indexed else 0
        table = tuple(tuple(int(v) - offset for v in row) for row in rows)
        draft = cls(len(table), table)
        return cls(len(table), table, draft.find_unit())

    def _is_unit(self, e: int) -> bool:
        return all(self.table[e][k] == k and self.table[k][e] == k for k in range(self.size))

    def find_unit(self) -> Optional[int]:
        return next((e for e in range(self.size) if self._is_unit(e)), None)

    def product(self, j: int, k: int) -> int:
        return self.table[j][k]

    def is_associative(self) -> bool:
        t = self.table
        rn = range(self.size)
        return all(t[t[a][b]][c] == t[a][t[b][c]] for a in rn for b in rn for c in rn)

    def relabel(self, perm: Sequence[int]) -> "MonoidTable":
        """Table of the same monoid with element a renamed perm[a]."""
        n = self.size
        new = [[0] * n for _ in range(n)]
        for a in range(n):
            for b in range(n):
                new[perm[a]][perm[b]] = perm[self.table[a][b]]
        unit = perm[self.unit_index] if self.unit_index is not None else None
        return MonoidTable(n, tuple(tuple(r) for r in new), unit)

    def flattened(self) -> Tuple[int, ...]:
        return tuple(v for row in self.table for v in row)

    def rows_external(self) -> List[List[int]]:
        return [[v + 1 for v in row] for row in self.table]

    def to_dict(self) -> Dict:
        return {
            "size": self.size,
            "unit": self.unit_index + 1 if self.unit_index is not None else None,
            "table": self.rows_external(),
        }


# --- Closure ---

def composition_table(spec: NetworkSpec) -> MonoidTable:
    """Composition table of a closed collection of maps."""
    index = {m: i for i, m in enumerate(spec.maps)}
    rows = []
    for a in spec.maps:
        row = []
        for b in spec.maps:
            prod = a.compose(b)
            if prod not in index:
                raise InvalidNetwork(f"Maps are not closed under composition: {a} o {b} = {prod} is missing.")
            row.append(index[prod])
        rows.append(tuple(row))
    draft = MonoidTable(spec.size, tuple(rows))
    return MonoidTable(spec.size, draft.table, draft.find_unit())

def semigroup_closure(spec: NetworkSpec) -> Tuple[NetworkSpec, MonoidTable]:
    """
    Smallest semigroup containing the input maps. Original maps keep their
    order; new products are appended breadth-first in order of discovery.
    """
    elements: List[CellMap] = list(spec.maps)
    index: Dict[CellMap, int] = {m: i for i, m in enumerate(elements)}

    k = 0
    while k < len(elements):
        for j in range(k + 1):
            for prod in (elements[k].compose(elements[j]), elements[j].compose(elements[k])):
                if prod not in index:
                    index[prod] = len(elements)
                    elements.append(prod)
        k += 1

    if len(elements) > spec.size:
        log("Closure", f"Added {len(elements) - spec.size} generated maps to {spec.size} input maps.")
    closed = NetworkSpec(spec.num_cells, tuple(elements)) if len(elements) > spec.size else spec
    return closed, composition_table(closed)

def monoid_completion(spec: NetworkSpec) -> NetworkSpec:
    """Adjoins the identity map when it is absent, then closes."""
    identity = CellMap.identity(spec.num_cells)
    if identity not in spec.maps:
        log("Closure", "Identity map absent, adjoining it as the unit.")
        spec = NetworkSpec(spec.num_cells, (identity,) + spec.maps)
    closed, _ = semigroup_closure(spec)
    return closed

def is_closed(spec: NetworkSpec) -> bool:
    elements = set(spec.maps)
    return all(a.compose(b) in elements for a in spec.maps for b in spec.maps)


# --- Isomorphism ---

def _unit_fixing_permutations(n: int, unit: int) -> Iterator[Tuple[int, ...]]:
    """Bijections sending `unit` to 0."""
    others = [a for a in range(n) if a != unit]
    for targets in itertools.permutations(range(1, n)):
        perm = [0] * n
        perm[unit] = 0
        for a, t in zip(others, targets):
            perm[a] = t
        yield tuple(perm)

def canonical_form(table: MonoidTable) -> MonoidTable:
    """Lexicographically least flattened table over relabelings putting the unit first."""
    unit = table.find_unit()
    base = MonoidTable(table.size, table.table, unit)
    if unit is None:
        candidates = itertools.permutations(range(table.size))
    else:
        candidates = _unit_fixing_permutations(table.size, unit)
    best = None
    for perm in candidates:
        relabeled = base.relabel(perm)
        if best is None or relabeled.flattened() < best.flattened():
            best = relabeled
    return best

def monoid_isomorphic(a: MonoidTable, b: MonoidTable) -> Tuple[bool, Optional[List[int]]]:
    """
    Decides isomorphism by search over relabelings.
    The witness w maps element i of `a` to element w[i] of `b`.
    """
    if a.size != b.size:
        return False, None
    unit_a, unit_b = a.find_unit(), b.find_unit()
    if (unit_a is None) != (unit_b is None):
        return False, None

    n = a.size
    for perm in itertools.permutations(range(n)):
        if unit_a is not None and perm[unit_a] != unit_b:
            continue
        if all(perm[a.table[x][y]] == b.table[perm[x]][perm[y]] for x in range(n) for y in range(n)):
            return True, list(perm)
    return False, None


# --- Enumeration ---

def _consistent(t: List[List[int]], n: int, a: int, b: int) -> bool:
    """Checks every associativity triple touching the newly set cell (a, b)."""
    v = t[a][b]
    for x in range(n):
        # (a b) x = a (b x)
        bx = t[b][x]
        if bx >= 0:
            left, right = t[v][x], t[a][bx]
            if left >= 0 and right >= 0 and left != right:
                return False
        # (x a) b = x (a b)
        xa = t[x][a]
        if xa >= 0:
            left, right = t[xa][b], t[x][v]
            if left >= 0 and right >= 0 and left != right:
                return False
        for y in range(n):
            # (x y) b with x y = a
            if t[x][y] == a:
                yb = t[y][b]
                if yb >= 0 and t[x][yb] >= 0 and t[x][yb] != v:
                    return False
            # a (x y) with x y = b
            if t[x][y] == b:
                ax = t[a][x]
                if ax >= 0 and t[ax][y] >= 0 and t[ax][y] != v:
                    return False
    return True

def _labeled_monoids(n: int) -> Iterator[Tuple[Tuple[int, ...], ...]]:
    """All associative tables on 0..n-1 with unit 0."""
    t = [[-1] * n for _ in range(n)]
    for k in range(n):
        t[0][k] = k
        t[k][0] = k
    cells = [(a, b) for a in range(1, n) for b in range(1, n)]

    def extend(pos: int) -> Iterator[Tuple[Tuple[int, ...], ...]]:
        if pos == len(cells):
            yield tuple(tuple(row) for row in t)
            return
        a, b = cells[pos]
        for v in range(n):
            t[a][b] = v
            if _consistent(t, n, a, b):
                yield from extend(pos + 1)
        t[a][b] = -1

    yield from extend(0)

def enumerate_monoids(n: int, bound: int = MONOID_ENUMERATION_BOUND) -> List[MonoidTable]:
    """
    All monoids with n elements up to isomorphism, as canonical tables
    (unit at index 0), sorted by flattened table.
    """
    if n < 1:
        raise BoundExceeded(f"Monoid size must be positive, got {n}.")
    if n > bound:
        raise BoundExceeded(f"Monoid enumeration is bounded by {bound} elements; got {n}.",
                            {"n": n, "bound": bound})

    seen: Dict[Tuple[int, ...], MonoidTable] = {}
    labeled = 0
    for rows in _labeled_monoids(n):
        labeled += 1
        canon = canonical_form(MonoidTable(n, rows, 0))
        seen.setdefault(canon.flattened(), canon)

    log("Enumerate", f"n={n}: {labeled} labeled tables, {len(seen)} isomorphism classes.")
    return [seen[key] for key in sorted(seen)]
