# ================================================
# File: netsym/synchrony/balanced.py
# ================================================
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

import numpy as np
import sympy

from ..config import BALANCED_PARTITION_BOUND
from ..errors import BoundExceeded, InvalidNetwork
from ..network.monoid import NetworkSpec, semigroup_closure
from ..utils.helpers import log


@dataclass(frozen=True)
class Partition:
    """Cell partition, 0-indexed, blocks sorted by their least element."""

    blocks: Tuple[FrozenSet[int], ...]

    def __post_init__(self):
        ordered = tuple(sorted((frozenset(b) for b in self.blocks), key=min))
        object.__setattr__(self, "blocks", ordered)
        cells = [c for b in ordered for c in b]
        if any(not b for b in ordered) or sorted(cells) != list(range(len(cells))):
            raise InvalidNetwork("Partition blocks must be disjoint, nonempty and cover the cells.")

    @classmethod
    def from_labels(cls, labels: Sequence[int]) -> "Partition":
        groups: Dict[int, set] = {}
        for cell, label in enumerate(labels):
            groups.setdefault(label, set()).add(cell)
        return cls(tuple(frozenset(g) for g in groups.values()))

    @classmethod
    def from_external(cls, blocks: Sequence[Sequence[int]]) -> "Partition":
        return cls(tuple(frozenset(c - 1 for c in b) for b in blocks))

    @classmethod
    def singletons(cls, num_cells: int) -> "Partition":
        return cls(tuple(frozenset([c]) for c in range(num_cells)))

    @property
    def num_cells(self) -> int:
        return sum(len(b) for b in self.blocks)

    @property
    def num_blocks(self) -> int:
        return len(self.blocks)

    def labels(self) -> List[int]:
        out = [0] * self.num_cells
        for k, block in enumerate(self.blocks):
            for c in block:
                out[c] = k
        return out

    def rgs(self) -> Tuple[int, ...]:
        """Restricted-growth string; blocks are already numbered by least element."""
        return tuple(self.labels())

    def same_block(self, a: int, b: int) -> bool:
        labels = self.labels()
        return labels[a] == labels[b]

    def to_external(self) -> List[List[int]]:
        return [sorted(c + 1 for c in b) for b in self.blocks]

    def __str__(self) -> str:
        return "∪".join("{" + ",".join(str(c) for c in b) + "}" for b in self.to_external())


@dataclass(frozen=True)
class SynchronySpace:
    """Polydiagonal Syn_P in V^N; basis columns are block indicators tensored with R^d."""

    partition: Partition
    dim_v: int = 1
    expressions: Tuple[str, ...] = ()
    basis: sympy.ImmutableMatrix = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        N, d = self.partition.num_cells, self.dim_v
        B = sympy.zeros(N * d, self.partition.num_blocks * d)
        for k, block in enumerate(self.partition.blocks):
            for c in block:
                for comp in range(d):
                    B[c * d + comp, k * d + comp] = 1
        object.__setattr__(self, "basis", sympy.ImmutableMatrix(B))

    @property
    def expression(self) -> Optional[str]:
        return self.expressions[0] if self.expressions else None

    @property
    def dimension(self) -> int:
        return self.partition.num_blocks * self.dim_v

    def contains(self, x: Sequence[float], tol: float = 0.0) -> bool:
        x = np.asarray(x, dtype=float).reshape(self.partition.num_cells, self.dim_v)
        for block in self.partition.blocks:
            cells = sorted(block)
            if np.max(np.abs(x[cells] - x[cells[0]])) > tol:
                return False
        return True

    def distance(self, x: Sequence[float]) -> float:
        x = np.asarray(x, dtype=float).reshape(self.partition.num_cells, self.dim_v)
        worst = 0.0
        for block in self.partition.blocks:
            cells = sorted(block)
            worst = max(worst, float(np.max(np.abs(x[cells] - x[cells].mean(axis=0)))))
        return worst

    def equations(self, var: str = "X") -> str:
        """'{X1=X2}' style description; the full space is '{}'."""
        parts = ["=".join(f"{var}{c}" for c in b) for b in self.partition.to_external() if len(b) > 1]
        return "{" + ", ".join(parts) + "}"


def is_balanced(spec: NetworkSpec, p: Partition) -> bool:
    """Every input map sends cells of a common block into a common block."""
    if p.num_cells != spec.num_cells:
        raise InvalidNetwork(f"Partition covers {p.num_cells} cells, network has {spec.num_cells}.")
    labels = p.labels()
    for sigma in spec.maps:
        for block in p.blocks:
            targets = {labels[sigma(c)] for c in block}
            if len(targets) > 1:
                return False
    return True

def restricted_growth_strings(n: int) -> Iterator[Tuple[int, ...]]:
    """All set partitions of n elements, in lexicographic RGS order."""
    rgs = [0] * n

    def extend(pos: int, max_label: int) -> Iterator[Tuple[int, ...]]:
        if pos == n:
            yield tuple(rgs)
            return
        for label in range(max_label + 2):
            rgs[pos] = label
            yield from extend(pos + 1, max(max_label, label))

    if n == 0:
        return
    yield from extend(1, 0)

def all_partitions(n: int) -> List[Partition]:
    return [Partition.from_labels(r) for r in restricted_growth_strings(n)]

def enumerate_balanced(spec: NetworkSpec, bound: int = BALANCED_PARTITION_BOUND) -> List[Partition]:
    """Balanced partitions ordered by block count, then by restricted-growth string."""
    if spec.num_cells > bound:
        raise BoundExceeded(f"Balanced partition enumeration is bounded by {bound} cells; got {spec.num_cells}.",
                            {"cells": spec.num_cells, "bound": bound})
    found = [p for p in all_partitions(spec.num_cells) if is_balanced(spec, p)]
    found.sort(key=lambda p: (p.num_blocks, p.rgs()))
    log("Synchrony", f"{len(found)} balanced partitions on {spec.num_cells} cells.")
    return found

def closure_preserves_synchrony(spec: NetworkSpec) -> bool:
    closed, _ = semigroup_closure(spec)
    return enumerate_balanced(spec) == enumerate_balanced(closed)
