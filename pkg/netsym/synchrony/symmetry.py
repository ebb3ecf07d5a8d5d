# ================================================
# File: netsym/synchrony/symmetry.py
# ================================================
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import sympy

from ..config import SYNCHRONY_SPACE_CAP
from ..network.fundamental import FundamentalNetwork, Representation
from ..utils.helpers import log, warn
from .balanced import Partition, SynchronySpace, enumerate_balanced, is_balanced

MAX_EXPRESSIONS = 4


@dataclass(frozen=True)
class _Subspace:
    """Subspace of W stored as the reduced row echelon form of its constraints C x = 0."""

    constraints: sympy.ImmutableMatrix
    ambient: int

    @classmethod
    def from_constraints(cls, C: sympy.Matrix, ambient: int) -> "_Subspace":
        if C.rows == 0:
            return cls(sympy.ImmutableMatrix(sympy.zeros(0, ambient)), ambient)
        R, pivots = C.rref()
        return cls(sympy.ImmutableMatrix(R[:len(pivots), :]), ambient)

    @classmethod
    def from_basis(cls, B: sympy.Matrix, ambient: int) -> "_Subspace":
        if B.cols == 0:
            return cls.from_constraints(sympy.eye(ambient), ambient)
        annihilator = (B.T).nullspace()
        if not annihilator:
            return cls.from_constraints(sympy.zeros(0, ambient), ambient)
        return cls.from_constraints(sympy.Matrix.hstack(*annihilator).T, ambient)

    def key(self) -> Tuple:
        return tuple(self.constraints)

    def intersect(self, other: "_Subspace") -> "_Subspace":
        return _Subspace.from_constraints(sympy.Matrix.vstack(self.constraints, other.constraints), self.ambient)

    def preimage(self, A: sympy.Matrix) -> "_Subspace":
        return _Subspace.from_constraints(sympy.Matrix(self.constraints) * A, self.ambient)

    def basis(self) -> sympy.Matrix:
        if self.constraints.rows == 0:
            return sympy.eye(self.ambient)
        null = sympy.Matrix(self.constraints).nullspace()
        return sympy.Matrix.hstack(*null) if null else sympy.zeros(self.ambient, 0)


def polydiagonal_partition(basis: sympy.Matrix, num_cells: int, d: int) -> Optional[Partition]:
    """Partition P with span(basis) = Syn_P, or None when the span is not a polydiagonal."""
    if basis.cols == 0:
        return None
    blocks = [tuple(basis[c * d:(c + 1) * d, :]) for c in range(num_cells)]
    labels: Dict[Tuple, int] = {}
    cell_labels = [labels.setdefault(b, len(labels)) for b in blocks]
    p = Partition.from_labels(cell_labels)
    if p.num_blocks * d != basis.rank():
        return None
    return p

def _fixed_space(M: sympy.Matrix, ambient: int) -> _Subspace:
    null = (M - sympy.eye(ambient)).nullspace()
    B = sympy.Matrix.hstack(*null) if null else sympy.zeros(ambient, 0)
    return _Subspace.from_basis(B, ambient)

def synchrony_from_symmetry(rep: Representation, fund: FundamentalNetwork,
                            cap: int = SYNCHRONY_SPACE_CAP) -> List[SynchronySpace]:
    """
    Closes {Fix A_j, im A_j} under intersections and preimages A_j^{-1}(.)
    and returns the polydiagonals reached. Each space keeps the expressions
    that produced it, earliest first. Ordered like enumerate_balanced.
    """
    W = rep.ambient_dim
    spaces: Dict[Tuple, _Subspace] = {}
    expressions: Dict[Tuple, List[str]] = {}
    order: List[Tuple] = []

    def add(space: _Subspace, exprs: List[str]) -> None:
        key = space.key()
        if key not in spaces:
            if len(spaces) >= cap:
                return
            spaces[key] = space
            expressions[key] = []
            order.append(key)
        known = expressions[key]
        for e in exprs:
            if e not in known and len(known) < MAX_EXPRESSIONS:
                known.append(e)

    matrices = [sympy.Matrix(A) for A in rep.matrices]
    for j, M in enumerate(matrices):
        add(_fixed_space(M, W), [f"Fix A{j + 1}"])
        add(_Subspace.from_basis(sympy.Matrix.hstack(*M.columnspace()), W), [f"im A{j + 1}"])

    i = 0
    while i < len(order):
        key = order[i]
        space, exprs = spaces[key], list(expressions[key])
        for j, M in enumerate(matrices):
            add(space.preimage(M), [f"A{j + 1}^-1({e})" for e in exprs])
        for other_key in order[:i]:
            other_expr = expressions[other_key][0]
            add(space.intersect(spaces[other_key]), [f"({other_expr}) ∩ ({exprs[0]})"])
        i += 1

    if len(spaces) >= cap:
        warn("Synchrony", f"Subspace closure stopped at the cap of {cap} spaces.")

    spec = fund.as_spec()
    result: Dict[Partition, SynchronySpace] = {}
    for key in order:
        exprs = tuple(expressions[key])
        p = polydiagonal_partition(spaces[key].basis(), fund.size, rep.dim_v)
        if p is None:
            log("Synchrony", f"'{exprs[0]}' is not a polydiagonal; skipped.")
            continue
        if not is_balanced(spec, p):
            warn("Synchrony", f"'{exprs[0]}' gives {p}, which is not balanced.")
        if p in result:
            merged = result[p].expressions + tuple(e for e in exprs if e not in result[p].expressions)
            result[p] = SynchronySpace(p, rep.dim_v, merged[:MAX_EXPRESSIONS])
        else:
            result[p] = SynchronySpace(p, rep.dim_v, exprs)

    return sorted(result.values(), key=lambda s: (s.partition.num_blocks, s.partition.rgs()))

def symmetry_coverage(fund: FundamentalNetwork, spaces: List[SynchronySpace]) -> Dict[str, List[str]]:
    """Which balanced partitions the symmetry closure reached, and which it missed."""
    reached = {s.partition for s in spaces}
    balanced = enumerate_balanced(fund.as_spec())
    return {
        "reached": [str(p) for p in balanced if p in reached],
        "missed": [str(p) for p in balanced if p not in reached],
    }
