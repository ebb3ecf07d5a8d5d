# ================================================
# File: netsym/network/fundamental.py
# ================================================
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
import sympy

from ..errors import InvalidNetwork, NotAMonoid
from .monoid import CellMap, MonoidTable, NetworkSpec, composition_table, is_closed


@dataclass(frozen=True)
class FundamentalNetwork:
    """The network on the monoid's own elements, wired by left multiplication."""

    base: NetworkSpec
    table: MonoidTable
    tilde_maps: Tuple[CellMap, ...]

    @property
    def size(self) -> int:
        return len(self.tilde_maps)

    @property
    def unit_index(self) -> int:
        return self.table.unit_index

    def as_spec(self) -> NetworkSpec:
        return NetworkSpec(self.size, self.tilde_maps)

    def inputs(self, cell: int) -> List[int]:
        """Input cells of `cell`: argument k reads X_{tilde_k(cell)}."""
        return [m(cell) for m in self.tilde_maps]

    def equations(self, var: str = "X") -> List[str]:
        lines = []
        for j in range(self.size):
            args = ", ".join(f"{var}{i + 1}" for i in self.inputs(j))
            lines.append(f"d{var}{j + 1}/dt = f({args})")
        return lines

    def check(self) -> None:
        n = self.size
        for j in range(n):
            for k in range(n):
                composed = self.base.maps[j].compose(self.base.maps[k])
                if self.base.maps[self.tilde_maps[j](k)] != composed:
                    raise InvalidNetwork(f"Left-multiplication map {j + 1} disagrees with the composition table at {k + 1}.")


@dataclass(frozen=True)
class Representation:
    """Matrices A_sigma acting on W = V^n, V = R^d."""

    dim_v: int
    matrices: Tuple[sympy.ImmutableMatrix, ...]
    unit_index: Optional[int] = None

    @property
    def ambient_dim(self) -> int:
        return self.matrices[0].rows

    @property
    def size(self) -> int:
        return len(self.matrices)

    def numeric(self) -> List[np.ndarray]:
        return [np.array(A.tolist(), dtype=float) for A in self.matrices]

    def apply(self, j: int, X: np.ndarray) -> np.ndarray:
        return np.array(self.matrices[j].tolist(), dtype=float) @ X

    def restrict(self, basis: sympy.Matrix) -> "Representation":
        """Action on an invariant subspace, in the coordinates of the given column basis."""
        B = sympy.Matrix(basis)
        gram_inv = (B.T * B).inv()
        restricted = []
        for A in self.matrices:
            M = gram_inv * B.T * A * B
            if A * B != B * M:
                raise InvalidNetwork("Subspace is not invariant under the representation.")
            restricted.append(sympy.ImmutableMatrix(M))
        return Representation(1, tuple(restricted), self.unit_index)

    def check(self, table: MonoidTable) -> None:
        if self.unit_index is not None:
            if self.matrices[self.unit_index] != sympy.eye(self.ambient_dim):
                raise InvalidNetwork("Unit element is not represented by the identity.")
        for j in range(self.size):
            for k in range(self.size):
                if self.matrices[j] * self.matrices[k] != self.matrices[table.product(j, k)]:
                    raise InvalidNetwork(f"Representation fails A_{j + 1} A_{k + 1} = A_({j + 1}o{k + 1}).")


def left_action_maps(table: MonoidTable) -> List[CellMap]:
    """tilde_j(k) = table[j][k]."""
    return [CellMap(tuple(row)) for row in table.table]

def fundamental_network(spec: NetworkSpec) -> FundamentalNetwork:
    if not is_closed(spec):
        raise NotAMonoid("Input maps are not closed under composition; run closure first.")
    table = composition_table(spec)
    if table.unit_index is None:
        raise NotAMonoid("Composition table has no unit; run monoid completion first.",
                         {"size": table.size})
    return FundamentalNetwork(spec, table, tuple(left_action_maps(table)))

def rep_matrices(fund: FundamentalNetwork, d: int = 1) -> Representation:
    """Block row k of A_j selects block tilde_k(j)."""
    if d < 1:
        raise InvalidNetwork(f"Cell phase dimension must be positive, got {d}.")
    n = fund.size
    eye_d = sympy.eye(d)
    matrices = []
    for j in range(n):
        A = sympy.zeros(n * d, n * d)
        for k in range(n):
            src = fund.tilde_maps[k](j)
            A[k * d:(k + 1) * d, src * d:(src + 1) * d] = eye_d
        matrices.append(sympy.ImmutableMatrix(A))
    return Representation(d, tuple(matrices), fund.unit_index)

def conjugation_maps(spec: NetworkSpec, d: int = 1) -> List[sympy.ImmutableMatrix]:
    """pi_i: V^N -> V^n, block row k selects x_{sigma_k(i)}."""
    if not is_closed(spec):
        raise NotAMonoid("Conjugation maps need a closed collection of maps.")
    N, n = spec.num_cells, spec.size
    eye_d = sympy.eye(d)
    result = []
    for i in range(N):
        P = sympy.zeros(n * d, N * d)
        for k, sigma in enumerate(spec.maps):
            src = sigma(i)
            P[k * d:(k + 1) * d, src * d:(src + 1) * d] = eye_d
        result.append(sympy.ImmutableMatrix(P))
    return result

def describe_linear_map(P: sympy.Matrix, var: str = "x") -> str:
    """'(x2, x2, x1)' for a 0/1 selection matrix."""
    parts = []
    for r in range(P.rows):
        terms = [f"{var}{c + 1}" for c in range(P.cols) if P[r, c] != 0]
        parts.append("+".join(terms) if terms else "0")
    return "(" + ", ".join(parts) + ")"
