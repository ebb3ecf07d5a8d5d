# ================================================
# File: netsym/representation/linalg.py
# ================================================
# Exact rational linear algebra shared by the algebra and decomposition code.
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np
import sympy
from sympy.polys.matrices import DomainMatrix

from ..config import RANDOM_COEFF_RANGE


def rref(M: sympy.Matrix) -> Tuple[sympy.Matrix, Tuple[int, ...]]:
    if M.rows == 0 or M.cols == 0:
        return sympy.Matrix(M), ()
    R, pivots = DomainMatrix.from_Matrix(sympy.Matrix(M)).to_field().rref()
    return R.to_Matrix(), tuple(pivots)

def nullspace(M: sympy.Matrix) -> List[sympy.Matrix]:
    """Column basis of ker M, one vector per free column in increasing order."""
    cols = M.cols
    if M.rows == 0:
        return [sympy.eye(cols)[:, j] for j in range(cols)]
    R, pivots = rref(M)
    free = [j for j in range(cols) if j not in pivots]
    basis = []
    for f in free:
        v = sympy.zeros(cols, 1)
        v[f] = 1
        for row, p in enumerate(pivots):
            v[p] = -R[row, f]
        basis.append(v)
    return basis

def rank(M: sympy.Matrix) -> int:
    return len(rref(M)[1])

def column_span(vectors: Sequence[sympy.Matrix], rows: int) -> sympy.Matrix:
    return sympy.Matrix.hstack(*vectors) if vectors else sympy.zeros(rows, 0)

def canonical_basis(B: sympy.Matrix) -> sympy.Matrix:
    """Column basis of span(B) read off the reduced row echelon form of B^T."""
    if B.cols == 0:
        return sympy.Matrix(B)
    R, pivots = rref(B.T)
    return R[:len(pivots), :].T

def flatten(M: sympy.Matrix) -> List[sympy.Rational]:
    return [M[i, j] for i in range(M.rows) for j in range(M.cols)]

def coordinates(basis: Sequence[sympy.Matrix], target: sympy.Matrix) -> Optional[List[sympy.Rational]]:
    """Coefficients c with sum c_i basis_i = target, or None when target is outside the span."""
    if not basis:
        return [] if all(v == 0 for v in flatten(target)) else None
    A = sympy.Matrix([flatten(b) for b in basis]).T
    augmented = sympy.Matrix.hstack(A, sympy.Matrix(flatten(target)))
    R, pivots = rref(augmented)
    if len(basis) in pivots:
        return None
    coeffs = [sympy.Integer(0)] * len(basis)
    for row, p in enumerate(pivots):
        coeffs[p] = R[row, len(basis)]
    return coeffs

def combine(coeffs: Sequence, basis: Sequence[sympy.Matrix]) -> sympy.Matrix:
    out = sympy.zeros(*basis[0].shape)
    for c, b in zip(coeffs, basis):
        if c != 0:
            out += c * b
    return out

def random_rational(rng: np.random.Generator, bound: int = RANDOM_COEFF_RANGE) -> sympy.Rational:
    return sympy.Rational(int(rng.integers(-bound, bound + 1)), int(rng.integers(1, bound + 1)))

def random_combination(basis: Sequence[sympy.Matrix], rng: np.random.Generator) -> sympy.Matrix:
    return combine([random_rational(rng) for _ in basis], basis)

def is_nilpotent(M: sympy.Matrix) -> bool:
    return (sympy.Matrix(M) ** M.rows).is_zero_matrix if M.rows else True

def is_invertible(M: sympy.Matrix) -> bool:
    return M.rows == M.cols and rank(M) == M.rows

def intertwiner_basis(src: Sequence[sympy.Matrix], dst: Sequence[sympy.Matrix]) -> List[sympy.Matrix]:
    """Basis of {L : L S_j = D_j L for all j}, L of shape (dim dst, dim src)."""
    k = src[0].rows
    m = dst[0].rows
    unknowns = m * k
    rows: List[List[sympy.Rational]] = []
    for S, D in zip(src, dst):
        for i in range(m):
            for j in range(k):
                row = [sympy.Integer(0)] * unknowns
                for c in range(k):
                    if S[c, j] != 0:
                        row[i * k + c] += S[c, j]
                for r in range(m):
                    if D[i, r] != 0:
                        row[r * k + j] -= D[i, r]
                if any(v != 0 for v in row):
                    rows.append(row)
    system = sympy.Matrix(rows) if rows else sympy.zeros(0, unknowns)
    return [sympy.Matrix(m, k, list(v)) for v in nullspace(system)]

def sort_key(M: sympy.Matrix) -> Tuple[Fraction, ...]:
    return tuple(Fraction(int(sympy.Rational(v).p), int(sympy.Rational(v).q)) for v in flatten(M))

def poly_at(poly: sympy.Poly, E: sympy.Matrix) -> sympy.Matrix:
    """p(E) by Horner's rule."""
    out = sympy.zeros(E.rows, E.rows)
    for c in poly.all_coeffs():
        out = out * E + c * sympy.eye(E.rows)
    return out
