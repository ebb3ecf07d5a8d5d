# ================================================
# File: netsym/bifurcation/jordan.py
# ================================================
from dataclasses import dataclass
from typing import Any, Dict, List, Union

import numpy as np
import scipy.linalg
import sympy

from ..config import CLUSTER_GAP_TOL, CLUSTER_TOL, LS_MAX_ITER
from ..errors import IllConditioned, InvalidConfig
from ..representation.linalg import poly_at
from ..utils.helpers import log, matrix_rows

MatrixLike = Union[sympy.MatrixBase, np.ndarray]


@dataclass(frozen=True)
class JordanChevalley:
    """L = S + N with S semisimple, N nilpotent and S N = N S."""

    S: MatrixLike
    N: MatrixLike
    exact: bool

    def to_dict(self) -> Dict[str, Any]:
        if self.exact:
            return {"exact": True, "S": matrix_rows(self.S), "N": matrix_rows(self.N)}
        return {"exact": False, "S": np.asarray(self.S).tolist(), "N": np.asarray(self.N).tolist()}


def _is_rational(L: sympy.MatrixBase) -> bool:
    return all(sympy.sympify(v).is_Rational for v in L)

def _squarefree_part(L: sympy.Matrix, t: sympy.Symbol) -> sympy.Poly:
    chi = sympy.Poly(L.charpoly(t).as_expr(), t)
    return sympy.quo(chi, sympy.gcd(chi, chi.diff(t)))

def _exact(L: sympy.Matrix) -> JordanChevalley:
    t = sympy.Symbol("t")
    q = _squarefree_part(L, t)
    dq = q.diff(t)
    S = sympy.Matrix(L)
    # quadratic convergence: ceil(log2 n) steps suffice
    for step in range(L.rows + 1):
        qS = poly_at(q, S)
        if qS.is_zero_matrix:
            break
        S = S - poly_at(dq, S).inv() * qS
    N = sympy.Matrix(L) - S
    log("Jordan", f"Exact split of a {L.rows}x{L.rows} matrix in {step} Newton step(s).")
    return JordanChevalley(sympy.ImmutableMatrix(S), sympy.ImmutableMatrix(N), True)


def cluster_eigenvalues(eigs: np.ndarray, tol: float) -> List[List[int]]:
    """Single-linkage clusters of eigenvalues closer than tol."""
    n = len(eigs)
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(eigs[i] - eigs[j]) <= tol:
                parent[find(i)] = find(j)
    groups: Dict[int, List[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values(), key=lambda g: (eigs[g[0]].real, eigs[g[0]].imag))

def _polyval_matrix(coeffs: np.ndarray, M: np.ndarray) -> np.ndarray:
    out = np.zeros_like(M)
    eye = np.eye(M.shape[0], dtype=M.dtype)
    for c in coeffs:
        out = out @ M + c * eye
    return out

def _numeric(L: np.ndarray, tol: float = CLUSTER_TOL, gap_tol: float = CLUSTER_GAP_TOL) -> JordanChevalley:
    n = L.shape[0]
    scale = max(1.0, float(np.linalg.norm(L, ord=np.inf)))
    T, _ = scipy.linalg.schur(L.astype(complex), output="complex")
    eigs = np.diag(T)
    clusters = cluster_eigenvalues(eigs, tol * scale)
    centers = np.array([eigs[c].mean() for c in clusters])

    # |q'(mu)| for the cluster centers mu; q'(mu) -> 0 as two clusters merge
    for i, mu in enumerate(centers):
        others = np.delete(centers, i)
        separation = float(np.abs(np.prod((mu - others) / scale))) if others.size else 1.0
        if separation < gap_tol:
            raise IllConditioned(f"Eigenvalue clusters are too close to separate (gap {separation:.2e}).",
                                 {"eigenvalues": [complex(e) for e in eigs], "gap": separation})

    q = np.poly(centers)
    real_input = not np.iscomplexobj(L)
    if real_input:
        q = q.real
    dq = np.polyder(q)

    S = L.astype(float if real_input else complex)
    for _ in range(LS_MAX_ITER):
        qS = _polyval_matrix(q, S)
        if np.linalg.norm(qS) <= tol * scale ** len(clusters):
            break
        S = S - np.linalg.solve(_polyval_matrix(dq, S), qS)
    else:
        raise IllConditioned("Newton iteration for the semisimple part did not converge.",
                             {"clusters": len(clusters)})
    log("Jordan", f"Numeric split of a {n}x{n} matrix, {len(clusters)} eigenvalue cluster(s).")
    return JordanChevalley(S, L - S, False)


def jordan_chevalley(L: MatrixLike) -> JordanChevalley:
    """
    Semisimple and nilpotent parts of a square matrix. A sympy matrix with
    rational entries is split exactly; anything else goes through the Schur
    form with eigenvalues clustered at CLUSTER_TOL.
    """
    if isinstance(L, sympy.MatrixBase):
        if L.rows != L.cols:
            raise InvalidConfig(f"Expected a square matrix, got {L.rows}x{L.cols}.")
        if L.rows == 0:
            return JordanChevalley(sympy.ImmutableMatrix(L), sympy.ImmutableMatrix(L), True)
        if _is_rational(L):
            return _exact(sympy.Matrix(L))
        L = np.array(L.evalf().tolist(), dtype=complex if any(not sympy.sympify(v).is_real for v in L) else float)
    L = np.asarray(L)
    if L.ndim != 2 or L.shape[0] != L.shape[1]:
        raise InvalidConfig(f"Expected a square matrix, got shape {L.shape}.")
    if L.shape[0] == 0:
        return JordanChevalley(L.copy(), L.copy(), False)
    return _numeric(L)
