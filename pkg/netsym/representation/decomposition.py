# ================================================
# File: netsym/representation/decomposition.py
# ================================================
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy

from ..config import DECOMPOSE_DIM_BOUND, ISOMORPHISM_SAMPLES, SPLIT_ATTEMPTS
from ..errors import BoundExceeded, InvalidConfig, NotIndecomposable, SplitFailure
from ..network.fundamental import Representation
from ..utils.helpers import basis_columns, log, resolve_seed, warn
from .algebra import (
    COMPLEX, QUATERNIONIC, REAL, SPLIT, EndoAlgebra, endomorphism_basis,
    division_type, is_semisimple_span, quotient_structure,
)
from .linalg import (
    canonical_basis, column_span, intertwiner_basis, is_invertible, nullspace, poly_at,
    random_combination, rank, sort_key,
)

INDECOMPOSABLE, UNRESOLVED = "indecomposable", "unresolved"


@dataclass(frozen=True)
class Summand:
    basis: sympy.ImmutableMatrix
    indecomposable: bool
    irreducible: bool
    type_label: Optional[str]
    end_dim: int
    radical_dim: int
    status: str = INDECOMPOSABLE
    notes: str = ""

    @property
    def dim(self) -> int:
        return self.basis.cols

    def to_dict(self) -> Dict[str, Any]:
        return {
            "dim": self.dim,
            "basis": basis_columns([self.basis[:, j] for j in range(self.dim)]),
            "indecomposable": self.indecomposable,
            "irreducible": self.irreducible,
            "type": self.type_label,
            "end_dim": self.end_dim,
            "radical_dim": self.radical_dim,
            "status": self.status,
            "notes": self.notes,
        }


@dataclass(frozen=True)
class DecompositionReport:
    ambient_dim: int
    dim_v: int
    seed: int
    summands: Tuple[Summand, ...]
    iso_classes: Tuple[Tuple[int, ...], ...]
    multiplicity_free: bool

    @property
    def unresolved(self) -> bool:
        return any(s.status == UNRESOLVED for s in self.summands)

    def projections(self) -> List[sympy.Matrix]:
        """Projection onto each summand along the others."""
        B = sympy.Matrix.hstack(*[s.basis for s in self.summands])
        B_inv = B.inv()
        out, start = [], 0
        for s in self.summands:
            rows = B_inv[start:start + s.dim, :]
            out.append(s.basis * rows)
            start += s.dim
        return out

    def to_dict(self) -> Dict[str, Any]:
        return {
            "ambient_dim": self.ambient_dim,
            "dim_v": self.dim_v,
            "seed": self.seed,
            "summands": [s.to_dict() for s in self.summands],
            "iso_classes": [[i + 1 for i in c] for c in self.iso_classes],
            "multiplicity_free": self.multiplicity_free,
            "unresolved": self.unresolved,
        }


def make_summand(rep: Representation, basis: sympy.Matrix, status: str = INDECOMPOSABLE,
                 notes: str = "") -> Summand:
    """Computes End, radical, type and irreducibility of an invariant subspace."""
    B = canonical_basis(sympy.Matrix(basis))
    local = rep.restrict(B)
    alg = endomorphism_basis(local).with_radical()
    type_label = None
    indecomposable = status == INDECOMPOSABLE
    if indecomposable:
        try:
            type_label = division_type(alg, indecomposable=True)
        except NotIndecomposable as e:
            indecomposable, status, notes = False, UNRESOLVED, e.message
    irreducible = indecomposable and is_semisimple_span(local)
    return Summand(sympy.ImmutableMatrix(B), indecomposable, irreducible, type_label,
                   alg.dim, alg.radical_dim, status, notes)


# --- Splitting ---

def _primary_parts(E: sympy.Matrix) -> List[sympy.Matrix]:
    """Bases of ker p(E)^m over the distinct irreducible factors p^m of the characteristic polynomial."""
    t = sympy.Symbol("t")
    chi = sympy.Poly(E.charpoly(t).as_expr(), t)
    _, factors = sympy.factor_list(chi)
    if len(factors) < 2:
        return [sympy.eye(E.rows)]
    parts = []
    for p, m in factors:
        K = nullspace(poly_at(sympy.Poly(p, t), E) ** m)
        parts.append(column_span(K, E.rows))
    return parts

def _split(rep: Representation, basis: sympy.Matrix, rng: np.random.Generator) -> List[Tuple[sympy.Matrix, str, str]]:
    if basis.cols == 1:
        return [(basis, INDECOMPOSABLE, "")]
    local = rep.restrict(basis)
    alg = endomorphism_basis(local).with_radical()
    if alg.quotient_dim == 1:
        return [(basis, INDECOMPOSABLE, "")]

    for _ in range(SPLIT_ATTEMPTS):
        E = random_combination([sympy.Matrix(b) for b in alg.basis], rng)
        parts = _primary_parts(E)
        if len(parts) > 1:
            out = []
            for P in parts:
                out.extend(_split(rep, basis * P, rng))
            return out

    structure = quotient_structure(alg)
    if structure.kind == SPLIT:
        e = structure.idempotent
        identity = sympy.eye(e.rows)
        image = column_span(nullspace(e - identity), e.rows)
        kernel = column_span(nullspace(e), e.rows)
        log("Decompose", f"Split a {basis.cols}-dim piece by an idempotent ({structure.details}).")
        return _split(rep, basis * image, rng) + _split(rep, basis * kernel, rng)
    if structure.kind in (REAL, COMPLEX, QUATERNIONIC):
        return [(basis, INDECOMPOSABLE, "")]

    warn("Decompose", f"Could not split a {basis.cols}-dim piece: {structure.details}.")
    return [(basis, UNRESOLVED, structure.details)]

def _is_direct_sum(rep: Representation, bases: Sequence[sympy.Matrix]) -> bool:
    W = rep.ambient_dim
    if sum(B.cols for B in bases) != W or rank(sympy.Matrix.hstack(*bases)) != W:
        return False
    for B in bases:
        for A in rep.matrices:
            if rank(sympy.Matrix.hstack(B, sympy.Matrix(A) * B)) != B.cols:
                return False
    return True

def _base_representation(rep: Representation) -> Representation:
    """The d = 1 representation whose d-fold inflation is rep."""
    d = rep.dim_v
    n = rep.ambient_dim // d
    matrices = []
    for A in rep.matrices:
        M = sympy.zeros(n, n)
        for k in range(n):
            for src in range(n):
                M[k, src] = A[k * d, src * d]
        matrices.append(sympy.ImmutableMatrix(M))
    return Representation(1, tuple(matrices), rep.unit_index)

def _inflate(summand: Summand, d: int) -> List[Summand]:
    out = []
    n = summand.basis.rows
    for c in range(d):
        B = sympy.zeros(n * d, summand.dim)
        for k in range(n):
            for j in range(summand.dim):
                B[k * d + c, j] = summand.basis[k, j]
        out.append(Summand(sympy.ImmutableMatrix(B), summand.indecomposable, summand.irreducible,
                           summand.type_label, summand.end_dim, summand.radical_dim,
                           summand.status, summand.notes))
    return out


# --- Homomorphisms ---

def hom_space(rep: Representation, a: Summand, b: Summand) -> List[sympy.Matrix]:
    """Intertwiners a -> b in summand coordinates (shape dim b x dim a)."""
    ra, rb = rep.restrict(a.basis), rep.restrict(b.basis)
    return intertwiner_basis([sympy.Matrix(A) for A in ra.matrices], [sympy.Matrix(B) for B in rb.matrices])

def are_isomorphic(rep: Representation, a: Summand, b: Summand,
                   seed: Optional[int] = None) -> Tuple[bool, Optional[sympy.Matrix]]:
    """Decides a ~ b; the witness is an invertible intertwiner a -> b."""
    if a.dim != b.dim:
        return False, None
    hom_ab = hom_space(rep, a, b)
    if not hom_ab:
        return False, None

    rng = np.random.default_rng(resolve_seed(seed))
    for _ in range(ISOMORPHISM_SAMPLES):
        L = random_combination(hom_ab, rng)
        if is_invertible(L):
            return True, L

    # For indecomposables, g f is invertible for some basis pair iff a ~ b.
    hom_ba = hom_space(rep, b, a)
    for f in hom_ab:
        for g in hom_ba:
            if is_invertible(g * f):
                return True, f
    return False, None

def _iso_classes(rep: Representation, summands: Sequence[Summand], seed: int) -> List[Tuple[int, ...]]:
    classes: List[List[int]] = []
    for i, s in enumerate(summands):
        for c in classes:
            if are_isomorphic(rep, summands[c[0]], s, seed)[0]:
                c.append(i)
                break
        else:
            classes.append([i])
    return [tuple(c) for c in classes]


# --- Public entry points ---

def decompose(rep: Representation, seed: Optional[int] = None) -> DecompositionReport:
    seed = resolve_seed(seed)
    W = rep.ambient_dim
    if W > DECOMPOSE_DIM_BOUND:
        raise BoundExceeded(f"Decomposition is bounded by ambient dimension {DECOMPOSE_DIM_BOUND}; got {W}.",
                            {"ambient_dim": W, "bound": DECOMPOSE_DIM_BOUND})

    if rep.dim_v > 1:
        base = decompose(_base_representation(rep), seed)
        summands = [inflated for s in base.summands for inflated in _inflate(s, rep.dim_v)]
        summands.sort(key=lambda s: (s.dim, sort_key(s.basis)))
    else:
        for attempt in range(SPLIT_ATTEMPTS):
            rng = np.random.default_rng(np.random.SeedSequence([seed, attempt]))
            pieces = _split(rep, sympy.eye(W), rng)
            if _is_direct_sum(rep, [p[0] for p in pieces]):
                break
            warn("Decompose", f"Attempt {attempt + 1} did not give a direct sum; retrying with a derived seed.")
        else:
            raise SplitFailure(f"No verified decomposition after {SPLIT_ATTEMPTS} attempts.", {"seed": seed})
        summands = [make_summand(rep, B, status, notes) for B, status, notes in pieces]
        summands.sort(key=lambda s: (s.dim, sort_key(s.basis)))

    classes = _iso_classes(rep, summands, seed)
    multiplicity_free = all(len(c) == 1 for c in classes) and all(s.indecomposable for s in summands)
    log("Decompose", f"{len(summands)} summands of dims {[s.dim for s in summands]}, "
                     f"{len(classes)} isomorphism classes.")
    return DecompositionReport(W, rep.dim_v, seed, tuple(summands), tuple(classes), multiplicity_free)

def krull_schmidt_check(rep: Representation, seeds: Sequence[int]) -> bool:
    """Decompositions under all seeds agree up to isomorphism of summands."""
    if len(seeds) < 2:
        raise InvalidConfig("Krull-Schmidt check needs at least two seeds.")
    reports = [decompose(rep, s) for s in seeds]
    reference = reports[0]
    for other in reports[1:]:
        if len(other.summands) != len(reference.summands):
            return False
        unmatched = list(other.summands)
        for s in reference.summands:
            match = next((t for t in unmatched if are_isomorphic(rep, s, t, reference.seed)[0]), None)
            if match is None:
                return False
            unmatched.remove(match)
    return True

def endo_algebra(rep: Representation) -> EndoAlgebra:
    return endomorphism_basis(rep).with_radical()
