# ================================================
# File: netsym/representation/algebra.py
# ================================================
import itertools
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple

import sympy

from ..errors import NotIndecomposable
from ..network.fundamental import Representation
from ..utils.helpers import log
from .linalg import coordinates, intertwiner_basis, is_invertible, is_nilpotent, nullspace

REAL, COMPLEX, QUATERNIONIC = "real", "complex", "quaternionic"
SPLIT, UNRESOLVED = "split", "unresolved"

# Small integer coefficients tried when looking for a rational idempotent
# in a four-dimensional quotient.
_IDEMPOTENT_SEARCH_RANGE = 3


@dataclass(frozen=True)
class EndoAlgebra:
    """End(W): linear maps commuting with every A_sigma, with its nilpotent radical once computed."""

    ambient_dim: int
    basis: Tuple[sympy.ImmutableMatrix, ...]
    radical_basis: Optional[Tuple[sympy.ImmutableMatrix, ...]] = None

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def radical_dim(self) -> int:
        if self.radical_basis is None:
            raise ValueError("Radical has not been computed for this algebra.")
        return len(self.radical_basis)

    @property
    def quotient_dim(self) -> int:
        return self.dim - self.radical_dim

    def with_radical(self) -> "EndoAlgebra":
        if self.radical_basis is not None:
            return self
        return replace(self, radical_basis=tuple(radical(self)))

    def is_local(self, extra: Sequence[sympy.Matrix] = ()) -> bool:
        """Every listed element (basis first) is invertible or nilpotent."""
        return all(is_invertible(M) or is_nilpotent(M) for M in list(self.basis) + list(extra))


@dataclass(frozen=True)
class QuotientStructure:
    kind: str
    idempotent: Optional[sympy.Matrix] = None
    details: str = ""


def endomorphism_basis(rep: Representation) -> EndoAlgebra:
    """Exact basis of the commutant, in reduced echelon order of the solution space."""
    matrices = [sympy.Matrix(A) for A in rep.matrices]
    basis = intertwiner_basis(matrices, matrices)
    return EndoAlgebra(rep.ambient_dim, tuple(sympy.ImmutableMatrix(B) for B in basis))

def span_algebra(rep: Representation) -> EndoAlgebra:
    """The algebra spanned by the A_sigma (closed under products for a closed monoid)."""
    vectors = [sympy.Matrix(A) for A in rep.matrices]
    independent: List[sympy.Matrix] = []
    for v in vectors:
        if coordinates(independent, v) is None:
            independent.append(v)
    return EndoAlgebra(rep.ambient_dim, tuple(sympy.ImmutableMatrix(B) for B in independent))

def radical(alg: EndoAlgebra) -> List[sympy.ImmutableMatrix]:
    """Kernel of the trace form tr(xy); every element is checked to be nilpotent."""
    n = alg.dim
    if n == 0:
        return []
    basis = [sympy.Matrix(B) for B in alg.basis]
    gram = sympy.zeros(n, n)
    for i in range(n):
        for j in range(i, n):
            gram[i, j] = gram[j, i] = (basis[i] * basis[j]).trace()
    result = []
    for c in nullspace(gram):
        x = sympy.zeros(alg.ambient_dim, alg.ambient_dim)
        for coeff, b in zip(c, basis):
            x += coeff * b
        if not is_nilpotent(x):
            raise ArithmeticError("Trace-form radical produced a non-nilpotent element.")
        result.append(sympy.ImmutableMatrix(x))
    return result

def is_semisimple_span(rep: Representation) -> bool:
    return len(radical(span_algebra(rep))) == 0


# --- Quotient End / rad ---

class _Quotient:
    """End/rad with representatives: identity first, then basis elements independent mod rad."""

    def __init__(self, alg: EndoAlgebra):
        alg = alg.with_radical()
        self.rad = [sympy.Matrix(r) for r in alg.radical_basis]
        identity = sympy.eye(alg.ambient_dim)
        reps: List[sympy.Matrix] = []
        for cand in [identity] + [sympy.Matrix(b) for b in alg.basis]:
            if coordinates(self.rad + reps, cand) is None:
                reps.append(cand)
        self.reps = reps
        self.dim = len(reps)

    def coords(self, M: sympy.Matrix) -> List[sympy.Rational]:
        c = coordinates(self.reps + self.rad, M)
        if c is None:
            raise ArithmeticError("Element lies outside the endomorphism algebra.")
        return c[:self.dim]

    def min_quadratic(self, y: sympy.Matrix) -> Tuple[sympy.Rational, sympy.Rational]:
        """(trace, norm) with y^2 - t y + n = 0 mod rad, when y is quadratic over the scalars."""
        c = self.coords(y)
        c2 = self.coords(y * y)
        # y^2 = a*1 + b*y requires c2 to be a combination of (1, 0, ..) and c
        span = [sympy.Matrix([1] + [0] * (self.dim - 1)), sympy.Matrix(c)]
        sol = coordinates(span, sympy.Matrix(c2))
        if sol is None:
            raise ArithmeticError("Element is not quadratic modulo the radical.")
        a, b = sol
        return b, -a


def _is_rational_square(q: sympy.Rational) -> bool:
    q = sympy.Rational(q)
    if q < 0:
        return False
    return sympy.sqrt(q).is_rational

def _lift_idempotent(e: sympy.Matrix) -> sympy.Matrix:
    """Idempotent of End lying over an idempotent modulo a nilpotent ideal."""
    for _ in range(64):
        if e * e == e:
            return e
        e2 = e * e
        e = 3 * e2 - 2 * e2 * e
    raise ArithmeticError("Idempotent lifting did not stabilize.")

def quotient_structure(alg: EndoAlgebra) -> QuotientStructure:
    """
    Classifies End/rad for dimensions 1, 2 and 4: a real division algebra
    (real, complex or quaternionic type), split (an idempotent exists, returned
    lifted to End), or unresolved.
    """
    Q = _Quotient(alg)
    if Q.dim == 1:
        return QuotientStructure(REAL)

    if Q.dim == 2:
        y = Q.reps[1]
        t, n = Q.min_quadratic(y)
        disc = t * t - 4 * n
        if disc < 0:
            return QuotientStructure(COMPLEX)
        if _is_rational_square(disc):
            root = sympy.sqrt(disc)
            r1, r2 = (t + root) / 2, (t - root) / 2
            e = (y - r2 * sympy.eye(y.rows)) / (r1 - r2)
            return QuotientStructure(SPLIT, _lift_idempotent(e), "quotient is Q x Q")
        return QuotientStructure(UNRESOLVED, None, f"quotient is Q(sqrt({disc})): splits over R only")

    if Q.dim == 4:
        reps = Q.reps
        commutative = all(Q.coords(a * b) == Q.coords(b * a) for a in reps for b in reps)
        pure = []
        for y in reps[1:]:
            try:
                t, _ = Q.min_quadratic(y)
            except ArithmeticError:
                return QuotientStructure(UNRESOLVED, None, "commutative four-dimensional quotient")
            pure.append(y - (t / 2) * sympy.eye(y.rows))
        if commutative:
            return QuotientStructure(UNRESOLVED, None, "commutative four-dimensional quotient")

        # Pure quaternions square to scalars; H iff u -> u^2 is negative definite.
        gram = sympy.zeros(3, 3)
        for i, j in itertools.product(range(3), repeat=2):
            sym = (pure[i] * pure[j] + pure[j] * pure[i]) / 2
            gram[i, j] = Q.coords(sym)[0]
        if gram.is_negative_definite:
            return QuotientStructure(QUATERNIONIC)

        rng = range(-_IDEMPOTENT_SEARCH_RANGE, _IDEMPOTENT_SEARCH_RANGE + 1)
        for coeffs in itertools.product(rng, repeat=3):
            if not any(coeffs):
                continue
            v = sympy.Matrix(coeffs)
            square = (v.T * gram * v)[0, 0]
            if square > 0 and _is_rational_square(square):
                u = sum((c * p for c, p in zip(coeffs, pure)), sympy.zeros(*pure[0].shape))
                e = (sympy.eye(u.rows) + u / sympy.sqrt(square)) / 2
                return QuotientStructure(SPLIT, _lift_idempotent(e), "quotient is a split quaternion algebra")
        return QuotientStructure(UNRESOLVED, None, "indefinite quaternion algebra without a small rational idempotent")

    return QuotientStructure(UNRESOLVED, None, f"quotient dimension {Q.dim}")

def division_type(alg: EndoAlgebra, indecomposable: bool = True) -> str:
    """real / complex / quaternionic for the End of an indecomposable."""
    alg = alg.with_radical()
    q = alg.quotient_dim
    if not indecomposable:
        raise NotIndecomposable("Type labels are only defined for indecomposable representations.")
    if q not in (1, 2, 4):
        raise NotIndecomposable(f"End/rad has dimension {q}, not 1, 2 or 4.", {"quotient_dim": q})
    structure = quotient_structure(alg)
    if structure.kind in (REAL, COMPLEX, QUATERNIONIC):
        log("Algebra", f"quotient dimension {q}: {structure.kind} type")
        return structure.kind
    raise NotIndecomposable(f"End/rad is not a division algebra: {structure.details}",
                            {"quotient_dim": q, "structure": structure.kind})
