# ================================================
# File: netsym/bifurcation/taylor.py
# ================================================
import itertools
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import sympy

from ..dsl.expression import expr_to_text
from ..dsl.grammar import LAMBDA
from ..network.fundamental import Representation
from ..representation.algebra import endomorphism_basis
from ..representation.linalg import coordinates, nullspace
from ..utils.helpers import log, rational_str

# (lambda degree, u degree) in the order coefficients are named
GRADED_PIECES = ((1, 0), (1, 1), (0, 1), (0, 2), (0, 3), (1, 2), (1, 3))

_NAME_LETTERS = "abcdefghjkmnpqrstvwyz"


def coordinate_symbols(m: int) -> Tuple[sympy.Symbol, ...]:
    return tuple(sympy.Symbol(f"u{i + 1}") for i in range(m))

def coefficient_names(count: int) -> Tuple[sympy.Symbol, ...]:
    letters = len(_NAME_LETTERS)
    return tuple(
        sympy.Symbol(_NAME_LETTERS[i % letters] + (str(i // letters) if i >= letters else ""))
        for i in range(count)
    )

def _monomial(gens: Sequence[sympy.Symbol], exps: Sequence[int]) -> sympy.Expr:
    return sympy.Mul(*[g ** e for g, e in zip(gens, exps)])

def truncate(expr: sympy.Expr, gens: Sequence[sympy.Symbol], max_degree: int,
             drop_constant: bool = False) -> sympy.Expr:
    """Keeps the terms of degree <= max_degree in gens and <= 1 in LAMBDA."""
    expr = sympy.expand(expr)
    if expr == 0:
        return sympy.Integer(0)
    all_gens = list(gens) + [LAMBDA]
    kept = []
    for monom, coeff in sympy.Poly(expr, *all_gens).terms():
        degree, lam_degree = sum(monom[:-1]), monom[-1]
        if degree > max_degree or lam_degree > 1:
            continue
        if drop_constant and degree == 0 and lam_degree == 0:
            continue
        kept.append(coeff * _monomial(all_gens, monom))
    return sympy.Add(*kept)


@dataclass(frozen=True)
class FamilyElement:
    lam_degree: int
    degree: int
    components: Tuple[sympy.Expr, ...]


@dataclass(frozen=True)
class TaylorFamily:
    """
    Basis of the equivariant polynomial maps r(u; lambda) on one summand,
    degree <= max_degree in u and <= 1 in lambda, with r(0; 0) = 0 and the
    linear part at lambda = 0 in the radical of End.
    """

    dim: int
    max_degree: int
    symbols: Tuple[sympy.Symbol, ...]
    elements: Tuple[FamilyElement, ...]
    names: Tuple[sympy.Symbol, ...]
    action: Tuple[sympy.ImmutableMatrix, ...]

    @property
    def has_trivial_solution(self) -> bool:
        """r(0; lambda) = 0 for every member."""
        return not any(e.degree == 0 for e in self.elements)

    def general(self) -> Tuple[sympy.Expr, ...]:
        return tuple(
            sympy.Add(*[name * e.components[j] for name, e in zip(self.names, self.elements)])
            for j in range(self.dim)
        )

    def _vector(self, components: Sequence[sympy.Expr], keys: List[Tuple]) -> sympy.Matrix:
        gens = list(self.symbols) + [LAMBDA]
        found: Dict[Tuple, sympy.Expr] = {}
        for j, comp in enumerate(components):
            comp = sympy.expand(comp)
            if comp != 0:
                for monom, coeff in sympy.Poly(comp, *gens).terms():
                    found[(j,) + monom] = coeff
        return sympy.Matrix([found.get(k, 0) for k in keys])

    def coefficients_of(self, components: Sequence[sympy.Expr]) -> Optional[Dict[sympy.Symbol, sympy.Expr]]:
        """Named coefficients of a member of the family, or None when it is not one."""
        gens = list(self.symbols) + [LAMBDA]
        keys = set()
        for comps in [e.components for e in self.elements] + [tuple(components)]:
            for j, comp in enumerate(comps):
                comp = sympy.expand(comp)
                if comp != 0:
                    keys.update((j,) + m for m in sympy.Poly(comp, *gens).monoms())
        keys = sorted(keys)
        basis = [self._vector(e.components, keys) for e in self.elements]
        coeffs = coordinates(basis, self._vector(components, keys))
        if coeffs is None:
            return None
        return dict(zip(self.names, coeffs))

    def is_equivariant(self, components: Sequence[sympy.Expr]) -> bool:
        u = sympy.Matrix(self.symbols)
        r = sympy.Matrix(list(components))
        for B in self.action:
            Bu = sympy.Matrix(B) * u
            moved = r.xreplace(dict(zip(self.symbols, Bu)))
            if any(sympy.expand(e) != 0 for e in moved - sympy.Matrix(B) * r):
                return False
        return True

    def to_dict(self) -> Dict[str, Any]:
        return {
            "dim": self.dim,
            "max_degree": self.max_degree,
            "coordinates": [str(s) for s in self.symbols],
            "members": [
                {"name": str(name), "components": [expr_to_text(c) for c in e.components]}
                for name, e in zip(self.names, self.elements)
            ],
        }


def _piece(action: Sequence[sympy.Matrix], u: Sequence[sympy.Symbol], degree: int) -> List[Tuple[sympy.Expr, ...]]:
    """Equivariant homogeneous maps of the given degree in u."""
    m = len(u)
    monomials = [sympy.Mul(*combo) for combo in itertools.combinations_with_replacement(u, degree)]
    unknowns = [[sympy.Dummy(f"c{j}_{i}") for i in range(len(monomials))] for j in range(m)]
    r = sympy.Matrix([sympy.Add(*[c * mon for c, mon in zip(unknowns[j], monomials)]) for j in range(m)])
    flat = [c for row in unknowns for c in row]

    equations = []
    for B in action:
        Bu = sympy.Matrix(B) * sympy.Matrix(u)
        moved = r.xreplace(dict(zip(u, Bu))) - sympy.Matrix(B) * r
        for e in moved:
            e = sympy.expand(e)
            if e != 0:
                equations.extend(sympy.Poly(e, *u).coeffs())
    if equations:
        A, _ = sympy.linear_eq_to_matrix(equations, flat)
    else:
        A = sympy.zeros(0, len(flat))

    out = []
    for v in nullspace(A):
        values = dict(zip(flat, v))
        out.append(tuple(sympy.expand(comp.xreplace(values)) for comp in r))
    return out


def equivariant_taylor_family(local: Representation, max_degree: int = 3) -> TaylorFamily:
    """
    Exact basis of the constrained Taylor family of a summand with explicit action.

    The linear part in u without lambda is restricted to the radical of End, so
    it is nilpotent at the bifurcation point. A summand with trivial action has
    a zero radical, and its family carries no plain u term.
    """
    m = local.ambient_dim
    u = coordinate_symbols(m)
    action = [sympy.Matrix(B) for B in local.matrices]
    radical = endomorphism_basis(local).with_radical().radical_basis

    elements: List[FamilyElement] = []
    for lam_degree, degree in GRADED_PIECES:
        if degree > max_degree:
            continue
        if (lam_degree, degree) == (0, 1):
            # linear part at the bifurcation point is nilpotent
            maps = [tuple(sympy.expand(e) for e in sympy.Matrix(R) * sympy.Matrix(u)) for R in radical]
        else:
            maps = _piece(action, u, degree)
        for comps in maps:
            elements.append(FamilyElement(lam_degree, degree, tuple(LAMBDA ** lam_degree * c for c in comps)))

    family = TaylorFamily(m, max_degree, u, tuple(elements), coefficient_names(len(elements)),
                          tuple(sympy.ImmutableMatrix(B) for B in action))
    log("Taylor", f"Equivariant family on a {m}-dim summand: {len(elements)} members up to degree {max_degree}.")
    return family


def family_text(family: TaylorFamily) -> List[str]:
    """'r1 = a*lambda + b*u1^2 + ...' per component."""
    return [f"r{j + 1} = {expr_to_text(c)}" for j, c in enumerate(family.general())]

def coefficient_values_text(values: Dict[sympy.Symbol, sympy.Expr]) -> Dict[str, str]:
    return {str(k): rational_str(v) for k, v in values.items()}
