# ================================================
# File: netsym/bifurcation/classify.py
# ================================================
# Generic codimension-one steady-state bifurcations along one summand.
#
# Branches are found with the ansatz u_i = v_i s^k_i (k_i = 1 or 2) on a
# subset of the summand coordinates, the others zero, and lambda = L s^2.
# The lowest power of s in each component gives a weighted-homogeneous
# system for v; an isolated nondegenerate solution persists, and setting
# s = 1, L = lambda turns it into the branch formula u_i = v_i(lambda).
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
import sympy

from ..dsl.expression import ResponseFunction, expr_to_text
from ..dsl.grammar import LAMBDA
from ..errors import IllConditioned
from ..network.fundamental import FundamentalNetwork, Representation, rep_matrices
from ..representation.algebra import COMPLEX, QUATERNIONIC, REAL
from ..representation.decomposition import DecompositionReport, Summand, decompose
from ..synchrony.balanced import Partition
from ..utils.helpers import basis_columns, log, warn
from .reduction import ReducedTaylor, reduced_taylor
from .taylor import TaylorFamily, coefficient_values_text, equivariant_taylor_family, family_text

SADDLE_NODE = "saddle-node"
TRANSCRITICAL = "transcritical"
PITCHFORK = "pitchfork"
COMPOSITE = "composite"
NONE_GENERIC = "none-generic"

HYPOTHESIS_VIOLATED = "classification theorem hypothesis violated"
GENERIC_INSTANCE = "generic"
NON_GENERIC_INSTANCE = "non-generic instance"
REGULAR_POINT = "regular point"


@dataclass(frozen=True)
class Branch:
    """One branch family in summand coordinates; `symmetric` marks a +/- pair."""

    support: Tuple[int, ...]
    scaling: Tuple[int, ...]
    formulas: Tuple[sympy.Expr, ...]
    symmetric: bool = False
    conditions: Tuple[sympy.Expr, ...] = ()
    synchrony: Optional[Partition] = None

    @property
    def trivial(self) -> bool:
        return not self.support

    @property
    def exponent(self) -> Optional[Fraction]:
        if self.trivial:
            return None
        return Fraction(min(self.scaling), 2)

    def partner(self) -> Tuple[sympy.Expr, ...]:
        """Formulas of the other member of a +/- pair (s -> -s)."""
        signs = {i: (-1) ** k for i, k in zip(self.support, self.scaling)}
        return tuple(signs.get(i, 1) * f for i, f in enumerate(self.formulas))

    def members(self) -> List[Tuple[sympy.Expr, ...]]:
        return [self.formulas, self.partner()] if self.symmetric else [self.formulas]

    def substitute(self, values: Dict[sympy.Symbol, Any]) -> "Branch":
        return Branch(self.support, self.scaling,
                      tuple(sympy.simplify(f.xreplace(values)) for f in self.formulas),
                      self.symmetric, self.conditions, self.synchrony)

    def formula_text(self) -> List[str]:
        """Entries that flip sign across a +/- pair are prefixed with '+/-'."""
        flips = {i for i, k in zip(self.support, self.scaling) if k == 1} if self.symmetric else set()
        return [("+/-" if i in flips else "") + expr_to_text(f) for i, f in enumerate(self.formulas)]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "trivial": self.trivial,
            "exponent": str(self.exponent) if self.exponent is not None else None,
            "formulas": self.formula_text(),
            "symmetric": self.symmetric,
            "conditions": [f"{expr_to_text(c)} != 0" for c in self.conditions],
            "synchrony": str(self.synchrony) if self.synchrony is not None else None,
        }


@dataclass(frozen=True)
class BifurcationClass:
    summand: int
    kind: str
    branches: Tuple[Branch, ...]
    conditions: Tuple[sympy.Expr, ...]
    basis: sympy.ImmutableMatrix
    type_label: Optional[str]
    family: Optional[TaylorFamily] = field(default=None, compare=False)
    notes: str = ""

    @property
    def branch_count(self) -> int:
        return len(self.branches)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "summand": self.summand + 1,
            "kind": self.kind,
            "type": self.type_label,
            "branch_count": self.branch_count,
            "branches": [b.to_dict() for b in self.branches],
            "genericity_conditions": [f"{expr_to_text(c)} != 0" for c in self.conditions],
            "coordinates": {
                "symbols": [str(s) for s in self.family.symbols] if self.family else [],
                "basis": basis_columns([self.basis[:, j] for j in range(self.basis.cols)]),
            },
            "reduced_family": family_text(self.family) if self.family else [],
            "notes": self.notes,
        }


@dataclass(frozen=True)
class ClassificationReport:
    classes: Tuple[BifurcationClass, ...]
    hypothesis_ok: bool
    message: str = ""

    def __iter__(self) -> Iterator[BifurcationClass]:
        return iter(self.classes)

    def __len__(self) -> int:
        return len(self.classes)

    @property
    def kinds(self) -> List[str]:
        return [c.kind for c in self.classes]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "hypothesis_ok": self.hypothesis_ok,
            "message": self.message,
            "classes": [c.to_dict() for c in self.classes],
        }


# --- Leading-order solver ---

def _same(a: sympy.Expr, b: sympy.Expr) -> bool:
    return sympy.simplify(a - b) == 0

def _leading(expr: sympy.Expr, s: sympy.Symbol) -> Optional[sympy.Expr]:
    expr = sympy.expand(expr)
    if expr == 0:
        return None
    poly = sympy.Poly(expr, s)
    low = min(m[0] for m in poly.monoms())
    return sympy.expand(poly.coeff_monomial(s ** low))

def _strip_monomial(expr: sympy.Expr, vs: Sequence[sympy.Symbol]) -> sympy.Expr:
    """Divides out the largest monomial in vs; the v_i are nonzero on a branch."""
    _, reduced = sympy.Poly(expr, *vs).terms_gcd()
    return reduced.as_expr()

def _condition_factors(expr: sympy.Expr, names: Sequence[sympy.Symbol]) -> List[sympy.Expr]:
    names = set(names)
    num, den = sympy.fraction(sympy.together(sympy.expand(expr)))
    out = []
    for part in (num, den):
        part = sympy.expand(part)
        gens = sorted(part.free_symbols, key=str)
        if not gens or not part.is_polynomial(*gens):
            continue
        for factor, _ in sympy.factor_list(part)[1]:
            if not factor.free_symbols & names or factor.free_symbols - names:
                continue
            if factor.could_extract_minus_sign():
                factor = -factor
            out.append(factor)
    return out

def _solve_ansatz(components: Sequence[sympy.Expr], u: Sequence[sympy.Symbol], names: Sequence[sympy.Symbol],
                  support: Tuple[int, ...], scaling: Tuple[int, ...]) -> List[Branch]:
    s = sympy.Symbol("s", positive=True)
    vs = [sympy.Symbol(f"v{i + 1}") for i in support]
    subs = {u_i: 0 for u_i in u}
    for i, k, v in zip(support, scaling, vs):
        subs[u[i]] = v * s ** k
    subs[LAMBDA] = LAMBDA * s ** 2

    equations = []
    for comp in components:
        lead = _leading(comp.xreplace(subs), s)
        if lead is None:
            continue
        lead = _strip_monomial(lead, vs)
        if not lead.free_symbols & set(vs):
            return []  # nonzero for generic coefficients
        equations.append(lead)
    if len(equations) < len(vs):
        return []

    try:
        solutions = sympy.solve(equations, vs, dict=True)
    except NotImplementedError:
        warn("Classify", f"Could not solve the leading system on coordinates {[i + 1 for i in support]}.")
        return []

    jac = sympy.Matrix(equations).jacobian(vs)
    found: List[Branch] = []
    for sol in solutions:
        if any(v not in sol for v in vs) or any(sol[v].free_symbols & set(vs) for v in vs):
            continue
        if any(sympy.simplify(sol[v]) == 0 for v in vs):
            continue
        if any(not _same(eq.xreplace(sol), 0) for eq in equations):
            continue
        J = jac.xreplace(sol)
        det = sympy.simplify((J.T * J).det() if J.rows != J.cols else J.det())
        if det == 0:
            continue

        formulas = [sympy.Integer(0)] * len(u)
        for i, v in zip(support, vs):
            formulas[i] = sympy.simplify(sol[v])
        branch = Branch(support, scaling, tuple(formulas))

        partner = branch.partner()
        twin = next((b for b in found if all(_same(x, y) for x, y in zip(b.formulas, partner))), None)
        if twin is not None:
            if not all(_same(x, y) for x, y in zip(partner, branch.formulas)):
                found[found.index(twin)] = Branch(twin.support, twin.scaling, twin.formulas, True, twin.conditions)
            continue

        conditions = set()
        for i, k, v in zip(support, scaling, vs):
            conditions.update(_condition_factors(sol[v] ** 2 if k == 1 else sol[v], names))
        conditions.update(_condition_factors(det ** 2, names))
        found.append(Branch(support, scaling, tuple(formulas), False, tuple(sorted(conditions, key=str))))
    return found


def leading_branches(family: TaylorFamily) -> List[Branch]:
    """Trivial branch (when r(0; lambda) = 0) followed by every nondegenerate ansatz solution."""
    components = family.general()
    u = family.symbols
    branches: List[Branch] = []
    if family.has_trivial_solution:
        branches.append(Branch((), (), tuple(sympy.Integer(0) for _ in u)))
    for size in range(1, len(u) + 1):
        for support in itertools.combinations(range(len(u)), size):
            for scaling in itertools.product((1, 2), repeat=size):
                branches.extend(_solve_ansatz(components, u, family.names, support, scaling))
    return branches


def kind_of(branches: Sequence[Branch]) -> str:
    return kind_from_exponents(any(b.trivial for b in branches),
                               [b.exponent for b in branches if not b.trivial])


def kind_from_exponents(has_trivial: bool, exponents: Sequence[Fraction]) -> str:
    if not exponents:
        return NONE_GENERIC
    exponents = set(exponents)
    half, one = Fraction(1, 2), Fraction(1)
    if not has_trivial:
        return SADDLE_NODE if exponents == {half} else COMPOSITE
    if exponents == {one}:
        return TRANSCRITICAL
    if exponents == {half}:
        return PITCHFORK
    return COMPOSITE


def synchrony_tag(basis: sympy.Matrix, formulas: Sequence[sympy.Expr]) -> Partition:
    """Cells whose coordinates agree along the branch (d = 1)."""
    X = sympy.Matrix(basis) * sympy.Matrix(list(formulas))
    labels: List[int] = []
    reps: List[sympy.Expr] = []
    for value in X:
        for label, rep in enumerate(reps):
            if _same(value, rep):
                labels.append(label)
                break
        else:
            labels.append(len(reps))
            reps.append(value)
    return Partition.from_labels(labels)


def classify_family(family: TaylorFamily, basis: Optional[sympy.Matrix] = None) -> Tuple[str, Tuple[Branch, ...], Tuple[sympy.Expr, ...]]:
    branches = leading_branches(family)
    if basis is not None:
        branches = [Branch(b.support, b.scaling, b.formulas, b.symmetric, b.conditions,
                           synchrony_tag(basis, b.formulas)) for b in branches]
    conditions = sorted({c for b in branches for c in b.conditions}, key=str)
    return kind_of(branches), tuple(branches), tuple(conditions)


def classify_summand(rep: Representation, summand: Summand, index: int = 0, max_degree: int = 3) -> BifurcationClass:
    basis = sympy.ImmutableMatrix(summand.basis)
    if not summand.indecomposable:
        return BifurcationClass(index, NONE_GENERIC, (), (), basis, summand.type_label,
                                notes=f"summand is unresolved: {summand.notes}")
    if summand.type_label in (COMPLEX, QUATERNIONIC):
        return BifurcationClass(index, NONE_GENERIC, (), (), basis, summand.type_label,
                                notes=f"no generic steady-state bifurcation along a summand of {summand.type_label} type")

    family = equivariant_taylor_family(rep.restrict(basis), max_degree)
    kind, branches, conditions = classify_family(family, basis if rep.dim_v == 1 else None)
    log("Classify", f"Summand {index + 1} (dim {summand.dim}): {kind}, {len(branches)} branch(es).")
    return BifurcationClass(index, kind, branches, conditions, basis, summand.type_label, family)


def classify_codim1(rep: Representation, decomposition: DecompositionReport,
                    max_degree: int = 3) -> ClassificationReport:
    if not decomposition.multiplicity_free:
        warn("Classify", "Decomposition is not multiplicity-free; refusing to classify.")
        return ClassificationReport((), False, HYPOTHESIS_VIOLATED)
    classes = tuple(classify_summand(rep, s, i, max_degree) for i, s in enumerate(decomposition.summands))
    return ClassificationReport(classes, True)


# --- Concrete instances ---

@dataclass(frozen=True)
class InstanceReport:
    """Classification of a concrete response function at (X0, lambda0)."""

    status: str
    X0: Tuple[float, ...]
    lambda0: float
    reduced: Optional[ReducedTaylor] = None
    bifurcation: Optional[BifurcationClass] = None
    values: Dict[sympy.Symbol, sympy.Expr] = field(default_factory=dict)
    failing: Tuple[sympy.Expr, ...] = ()
    predicted: Tuple[Branch, ...] = ()
    reason: str = ""

    @property
    def generic(self) -> bool:
        return self.status == GENERIC_INSTANCE

    def points(self, mu: float) -> List[Tuple[Branch, np.ndarray]]:
        """Leading-order points of the predicted branches at lambda = lambda0 + mu; complex values are skipped."""
        if self.reduced is None:
            return []
        K = np.array(self.reduced.kernel_basis.tolist(), dtype=float)
        X0 = np.asarray(self.X0, dtype=float)
        out = []
        for branch in self.predicted:
            for member in branch.members():
                values = [complex(sympy.N(f.xreplace({LAMBDA: mu}))) for f in member]
                if any(abs(v.imag) > 1e-12 * (1.0 + abs(v.real)) for v in values):
                    continue
                out.append((branch, X0 + K @ np.array([v.real for v in values])))
        return out

    def to_dict(self) -> Dict[str, Any]:
        return {
            "status": self.status,
            "reason": self.reason,
            "X0": list(self.X0),
            "lambda0": self.lambda0,
            "reduced": self.reduced.to_dict() if self.reduced else None,
            "classification": self.bifurcation.to_dict() if self.bifurcation else None,
            "coefficients": coefficient_values_text(self.values),
            "failing_conditions": [f"{expr_to_text(c)} = 0" for c in self.failing],
            "predicted": [b.to_dict() for b in self.predicted],
        }


def classify_instance(fund: FundamentalNetwork, rf: ResponseFunction, X0: Sequence[Any],
                      lambda0: Any = 0, seed: Optional[int] = None, max_degree: int = 3) -> InstanceReport:
    """
    Reduces rf exactly at (X0, lambda0), reads off the named coefficients of
    the equivariant family on ker L0^S, and checks the genericity conditions.
    """
    rep = rep_matrices(fund, rf.dim)
    reduced = reduced_taylor(fund, rep, rf, X0, lambda0, max_degree)
    point = tuple(float(v) for v in X0)
    if reduced.kernel_dim == 0:
        return InstanceReport(REGULAR_POINT, point, float(lambda0), reduced, reason="L0 is invertible")

    local_dec = decompose(reduced.local, seed)
    summand = local_dec.summands[0]
    if len(local_dec.summands) != 1 or not summand.indecomposable:
        return InstanceReport(NON_GENERIC_INSTANCE, point, float(lambda0), reduced,
                              reason=f"ker L0^S splits into {len(local_dec.summands)} summands")
    if summand.type_label != REAL:
        cls = BifurcationClass(0, NONE_GENERIC, (), (), reduced.kernel_basis, summand.type_label,
                               notes=f"kernel is of {summand.type_label} type")
        return InstanceReport(NONE_GENERIC, point, float(lambda0), reduced, cls)

    family = equivariant_taylor_family(reduced.local, max_degree)
    kind, branches, conditions = classify_family(family, reduced.kernel_basis if rf.dim == 1 else None)
    cls = BifurcationClass(0, kind, branches, conditions, reduced.kernel_basis, summand.type_label, family,
                           notes="coordinates are taken along ker L0^S")
    values = family.coefficients_of(reduced.components)
    if values is None:
        raise IllConditioned("Reduced Taylor polynomial is not a member of the equivariant family.",
                             {"components": [expr_to_text(c) for c in reduced.components]})

    failing = tuple(c for c in conditions if sympy.simplify(c.xreplace(values)) == 0)
    if failing:
        log("Classify", f"Instance fails {len(failing)} genericity condition(s).")
        return InstanceReport(NON_GENERIC_INSTANCE, point, float(lambda0), reduced, cls, values, failing,
                              reason="a genericity coefficient vanishes")
    predicted = tuple(b.substitute(values) for b in branches)
    return InstanceReport(GENERIC_INSTANCE, point, float(lambda0), reduced, cls, values, (), predicted)
