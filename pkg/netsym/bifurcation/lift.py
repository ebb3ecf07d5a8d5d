# ================================================
# File: netsym/bifurcation/lift.py
# ================================================
# x is an equilibrium of the original network iff every pi_i(x) is an
# equilibrium of the fundamental network. Since pi_i(x) at the unit cell is
# x_i, each x_i is the unit coordinate of some fundamental equilibrium.
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy

from ..config import EQUILIBRIUM_TOL
from ..dsl.expression import expr_to_text
from ..dsl.grammar import LAMBDA
from ..errors import InvalidConfig, NotAMonoid
from ..network.fundamental import conjugation_maps
from ..network.monoid import NetworkSpec, is_closed
from ..synchrony.balanced import Partition
from ..utils.helpers import log, resolve_seed
from .classify import BifurcationClass, NONE_GENERIC, kind_from_exponents

# lambda values at which formulas are compared
_PROBE_LAMBDAS = (0.0137, -0.0219, 0.0311)


@dataclass(frozen=True)
class LiftedBranch:
    cells: Tuple[Tuple[sympy.Expr, ...], ...]
    exponent: Optional[Fraction]
    synchrony: Partition
    sources: Tuple[int, ...]

    @property
    def trivial(self) -> bool:
        return self.exponent is None

    def to_dict(self, var: str = "x") -> Dict[str, Any]:
        d = len(self.cells[0]) if self.cells else 1
        names = [f"{var}{i + 1}" if d == 1 else f"{var}{i + 1}_{c + 1}"
                 for i in range(len(self.cells)) for c in range(d)]
        values = [expr_to_text(v) for cell in self.cells for v in cell]
        return {
            "state": [f"{n} = {v}" for n, v in zip(names, values)],
            "exponent": str(self.exponent) if self.exponent is not None else None,
            "synchrony": str(self.synchrony),
            "fundamental_members": [s + 1 for s in self.sources],
        }


@dataclass(frozen=True)
class LiftReport:
    summand: int
    fundamental_kind: str
    kind: str
    branches: Tuple[LiftedBranch, ...]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "summand": self.summand + 1,
            "fundamental_kind": self.fundamental_kind,
            "kind": self.kind,
            "branches": [b.to_dict() for b in self.branches],
        }


def _unit(spec: NetworkSpec) -> int:
    if not is_closed(spec):
        raise NotAMonoid("Lifting needs a network whose maps are closed under composition.")
    unit = spec.identity_index()
    if unit is None:
        raise NotAMonoid("Lifting needs the identity among the input maps; run monoid completion first.")
    return unit


def _lift(spec: NetworkSpec, d: int, members: Sequence[np.ndarray], tol: float) -> List[Tuple[Tuple[int, ...], List[int]]]:
    """
    members[m] has shape (n*d, probes). Returns, for every original state
    whose images all lie among the members, the member index chosen per cell
    and the member indices hit by pi_1..pi_N.
    """
    unit = _unit(spec)
    N = spec.num_cells
    P = [np.array(M.tolist(), dtype=float) for M in conjugation_maps(spec, d)]

    def same(a: np.ndarray, b: np.ndarray) -> bool:
        return bool(np.all(np.abs(a - b) <= tol * (1.0 + np.abs(b))))

    # distinct unit-cell values, each remembered by the first member carrying it
    candidates: List[int] = []
    for m, X in enumerate(members):
        block = X[unit * d:(unit + 1) * d]
        if not any(same(block, members[c][unit * d:(unit + 1) * d]) for c in candidates):
            candidates.append(m)

    found = []
    for choice in itertools.product(candidates, repeat=N):
        x = np.concatenate([members[m][unit * d:(unit + 1) * d] for m in choice])
        hits = []
        for Pi in P:
            image = Pi @ x
            hit = next((m for m, X in enumerate(members) if same(image, X)), None)
            if hit is None:
                break
            hits.append(hit)
        else:
            found.append((choice, hits))
    return found


def lift_equilibria(spec: NetworkSpec, equilibria: Sequence[Sequence[float]], d: int = 1,
                    tol: float = EQUILIBRIUM_TOL) -> List[np.ndarray]:
    """Original-network states x with every pi_i(x) among the given fundamental equilibria."""
    members = [np.asarray(X, dtype=float).reshape(-1, 1) for X in equilibria]
    if any(X.shape[0] != spec.size * d for X in members):
        raise InvalidConfig(f"Fundamental equilibria must have {spec.size * d} entries.")
    unit = _unit(spec)
    lifted = [np.concatenate([members[m][unit * d:(unit + 1) * d, 0] for m in choice])
              for choice, _ in _lift(spec, d, members, tol)]
    log("Lift", f"{len(lifted)} original equilibria from {len(members)} fundamental ones.")
    return lifted


def _probe(exprs: Sequence[sympy.Expr], values: Sequence[Dict[sympy.Symbol, float]]) -> np.ndarray:
    return np.array([[complex(sympy.N(e.xreplace(v))) for v in values] for e in exprs])


def _order(expr: sympy.Expr, values: Dict[sympy.Symbol, float]) -> Optional[Fraction]:
    """Leading power of lambda, to the nearest half, read off two small lambda values."""
    if expr == 0:
        return None
    near, far = 1e-8, 1e-4
    magnitudes = [abs(complex(sympy.N(expr.xreplace({**values, LAMBDA: lam})))) for lam in (near, far)]
    if min(magnitudes) == 0.0:
        return None
    slope = np.log(magnitudes[1] / magnitudes[0]) / np.log(far / near)
    return Fraction(int(round(2 * slope)), 2)


def lift_to_original(spec: NetworkSpec, bifurcation: BifurcationClass, seed: Optional[int] = None) -> LiftReport:
    """
    Original-network branches along one summand from the fundamental
    branches of its classification. Formulas are compared at random values
    of the named coefficients and a few lambda probes.
    """
    basis = sympy.Matrix(bifurcation.basis)
    n = spec.size
    if basis.rows % n:
        raise InvalidConfig(f"Summand basis has {basis.rows} rows, not a multiple of {n} cells.")
    d = basis.rows // n

    members: List[Tuple[sympy.Expr, ...]] = []
    exponents: List[Optional[Fraction]] = []
    for branch in bifurcation.branches:
        for member in branch.members():
            members.append(tuple(basis * sympy.Matrix(list(member))))
            exponents.append(branch.exponent)
    if not members:
        return LiftReport(bifurcation.summand, bifurcation.kind, NONE_GENERIC, ())

    names = sorted({s for X in members for e in X for s in e.free_symbols} - {LAMBDA}, key=str)
    rng = np.random.default_rng(resolve_seed(seed))
    probes = []
    for lam in _PROBE_LAMBDAS:
        values = {s: float(rng.uniform(0.5, 2.0) * rng.choice((-1.0, 1.0))) for s in names}
        values[LAMBDA] = lam
        probes.append(values)
    fingerprints = [_probe(X, probes) for X in members]

    unit = _unit(spec)
    lifted = []
    for choice, hits in _lift(spec, d, fingerprints, 1e-9):
        cells = tuple(tuple(members[m][unit * d:(unit + 1) * d]) for m in choice)
        orders = [_order(e, probes[0]) for cell in cells for e in cell]
        orders = [o for o in orders if o is not None]
        exponent = min(orders) if orders else None
        labels, seen = [], []
        for m in choice:
            fp = fingerprints[m][unit * d:(unit + 1) * d]
            index = next((k for k, other in enumerate(seen) if np.allclose(fp, other, rtol=1e-9, atol=1e-12)), None)
            if index is None:
                seen.append(fp)
                index = len(seen) - 1
            labels.append(index)
        lifted.append(LiftedBranch(cells, exponent, Partition.from_labels(labels), tuple(sorted(set(hits)))))

    kind = kind_from_exponents(any(b.trivial for b in lifted), [b.exponent for b in lifted if not b.trivial])
    log("Lift", f"Summand {bifurcation.summand + 1}: {len(lifted)} original branch member(s), {kind}.")
    return LiftReport(bifurcation.summand, bifurcation.kind, kind, tuple(lifted))
