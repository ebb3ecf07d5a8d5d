# ================================================
# File: netsym/simulator/verify.py
# ================================================
from dataclasses import dataclass
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from ..config import EQUILIBRIUM_TOL
from ..dsl.expression import ResponseFunction
from ..dsl.network_ops import extend_arity
from ..network.fundamental import FundamentalNetwork, conjugation_maps, fundamental_network
from ..network.monoid import NetworkSpec, monoid_completion
from ..synchrony.balanced import Partition, SynchronySpace
from ..utils.helpers import log, warn
from .field import NetworkVectorField
from .integrate import integrate


def as_monoid(spec: NetworkSpec, rf: ResponseFunction) -> Tuple[NetworkSpec, ResponseFunction, FundamentalNetwork]:
    """Monoid completion of spec with rf adapted to it; gamma_f is unchanged."""
    completed = monoid_completion(spec)
    adapted = extend_arity(rf, spec, completed)
    return completed, adapted, fundamental_network(completed)


def verify_semiconjugacy(spec: NetworkSpec, rf: ResponseFunction, x0: Sequence[float],
                         t_end: float, dt: float, lam: float = 0.0) -> float:
    """max over i and t of |pi_i(x(t)) - X_(i)(t)|, X_(i) started from pi_i(x0)."""
    completed, adapted, fund = as_monoid(spec, rf)
    d = rf.dim
    original = integrate(NetworkVectorField(completed, adapted), x0, lam, t_end, dt)
    fundamental = NetworkVectorField.fundamental(fund, adapted)

    worst = 0.0
    for i, P in enumerate(conjugation_maps(completed, d)):
        P = np.array(P.tolist(), dtype=float)
        image = integrate(fundamental, P @ np.asarray(x0, dtype=float), lam, t_end, dt)
        diff = original.states @ P.T - image.states
        worst = max(worst, float(np.max(np.abs(diff))) if diff.size else 0.0)
    log("Verify", f"Semiconjugacy residual {worst:.3e} over {completed.num_cells} conjugation maps.")
    return worst


@dataclass(frozen=True)
class EquilibriumCheck:
    original_residual: float
    fundamental_residuals: Tuple[float, ...]
    tol: float

    @property
    def original_is_equilibrium(self) -> bool:
        return self.original_residual < self.tol

    @property
    def images_are_equilibria(self) -> bool:
        return all(r < self.tol for r in self.fundamental_residuals)

    @property
    def agree(self) -> bool:
        return self.original_is_equilibrium == self.images_are_equilibria

    def __bool__(self) -> bool:
        return self.agree

    def to_dict(self) -> Dict[str, Any]:
        return {
            "agree": self.agree,
            "original_is_equilibrium": self.original_is_equilibrium,
            "images_are_equilibria": self.images_are_equilibria,
            "original_residual": self.original_residual,
            "fundamental_residuals": list(self.fundamental_residuals),
            "tol": self.tol,
        }


def verify_equilibrium_correspondence(spec: NetworkSpec, rf: ResponseFunction, x: Sequence[float],
                                      lam: float = 0.0, tol: float = EQUILIBRIUM_TOL) -> EquilibriumCheck:
    """x is an equilibrium of gamma_f iff every pi_i(x) is an equilibrium of Gamma_f."""
    completed, adapted, fund = as_monoid(spec, rf)
    x = np.asarray(x, dtype=float)
    original = NetworkVectorField(completed, adapted).residual(x, lam)
    fundamental = NetworkVectorField.fundamental(fund, adapted)
    images = tuple(
        fundamental.residual(np.array(P.tolist(), dtype=float) @ x, lam)
        for P in conjugation_maps(completed, rf.dim)
    )
    check = EquilibriumCheck(original, images, tol)
    if not check.agree:
        warn("Verify", f"Equilibrium correspondence disagrees: original {original:.3e}, images {list(images)}.")
    return check


def verify_synchrony_invariance(spec: NetworkSpec, rf: ResponseFunction, partition: Partition,
                                x0: Sequence[float], lam: float, t_end: float, dt: float) -> float:
    """Largest distance from Syn_P along the trajectory started at the projection of x0 onto Syn_P."""
    space = SynchronySpace(partition, rf.dim)
    B = np.array(space.basis.tolist(), dtype=float)
    start = B @ np.linalg.lstsq(B, np.asarray(x0, dtype=float), rcond=None)[0]
    trajectory = integrate(NetworkVectorField(spec, rf), start, lam, t_end, dt)
    return max(space.distance(x) for x in trajectory.states)


def semiconjugacy_report(spec: NetworkSpec, rf: ResponseFunction, x0: Sequence[float],
                         t_end: float, dt: float, lam: float = 0.0) -> Dict[str, Any]:
    residual = verify_semiconjugacy(spec, rf, x0, t_end, dt, lam)
    check = verify_equilibrium_correspondence(spec, rf, x0, lam)
    return {
        "semiconjugacy_residual": residual,
        "equilibrium_correspondence": check.to_dict(),
        "t_end": t_end,
        "dt": dt,
        "lambda": lam,
    }
