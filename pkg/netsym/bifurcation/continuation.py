# ================================================
# File: netsym/bifurcation/continuation.py
# ================================================
import csv
import io
import itertools
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
import sympy

from ..config import (
    BLOWUP_THRESHOLD, CLUSTER_TOL, COEFFICIENT_RTOL, EQUILIBRIUM_TOL, EXPONENT_TOL,
    FIT_POINTS_PER_DECADE, LS_MAX_ITER, MAX_CONTINUATION_STEPS, MIN_STEP, NEWTON_TOL,
    SWITCH_PERTURBATION,
)
from ..dsl.expression import ResponseFunction
from ..dsl.grammar import LAMBDA
from ..errors import InvalidConfig, NetsymError, NoConvergence, NotEquilibrium, StepUnderflow
from ..network.fundamental import FundamentalNetwork
from ..simulator.field import NetworkVectorField
from ..utils.helpers import log, resolve_seed, warn
from .jordan import jordan_chevalley

_TRIVIAL_NORM = 1e-9
_SAME_BRANCH_COS = 0.9
_CORRECTOR_ITER = 20


@dataclass(frozen=True)
class ContinuationRun:
    """
    One local branch through (X0, lambda0), ordered along the curve.
    `exponent` is the fitted slope of log|X - X0| against log|lambda - lambda0|
    (None for the trivial branch and for a regular point).
    """

    lambdas: np.ndarray
    states: np.ndarray
    residuals: np.ndarray
    exponent: Optional[float]
    coefficients: Optional[np.ndarray]
    trivial: bool = False
    switched: bool = False
    sides: Tuple[int, ...] = ()
    fit: Dict[str, Any] = field(default_factory=dict, compare=False)

    @property
    def size(self) -> int:
        return len(self.lambdas)

    @property
    def max_residual(self) -> float:
        return float(np.max(self.residuals)) if self.residuals.size else 0.0

    def state_at(self, lam: float) -> Optional[np.ndarray]:
        """Nearest stored point to lam; None when lam lies outside the run."""
        if not self.size or lam < self.lambdas.min() or lam > self.lambdas.max():
            return None
        return self.states[int(np.argmin(np.abs(self.lambdas - lam)))]

    def to_csv(self, var: str = "X") -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["lambda"] + [f"{var}{k + 1}" for k in range(self.states.shape[1])] + ["residual"])
        for lam, x, res in zip(self.lambdas, self.states, self.residuals):
            writer.writerow([repr(float(lam))] + [repr(float(v)) for v in x] + [repr(float(res))])
        return buffer.getvalue()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "points": self.size,
            "lambda_range": [float(self.lambdas.min()), float(self.lambdas.max())] if self.size else [],
            "exponent": self.exponent,
            "coefficients": self.coefficients.tolist() if self.coefficients is not None else None,
            "trivial": self.trivial,
            "switched": self.switched,
            "sides": list(self.sides),
            "max_residual": self.max_residual,
            "fit": self.fit,
        }


class _Restricted:
    """Gamma on X0 + span(B), in coordinates y: F(y) = B^+ Gamma(X0 + B y)."""

    def __init__(self, vector_field: NetworkVectorField, X0: np.ndarray, basis: Optional[np.ndarray]):
        self.vector_field = vector_field
        self.X0 = X0
        self.B = np.eye(vector_field.dim) if basis is None else basis
        self.B_pinv = np.linalg.pinv(self.B)
        self.dim = self.B.shape[1]

    def state(self, y: np.ndarray) -> np.ndarray:
        return self.X0 + self.B @ y

    def F(self, y: np.ndarray, lam: float) -> np.ndarray:
        return self.B_pinv @ self.vector_field(self.state(y), lam)

    def J(self, y: np.ndarray, lam: float) -> Tuple[np.ndarray, np.ndarray]:
        J, dlam = self.vector_field.jacobian(self.state(y), lam)
        return self.B_pinv @ J @ self.B, self.B_pinv @ dlam

    def leak(self, y: np.ndarray, lam: float) -> float:
        """Component of Gamma leaving the subspace."""
        G = self.vector_field(self.state(y), lam)
        return float(np.linalg.norm(G - self.B @ (self.B_pinv @ G)))


@dataclass
class _Half:
    side: int
    mus: List[float]
    ys: List[np.ndarray]
    exponent_hint: Optional[float] = None
    outward: List[Tuple[float, np.ndarray]] = field(default_factory=list)

    @property
    def trivial(self) -> bool:
        return float(np.linalg.norm(self.ys[-1])) < _TRIVIAL_NORM


def _newton(problem: _Restricted, y: np.ndarray, lam: float, tol: float) -> Optional[np.ndarray]:
    y = np.array(y, dtype=float)
    for _ in range(LS_MAX_ITER):
        try:
            F = problem.F(y, lam)
        except NetsymError:
            return None
        if not np.all(np.isfinite(F)):
            return None
        if np.linalg.norm(F) < tol:
            return y
        J, _ = problem.J(y, lam)
        y = y + np.linalg.lstsq(J, -F, rcond=None)[0]
        if not np.all(np.isfinite(y)) or np.linalg.norm(y) > BLOWUP_THRESHOLD:
            return None
    return None


def _corrector(problem: _Restricted, Zp: np.ndarray, tau: np.ndarray, tol: float) -> Optional[np.ndarray]:
    Z = Zp.copy()
    for _ in range(_CORRECTOR_ITER):
        try:
            F = problem.F(Z[:-1], Z[-1])
        except NetsymError:
            return None
        R = np.append(F, tau @ (Z - Zp))
        if not np.all(np.isfinite(R)):
            return None
        if np.linalg.norm(R) < tol:
            return Z
        J, dlam = problem.J(Z[:-1], Z[-1])
        M = np.vstack([np.hstack([J, dlam[:, None]]), tau[None, :]])
        Z = Z + np.linalg.lstsq(M, -R, rcond=None)[0]
    return None


def _tangent(problem: _Restricted, Z: np.ndarray, previous: np.ndarray) -> np.ndarray:
    J, dlam = problem.J(Z[:-1], Z[-1])
    tau = np.linalg.svd(np.hstack([J, dlam[:, None]]))[2][-1]
    return -tau if tau @ previous < 0 else tau


def _arclength(problem: _Restricted, Z: np.ndarray, hint: np.ndarray, lam_range: Tuple[float, float],
               step: float, tol: float, lambda0: float, inner: Optional[float]) -> List[Tuple[float, np.ndarray]]:
    """Pseudo-arclength from Z in the direction of hint until the branch leaves the window."""
    points: List[Tuple[float, np.ndarray]] = []
    tau = hint / np.linalg.norm(hint)
    h = step
    for _ in range(MAX_CONTINUATION_STEPS):
        tau = _tangent(problem, Z, tau)
        while True:
            Zc = _corrector(problem, Z + h * tau, tau, tol)
            if Zc is not None and np.linalg.norm(Zc - Z) < 2 * h:
                break
            h /= 2
            if h < MIN_STEP:
                raise StepUnderflow(f"Continuation step fell below {MIN_STEP:g} at lambda = {Z[-1]:.6g}.",
                                    {"lambda": float(Z[-1]), "state": problem.state(Z[:-1]).tolist()})
        Z = Zc
        h = min(2 * h, step)
        lam = float(Z[-1])
        if not lam_range[0] <= lam <= lam_range[1]:
            break
        if inner is not None and abs(lam - lambda0) < inner:
            break
        points.append((lam, Z[:-1].copy()))
        if np.linalg.norm(problem.state(Z[:-1])) > BLOWUP_THRESHOLD:
            break
    else:
        warn("Continuation", f"Stopped after {MAX_CONTINUATION_STEPS} steps at lambda = {Z[-1]:.6g}.")
    return points


def fit_decade(lambda0: float, lam_range: Tuple[float, float], step: float, side: int) -> Optional[Tuple[float, float]]:
    """(lo, hi) offsets of the decade nearest lambda0 on one side, or None when the range ends at lambda0."""
    extent = lam_range[1] - lambda0 if side > 0 else lambda0 - lam_range[0]
    if extent <= 0:
        return None
    hi = min(10.0 ** np.floor(np.log10(min(step, extent))), 1e-2)
    return hi / 10.0, hi


def _starts(K: np.ndarray, hi: float, rng: np.random.Generator) -> List[np.ndarray]:
    k = K.shape[1]
    dirs = [s * K[:, i] for i in range(k) for s in (1, -1)]
    for i, j in itertools.combinations(range(k), 2):
        dirs += [s * (K[:, i] + t * K[:, j]) / np.sqrt(2) for s in (1, -1) for t in (1, -1)]
    for _ in range(4 * k):
        v = K @ rng.standard_normal(k)
        dirs.append(v / np.linalg.norm(v))
    radii = sorted({hi / 2, hi, 2 * hi, np.sqrt(hi) / 2, np.sqrt(hi), 2 * np.sqrt(hi)})
    # off-axis offset so Newton can leave symmetric subspaces
    return [r * d + SWITCH_PERTURBATION * rng.standard_normal(K.shape[0]) for d in dirs for r in radii]


def _is_new(y: np.ndarray, found: Sequence[np.ndarray], scale: float) -> bool:
    return all(np.linalg.norm(y - z) > 1e-6 * max(scale, float(np.linalg.norm(y))) for z in found)


def _track_inward(problem: _Restricted, y_hi: np.ndarray, lambda0: float, side: int,
                  lo: float, hi: float, tol: float) -> Optional[_Half]:
    mus = np.logspace(np.log10(lo), np.log10(hi), FIT_POINTS_PER_DECADE)[::-1]
    half = _Half(side, [float(mus[0])], [y_hi])
    for mu in mus[1:]:
        mu_prev, y_prev = half.mus[-1], half.ys[-1]
        norm_prev = float(np.linalg.norm(y_prev))
        ratio = mu / mu_prev
        guesses = [half.exponent_hint] if half.exponent_hint is not None else [1.0, 0.5]
        accepted = None
        for e in guesses:
            y = _newton(problem, y_prev * ratio ** e, lambda0 + side * mu, tol)
            if y is None:
                continue
            norm = float(np.linalg.norm(y))
            if norm_prev < _TRIVIAL_NORM:
                ok = norm < _TRIVIAL_NORM
            else:
                cos = float(y @ y_prev) / (norm * norm_prev) if norm > 0 else -1.0
                ok = cos > _SAME_BRANCH_COS and norm_prev * ratio ** 2 < norm < norm_prev
            if ok:
                accepted = y
                break
        if accepted is None:
            return None
        half.mus.append(float(mu))
        half.ys.append(accepted)
        if norm_prev >= _TRIVIAL_NORM:
            half.exponent_hint = float(np.clip(np.log(np.linalg.norm(accepted) / norm_prev) / np.log(ratio), 0.25, 2.0))
    half.mus.reverse()
    half.ys.reverse()
    return half


def _local_halves(problem: _Restricted, K: np.ndarray, lambda0: float, lam_range: Tuple[float, float],
                  step: float, tol: float, seed: int, extra: Dict[int, List[np.ndarray]]) -> List[_Half]:
    rng = np.random.default_rng(seed)
    halves: List[_Half] = []
    for side in (1, -1):
        decade = fit_decade(lambda0, lam_range, step, side)
        if decade is None:
            continue
        lo, hi = decade
        lam = lambda0 + side * hi
        cap = 10.0 * max(np.sqrt(hi), hi)
        roots: List[np.ndarray] = []
        for start in [np.zeros(problem.dim)] + extra.get(side, []) + _starts(K, hi, rng):
            y = _newton(problem, start, lam, tol)
            if y is not None and np.linalg.norm(y) <= cap and _is_new(y, roots, hi):
                roots.append(y)
        log("Continuation", f"{len(roots)} equilibria near the start point at lambda = {lam:.6g}.")
        for y in roots:
            half = _track_inward(problem, y, lambda0, side, lo, hi, tol)
            if half is None:
                log("Continuation", f"Discarded a root at lambda = {lam:.6g} that does not shrink toward the start point.")
                continue
            if not half.trivial and np.linalg.norm(half.ys[0]) >= 0.75 * np.linalg.norm(half.ys[-1]):
                continue
            halves.append(half)
    return halves


def _pair(halves: List[_Half], problem: _Restricted) -> List[Tuple[_Half, ...]]:
    """
    Trivial halves pair across sides. Nontrivial halves pair when their
    directions are opposite: across sides for exponent near 1, on the same
    side for exponent near 1/2.
    """
    trivial = [h for h in halves if h.trivial]
    rest = [h for h in halves if not h.trivial]
    groups: List[Tuple[_Half, ...]] = [tuple(trivial)] if trivial else []

    def direction(h: _Half) -> np.ndarray:
        v = problem.B @ h.ys[-1]
        return v / np.linalg.norm(v)

    candidates = []
    for a, b in itertools.combinations(range(len(rest)), 2):
        A, B = rest[a], rest[b]
        ea, eb = A.exponent_hint or 1.0, B.exponent_hint or 1.0
        if abs(ea - eb) > 0.25:
            continue
        if (A.side == B.side) != (ea < 0.75):
            continue
        cos = float(direction(A) @ direction(B))
        if cos < -_SAME_BRANCH_COS:
            candidates.append((cos, a, b))
    used = set()
    for _, a, b in sorted(candidates):
        if a in used or b in used:
            continue
        used.update((a, b))
        groups.append((rest[a], rest[b]))
    groups.extend((h,) for i, h in enumerate(rest) if i not in used)
    return groups


def _fit(group: Tuple[_Half, ...], problem: _Restricted) -> Tuple[Optional[float], Optional[np.ndarray], Dict[str, Any]]:
    if all(h.trivial for h in group):
        return None, None, {}
    mus = np.concatenate([np.asarray(h.mus) for h in group])
    norms = np.concatenate([[np.linalg.norm(problem.B @ y) for y in h.ys] for h in group])
    slope, intercept = np.polyfit(np.log(mus), np.log(norms), 1)

    first = sorted(group, key=lambda h: -h.side)[0]
    mu = np.asarray(first.mus)
    X = np.array([problem.B @ y for y in first.ys])
    if abs(slope - 1.0) < abs(slope - 0.5):
        t = first.side * mu
        design, basis = np.stack([t, t ** 2], axis=1), "lambda"
    else:
        design, basis = np.stack([np.sqrt(mu), mu], axis=1), "sqrt|lambda|"
    coef = np.linalg.lstsq(design, X, rcond=None)[0][0]
    fit = {"points": int(mus.size), "decade": [float(mu.min()), float(mu.max())],
           "intercept": float(intercept), "coefficient_basis": basis, "side": first.side}
    return float(slope), coef, fit


def _run_from(group: Tuple[_Half, ...], problem: _Restricted, lambda0: float, switched: bool) -> ContinuationRun:
    sequences = []
    for h in group:
        inner = [(lambda0 + h.side * mu, y) for mu, y in zip(h.mus, h.ys)]
        sequences.append(inner + h.outward)
    ordered = list(reversed(sequences[0])) + [(lambda0, np.zeros(problem.dim))]
    for seq in sequences[1:]:
        ordered += seq
    return _assemble(ordered, problem, group, switched)


def _assemble(ordered: List[Tuple[float, np.ndarray]], problem: _Restricted,
              group: Tuple[_Half, ...], switched: bool) -> ContinuationRun:
    lambdas = np.array([lam for lam, _ in ordered])
    states = np.array([problem.state(y) for _, y in ordered])
    residuals = np.array([problem.vector_field.residual(x, lam) for lam, x in zip(lambdas, states)])
    exponent, coef, fit = _fit(group, problem) if group else (None, None, {})
    return ContinuationRun(lambdas, states, residuals, exponent, coef,
                           trivial=bool(group) and all(h.trivial for h in group), switched=switched,
                           sides=tuple(h.side for h in group), fit=fit)


def continue_branches(fund: FundamentalNetwork, rf: ResponseFunction, X0: Sequence[float],
                      lambda_range: Tuple[float, float], step: float = 1e-2, lambda0: float = 0.0,
                      subspace: Optional[Any] = None, seed: Optional[int] = None,
                      tol: float = NEWTON_TOL, predictions: Optional[Any] = None) -> List[ContinuationRun]:
    """
    Local branches of the fundamental network through an equilibrium (X0, lambda0).

    At a regular point the single branch is continued both ways. At a
    singular point, roots at lambda0 +/- hi are found by Newton from starts
    along the generalized kernel of the Jacobian, each is tracked inward over
    the decade [hi/10, hi] for the exponent fit and outward by pseudo-arclength
    to the ends of lambda_range. `subspace` (column basis) restricts the search
    to X0 + span(subspace). `predictions` is an InstanceReport whose leading
    order points are used as extra starts.
    """
    a, b = float(lambda_range[0]), float(lambda_range[1])
    if not a < b:
        raise InvalidConfig(f"Empty parameter range [{a}, {b}].")
    if not a <= lambda0 <= b:
        raise InvalidConfig(f"lambda0 = {lambda0} lies outside [{a}, {b}].")
    if step <= 0:
        raise InvalidConfig(f"Continuation step must be positive, got {step}.")

    vf = NetworkVectorField.fundamental(fund, rf)
    X0 = np.asarray(X0, dtype=float)
    if X0.shape != (vf.dim,):
        raise InvalidConfig(f"Start point has {X0.size} entries, expected {vf.dim}.")
    basis = None
    if subspace is not None:
        basis = np.asarray(sympy.Matrix(subspace).tolist() if isinstance(subspace, sympy.MatrixBase) else subspace,
                           dtype=float)
        if (basis.ndim != 2 or basis.shape[0] != vf.dim or basis.shape[1] == 0
                or np.linalg.matrix_rank(basis) != basis.shape[1]):
            raise InvalidConfig("Subspace basis must be a full-rank matrix with one row per state coordinate.",
                                {"shape": list(basis.shape)})
    problem = _Restricted(vf, X0, basis)

    residual = vf.residual(X0, lambda0)
    if residual >= max(tol, EQUILIBRIUM_TOL):
        raise NotEquilibrium(f"Start point is not an equilibrium (residual {residual:.3e}).", {"residual": residual})

    y0 = np.zeros(problem.dim)
    J0, dlam0 = problem.J(y0, lambda0)
    S = np.real(np.asarray(jordan_chevalley(J0).S, dtype=complex)) if problem.dim else J0
    K = scipy.linalg.null_space(S, rcond=CLUSTER_TOL) if problem.dim else np.zeros((0, 0))
    seed = resolve_seed(seed)

    if K.shape[1] == 0:
        log("Continuation", "Regular start point; continuing a single branch.")
        Z0 = np.append(y0, lambda0)
        hint = np.append(np.linalg.solve(J0, -dlam0), 1.0)
        forward = _arclength(problem, Z0, hint, (a, b), step, tol, lambda0, None)
        backward = _arclength(problem, Z0, -hint, (a, b), step, tol, lambda0, None)
        ordered = list(reversed(backward)) + [(lambda0, y0)] + forward
        run = _assemble(ordered, problem, (), False)
        slope = problem.B @ (hint[:-1])
        return [ContinuationRun(run.lambdas, run.states, run.residuals, None, slope, sides=(1, -1))]

    if basis is not None and problem.leak(K[:, 0] * 1e-3, lambda0) > 1e-6:
        warn("Continuation", "Subspace does not look invariant; branches are equilibria of the projected field.")

    extra: Dict[int, List[np.ndarray]] = {1: [], -1: []}
    if predictions is not None:
        for side in (1, -1):
            decade = fit_decade(lambda0, (a, b), step, side)
            if decade is not None:
                extra[side] = [problem.B_pinv @ (x - X0) for _, x in predictions.points(side * decade[1])]

    halves = _local_halves(problem, K, lambda0, (a, b), step, tol, seed, extra)
    if not halves:
        raise NoConvergence("No equilibrium branch found near the start point.",
                            {"lambda0": lambda0, "kernel_dim": int(K.shape[1])})

    for half in halves:
        Z_hi = np.append(half.ys[-1], lambda0 + half.side * half.mus[-1])
        Z_in = np.append(half.ys[-2], lambda0 + half.side * half.mus[-2])
        half.outward = _arclength(problem, Z_hi, Z_hi - Z_in, (a, b), step, tol, lambda0, half.mus[0])

    runs = [_run_from(group, problem, lambda0, not all(h.trivial for h in group))
            for group in _pair(halves, problem)]
    log("Continuation", f"{len(runs)} branch(es); exponents {[r.exponent for r in runs]}.")
    return runs




# --- Comparison with predicted branches ---

def predicted_coefficients(branch: Any, kernel_basis: Any) -> List[Tuple[int, np.ndarray]]:
    """
    Leading coefficients in W of a predicted branch: (0, c) with X - X0 ~ c (lambda - lambda0)
    for exponent 1, or (side, c) with X - X0 ~ c sqrt|lambda - lambda0| for exponent 1/2,
    one entry per real member.
    """
    if branch.trivial:
        return []
    K = np.array(sympy.Matrix(kernel_basis).evalf().tolist(), dtype=float)
    if branch.exponent == 1:
        values = [complex(sympy.N(f.xreplace({LAMBDA: 1}))) for f in branch.formulas]
        return [(0, K @ np.array([v.real for v in values]))]
    out = []
    order = dict(zip(branch.support, branch.scaling))
    for side in (1, -1):
        for member in branch.members():
            values = [complex(sympy.N(f.xreplace({LAMBDA: side}))) for f in member]
            if any(abs(v.imag) > 1e-12 for v in values):
                continue
            lead = [v.real if order.get(i) == 1 else 0.0 for i, v in enumerate(values)]
            out.append((side, K @ np.array(lead)))
    return out


def match_predictions(runs: Sequence[ContinuationRun], report: Any) -> List[Dict[str, Any]]:
    """Pairs each predicted branch of an InstanceReport with a continuation run."""
    matches = []
    for branch in report.predicted:
        entry: Dict[str, Any] = {"formulas": branch.formula_text(), "run": None,
                                 "predicted_exponent": str(branch.exponent) if branch.exponent else None}
        if branch.trivial:
            found = next((i for i, r in enumerate(runs) if r.trivial), None)
            entry.update(run=found, matched=found is not None)
            matches.append(entry)
            continue

        target = float(branch.exponent)
        best: Optional[Tuple[float, int]] = None
        for i, run in enumerate(runs):
            if run.exponent is None or run.coefficients is None or abs(run.exponent - target) > EXPONENT_TOL:
                continue
            for side, c in predicted_coefficients(branch, report.reduced.kernel_basis):
                if side not in (0, run.fit.get("side")):
                    continue
                error = float(np.linalg.norm(run.coefficients - c) / max(np.linalg.norm(c), 1e-300))
                if best is None or error < best[0]:
                    best = (error, i)
        if best is not None:
            entry.update(run=best[1], fitted_exponent=runs[best[1]].exponent,
                         coefficient_error=best[0], matched=best[0] <= COEFFICIENT_RTOL)
        else:
            entry["matched"] = False
        matches.append(entry)
    missing = sum(not m["matched"] for m in matches)
    if missing:
        warn("Continuation", f"{missing} predicted branch(es) not matched by a continuation run.")
    return matches


def continuation_summary(runs: Sequence[ContinuationRun], matches: Optional[List[Dict[str, Any]]] = None) -> Dict[str, Any]:
    summary: Dict[str, Any] = {
        "branches": len(runs),
        "exponents": [r.exponent for r in runs],
        "runs": [r.to_dict() for r in runs],
    }
    if matches is not None:
        summary["predictions"] = matches
    return summary
