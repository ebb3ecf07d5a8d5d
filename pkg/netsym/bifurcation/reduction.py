# ================================================
# File: netsym/bifurcation/reduction.py
# ================================================
# Equivariant Lyapunov-Schmidt reduction of the fundamental network at a
# fully symmetric equilibrium (X0, lambda0). W splits as ker L0^S (+) im L0^S,
# with L0^S the semisimple part of the Jacobian; both pieces are invariant
# under every A_sigma, so the reduced field inherits the monoid action.
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
import sympy

from ..config import CLUSTER_TOL, EQUILIBRIUM_TOL, EQUIVARIANCE_TOL, LS_MAX_ITER, LS_NEWTON_TOL
from ..dsl.expression import ResponseFunction, input_symbols
from ..dsl.grammar import LAMBDA
from ..dsl.network_ops import precompose
from ..errors import InvalidConfig, NewtonDivergence, NotEquilibrium, NotSymmetricPoint
from ..network.fundamental import FundamentalNetwork, Representation
from ..representation.linalg import canonical_basis, column_span, nullspace
from ..simulator.field import NetworkVectorField
from ..utils.helpers import basis_columns, log, resolve_seed, warn
from .jordan import JordanChevalley, jordan_chevalley
from .taylor import coordinate_symbols, truncate


# --- Shared setup ---

def gamma_exprs(fund: FundamentalNetwork, rf: ResponseFunction) -> List[sympy.Expr]:
    """Gamma_f(X)_j = f(A_j X), flattened in state order and evaluated."""
    out: List[sympy.Expr] = []
    for j in range(fund.size):
        out.extend(e.doit() for e in precompose(rf, fund.table, j))
    return out

def exact_point(values: Sequence[Any]) -> Optional[List[sympy.Rational]]:
    """Rationals that round-trip to the given numbers, or None."""
    out = []
    for v in values:
        if isinstance(v, (int, sympy.Rational)):
            out.append(sympy.Rational(v))
            continue
        if isinstance(v, Fraction):
            out.append(sympy.Rational(v.numerator, v.denominator))
            continue
        r = sympy.nsimplify(float(v), rational=True)
        if float(r) != float(v):
            return None
        out.append(r)
    return out

def _exact_jacobian(exprs: List[sympy.Expr], syms: List[sympy.Symbol], point: List[sympy.Rational],
                    lam0: sympy.Rational) -> Optional[sympy.Matrix]:
    values = dict(zip(syms, point))
    values[LAMBDA] = lam0
    J = sympy.Matrix(exprs).jacobian(syms).xreplace(values)
    return J if all(v.is_Rational for v in J) else None


@dataclass(frozen=True)
class Splitting:
    """Bases of ker S and im S and the coordinate rows reading them off."""

    kernel_basis: Any
    image_basis: Any
    kernel_rows: Any
    image_rows: Any
    exact: bool

    @property
    def kernel_dim(self) -> int:
        return self.kernel_basis.shape[1]

    @property
    def P_ker(self) -> Any:
        return self.kernel_basis * self.kernel_rows if self.exact else self.kernel_basis @ self.kernel_rows

    @property
    def P_im(self) -> Any:
        return self.image_basis * self.image_rows if self.exact else self.image_basis @ self.image_rows

    def numeric(self) -> "Splitting":
        if not self.exact:
            return self
        conv = lambda M: np.array(M.tolist(), dtype=float).reshape(M.shape)
        return Splitting(conv(self.kernel_basis), conv(self.image_basis),
                         conv(self.kernel_rows), conv(self.image_rows), False)


def split_semisimple(jc: JordanChevalley) -> Splitting:
    if jc.exact:
        S = sympy.Matrix(jc.S)
        n = S.rows
        K = column_span(nullspace(S), n)
        I = canonical_basis(S) if not S.is_zero_matrix else sympy.zeros(n, 0)
        B = sympy.Matrix.hstack(K, I)
        if B.cols != n:
            raise NotEquilibrium("Kernel and image of the semisimple part do not span W.")
        B_inv = B.inv()
        return Splitting(K, I, B_inv[:K.cols, :], B_inv[K.cols:, :], True)

    S = np.asarray(jc.S)
    n = S.shape[0]
    K = scipy.linalg.null_space(S, rcond=CLUSTER_TOL)
    I = scipy.linalg.orth(S, rcond=CLUSTER_TOL)
    B = np.hstack([K, I])
    if B.shape[1] != n:
        raise NotEquilibrium("Kernel and image of the semisimple part do not span W.",
                             {"kernel_dim": K.shape[1], "image_dim": I.shape[1]})
    B_inv = np.linalg.inv(B)
    k = K.shape[1]
    return Splitting(K, I, B_inv[:k, :], B_inv[k:, :], False)


def _check_start(vf: NetworkVectorField, rep: Representation, X0: np.ndarray,
                 lam0: float, tol: float) -> None:
    residual = vf.residual(X0, lam0)
    if residual >= tol:
        raise NotEquilibrium(f"Start point is not an equilibrium (residual {residual:.3e}).",
                             {"residual": residual, "tol": tol})
    moved = max(float(np.linalg.norm(A @ X0 - X0)) for A in rep.numeric())
    if moved >= tol:
        raise NotSymmetricPoint(f"Start point is not fixed by the monoid action (moved by {moved:.3e}).",
                                {"displacement": moved})


def linearization(fund: FundamentalNetwork, rf: ResponseFunction, X0: Sequence[float],
                  lambda0: float) -> Any:
    """L0 = D Gamma_f(X0; lambda0), exact when the data allow it."""
    point = exact_point(X0)
    lam = exact_point([lambda0])
    if point is not None and lam is not None and rf.is_polynomial:
        J = _exact_jacobian(gamma_exprs(fund, rf), input_symbols(fund.size, rf.dim), point, lam[0])
        if J is not None:
            return J
    vf = NetworkVectorField.fundamental(fund, rf)
    return vf.jacobian(np.asarray(X0, dtype=float), float(lambda0))[0]


# --- Numeric reduced system ---

@dataclass(frozen=True)
class ReducedSystem:
    """r(u; lambda) = Gamma_ker(X0 + K u + I w(u, lambda); lambda) in kernel coordinates u."""

    vector_field: NetworkVectorField
    X0: np.ndarray
    lambda0: float
    L0: Any
    jordan: JordanChevalley
    splitting: Splitting
    action: Tuple[np.ndarray, ...]
    kernel_action: Tuple[np.ndarray, ...]
    exact: bool

    @cached_property
    def _num(self) -> Splitting:
        return self.splitting.numeric()

    @property
    def kernel_dim(self) -> int:
        return self.splitting.kernel_dim

    @property
    def kernel_basis(self) -> np.ndarray:
        return self._num.kernel_basis

    @property
    def image_basis(self) -> np.ndarray:
        return self._num.image_basis

    @property
    def P_ker(self) -> np.ndarray:
        return self._num.P_ker

    @property
    def P_im(self) -> np.ndarray:
        return self._num.P_im

    def solve_image(self, u: Sequence[float], lam: float, w0: Optional[np.ndarray] = None) -> np.ndarray:
        """Newton solve of Gamma_im(X0 + K u + I w; lambda) = 0 for w."""
        K, I, C_im = self.kernel_basis, self.image_basis, self._num.image_rows
        base = self.X0 + K @ np.asarray(u, dtype=float)
        w = np.zeros(I.shape[1]) if w0 is None else np.array(w0, dtype=float)
        if w.size == 0:
            return w
        for _ in range(LS_MAX_ITER):
            X = base + I @ w
            G = C_im @ self.vector_field(X, lam)
            if not np.all(np.isfinite(G)):
                break
            if np.linalg.norm(G) < LS_NEWTON_TOL:
                return w
            J = C_im @ self.vector_field.jacobian(X, lam)[0] @ I
            try:
                w = w - np.linalg.solve(J, G)
            except np.linalg.LinAlgError:
                w = w - np.linalg.lstsq(J, G, rcond=None)[0]
        raise NewtonDivergence(f"Implicit solve for the image component did not converge in {LS_MAX_ITER} steps.",
                               {"u": list(map(float, u)), "lambda": float(lam)})

    def lift(self, u: Sequence[float], lam: float) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        return self.X0 + self.kernel_basis @ u + self.image_basis @ self.solve_image(u, lam)

    def __call__(self, u: Sequence[float], lam: float) -> np.ndarray:
        return self._num.kernel_rows @ self.vector_field(self.lift(u, lam), lam)

    def jacobian(self, u: Sequence[float], lam: float) -> np.ndarray:
        """D_u r by implicit differentiation of the image equation."""
        X = self.lift(u, lam)
        J = self.vector_field.jacobian(X, lam)[0]
        K, I = self.kernel_basis, self.image_basis
        C_ker, C_im = self._num.kernel_rows, self._num.image_rows
        if I.shape[1]:
            dw = -np.linalg.solve(C_im @ J @ I, C_im @ J @ K)
            return C_ker @ J @ (K + I @ dw)
        return C_ker @ J @ K

    def equivariance_residual(self, samples: int = 50, radius: float = 1e-2,
                              seed: Optional[int] = None) -> float:
        """max over random (u, lambda) near (0, lambda0) of |r(B u) - B r(u)|."""
        rng = np.random.default_rng(resolve_seed(seed))
        worst = 0.0
        for _ in range(samples):
            u = radius * rng.uniform(-1.0, 1.0, self.kernel_dim)
            lam = self.lambda0 + radius * rng.uniform(-1.0, 1.0)
            ru = self(u, lam)
            for B in self.kernel_action:
                worst = max(worst, float(np.linalg.norm(self(B @ u, lam) - B @ ru)))
        return worst

    def projection_commutator(self) -> float:
        """Largest |P A - A P| over the action and both projections (0 when exact)."""
        worst = 0.0
        for A in self.action:
            for P in (self.P_ker, self.P_im):
                worst = max(worst, float(np.abs(P @ A - A @ P).max()))
        return worst

    def to_dict(self) -> Dict[str, Any]:
        return {
            "lambda0": self.lambda0,
            "X0": self.X0.tolist(),
            "exact": self.exact,
            "kernel_dim": self.kernel_dim,
            "kernel_basis": (basis_columns([self.splitting.kernel_basis[:, j] for j in range(self.kernel_dim)])
                             if self.exact else self.kernel_basis.T.tolist()),
            "jordan_chevalley": self.jordan.to_dict(),
        }


def ls_reduce(fund: FundamentalNetwork, rep: Representation, rf: ResponseFunction,
              X0: Sequence[float], lambda0: float = 0.0, tol: float = EQUILIBRIUM_TOL) -> ReducedSystem:
    vf = NetworkVectorField.fundamental(fund, rf)
    X0_arr = np.asarray(X0, dtype=float)
    if X0_arr.shape != (vf.dim,):
        raise InvalidConfig(f"Start point has {X0_arr.size} entries, expected {vf.dim}.")
    _check_start(vf, rep, X0_arr, float(lambda0), tol)

    L0 = linearization(fund, rf, X0, lambda0)
    jc = jordan_chevalley(L0)
    split = split_semisimple(jc)
    if split.kernel_dim == 0:
        warn("Reduce", "L0 is invertible; the reduced system is zero-dimensional.")

    if split.exact:
        local = rep.restrict(split.kernel_basis) if split.kernel_dim else None
        action = tuple(np.array(B.tolist(), dtype=float).reshape(B.shape) for B in local.matrices) if local else ()
    else:
        action = tuple(split.kernel_rows @ A @ split.kernel_basis for A in rep.numeric())

    reduced = ReducedSystem(vf, X0_arr, float(lambda0), L0, jc, split, tuple(rep.numeric()), action, split.exact)
    if not split.exact:
        drift = reduced.projection_commutator()
        if drift > EQUIVARIANCE_TOL:
            warn("Reduce", f"Projections commute with the action only up to {drift:.2e}.")
    log("Reduce", f"ker L0^S has dimension {split.kernel_dim} ({'exact' if split.exact else 'numeric'} splitting).")
    return reduced


# --- Exact Taylor polynomial of the reduced field ---

@dataclass(frozen=True)
class ReducedTaylor:
    """
    Truncated Taylor polynomial of r in kernel coordinates u1..uk, with
    LAMBDA standing for lambda - lambda0; degree <= max_degree in u and <= 1
    in LAMBDA, constant term dropped.
    """

    kernel_basis: sympy.ImmutableMatrix
    symbols: Tuple[sympy.Symbol, ...]
    components: Tuple[sympy.Expr, ...]
    local: Optional[Representation]
    max_degree: int
    image_terms: Tuple[sympy.Expr, ...] = field(default=(), compare=False)

    @property
    def kernel_dim(self) -> int:
        return len(self.symbols)

    def to_dict(self) -> Dict[str, Any]:
        from ..dsl.expression import expr_to_text
        return {
            "kernel_basis": basis_columns([self.kernel_basis[:, j] for j in range(self.kernel_dim)]),
            "coordinates": [str(s) for s in self.symbols],
            "components": [expr_to_text(c) for c in self.components],
            "max_degree": self.max_degree,
        }


def _shifted_taylor(expr: sympy.Expr, syms: Sequence[sympy.Symbol], point: Sequence[sympy.Rational],
                    lam0: sympy.Rational, degree: int) -> sympy.Expr:
    shift = {s: p + s for s, p in zip(syms, point) if p != 0}
    shift[LAMBDA] = lam0 + LAMBDA if lam0 != 0 else LAMBDA
    gens = list(syms) + [LAMBDA]
    shifted = expr.xreplace(shift)
    if not shifted.is_polynomial(*gens):
        t = sympy.Symbol("t")
        scaled = shifted.xreplace({g: t * g for g in gens})
        shifted = sympy.series(scaled, t, 0, degree + 2).removeO().subs(t, 1)
    return truncate(shifted, syms, degree)


def reduced_taylor(fund: FundamentalNetwork, rep: Representation, rf: ResponseFunction,
                   X0: Sequence[Any], lambda0: Any = 0, max_degree: int = 3) -> ReducedTaylor:
    point = exact_point(X0)
    lam = exact_point([lambda0])
    if point is None or lam is None:
        raise InvalidConfig("Exact reduction needs a start point with exactly representable rational entries.")
    lam0 = lam[0]
    syms = input_symbols(fund.size, rf.dim)
    exprs = gamma_exprs(fund, rf)

    values = dict(zip(syms, point))
    values[LAMBDA] = lam0
    residual = max((abs(float(e.xreplace(values))) for e in exprs), default=0.0)
    if residual >= EQUILIBRIUM_TOL:
        raise NotEquilibrium(f"Start point is not an equilibrium (residual {residual:.3e}).", {"residual": residual})
    for A in rep.matrices:
        if sympy.Matrix(A) * sympy.Matrix(point) != sympy.Matrix(point):
            raise NotSymmetricPoint("Start point is not fixed by the monoid action.")

    L0 = _exact_jacobian(exprs, syms, point, lam0)
    if L0 is None:
        raise InvalidConfig("Jacobian at the start point is not rational; use the numeric reduction.")
    split = split_semisimple(jordan_chevalley(L0))
    k = split.kernel_dim
    u = coordinate_symbols(k)
    if k == 0:
        return ReducedTaylor(sympy.ImmutableMatrix(split.kernel_basis), (), (), None, max_degree)

    taylor = [_shifted_taylor(e, syms, point, lam0, max_degree + 1) for e in exprs]
    K, I = split.kernel_basis, split.image_basis
    C_ker, C_im = split.kernel_rows, split.image_rows
    Ku = K * sympy.Matrix(u)

    def substituted(w: sympy.Matrix) -> sympy.Matrix:
        y = Ku + I * w if I.cols else Ku
        subs = {s: y[i] for i, s in enumerate(syms)}
        return sympy.Matrix([truncate(t.xreplace(subs), u, max_degree) for t in taylor])

    w = sympy.zeros(I.cols, 1)
    if I.cols:
        M_inv = (C_im * sympy.Matrix(L0) * I).inv()
        # each pass fixes one more order of w
        for _ in range(2 * max_degree + 4):
            G = C_im * substituted(w)
            w_next = (w - M_inv * G).applyfunc(lambda e: truncate(e, u, max_degree))
            if all(sympy.expand(a - b) == 0 for a, b in zip(w_next, w)):
                break
            w = w_next

    r = C_ker * substituted(w)
    components = tuple(truncate(e, u, max_degree, drop_constant=True) for e in r)
    local = rep.restrict(K)
    log("Reduce", f"Exact reduced Taylor polynomial on a {k}-dim kernel, degree {max_degree}.")
    return ReducedTaylor(sympy.ImmutableMatrix(K), tuple(u), components, local, max_degree, tuple(w))
