# ================================================
# File: netsym/dsl/expression.py
# ================================================
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import sympy

from ..errors import InvalidConfig, NonFinite, UnknownVariable
from .grammar import LAMBDA, ExpressionGrammar, to_source, variable_symbol

_VARIABLE_RE = re.compile(r"^x(\d+)(?:_(\d+))?$")
_CONST_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")

Span = Tuple[int, str, int, int]  # (line, token, start, end)


def input_symbols(arity: int, dim: int = 1) -> List[sympy.Symbol]:
    """Symbols in state-vector order: input k component c sits at k*d + c."""
    return [variable_symbol(k + 1, c + 1, dim) for k in range(arity) for c in range(dim)]


@dataclass(frozen=True)
class ResponseFunction:
    """f: (V^n x R) -> V as d sympy components in x{k} (or x{k}_{c}) and lambda."""

    arity: int
    dim: int
    exprs: Tuple[sympy.Expr, ...]
    spans: Tuple[Span, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if len(self.exprs) != self.dim:
            raise InvalidConfig(f"Response function has {len(self.exprs)} components, expected {self.dim}.")

    @property
    def symbols(self) -> List[sympy.Symbol]:
        return input_symbols(self.arity, self.dim)

    @property
    def is_polynomial(self) -> bool:
        gens = self.symbols + [LAMBDA]
        return all(e.is_polynomial(*gens) for e in self.exprs)

    @cached_property
    def _compiled(self) -> Callable:
        return sympy.lambdify([self.symbols, LAMBDA], list(self.exprs), modules="numpy", dummify=True)

    @cached_property
    def _compiled_jacobian(self) -> Callable:
        """Rows are components; columns are the state inputs followed by lambda."""
        gens = self.symbols + [LAMBDA]
        J = [[sympy.diff(e, s) for s in gens] for e in self.exprs]
        return sympy.lambdify([self.symbols, LAMBDA], J, modules="numpy", dummify=True)

    def evaluate(self, X: Sequence[float], lam: float = 0.0) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.shape != (self.arity * self.dim,):
            raise InvalidConfig(f"Expected {self.arity * self.dim} input values, got {X.size}.")
        with np.errstate(all="ignore"):
            out = np.array(self._compiled(X, float(lam)), dtype=float).reshape(self.dim)
        if not np.all(np.isfinite(out)):
            raise NonFinite("Response function evaluated to a non-finite value.",
                            {"X": X.tolist(), "lambda": float(lam)})
        return out

    def evaluate_batch(self, Xs: np.ndarray, lam: float = 0.0) -> np.ndarray:
        """Rows of Xs are input vectors; returns one d-vector per row."""
        Xs = np.asarray(Xs, dtype=float)
        m = Xs.shape[0]
        with np.errstate(all="ignore"):
            raw = self._compiled(Xs.T, float(lam))
        out = np.stack([np.broadcast_to(np.asarray(v, dtype=float), (m,)) for v in raw], axis=1)
        if not np.all(np.isfinite(out)):
            raise NonFinite("Response function evaluated to a non-finite value.", {"lambda": float(lam)})
        return out

    def jacobian(self, X: Sequence[float], lam: float = 0.0) -> Tuple[np.ndarray, np.ndarray]:
        """(d x n*d) derivative in the inputs and the d-vector derivative in lambda."""
        X = np.asarray(X, dtype=float)
        with np.errstate(all="ignore"):
            raw = self._compiled_jacobian(X, float(lam))
        J = np.array([[float(v) for v in row] for row in raw], dtype=float)
        if not np.all(np.isfinite(J)):
            raise NonFinite("Jacobian of the response function is not finite.",
                            {"X": X.tolist(), "lambda": float(lam)})
        return J[:, :-1], J[:, -1]

    def to_text(self) -> str:
        return "\n".join(to_source(e) for e in self.exprs)

    def __str__(self) -> str:
        return self.to_text()

    def to_dict(self) -> Dict:
        return {"arity": self.arity, "dim": self.dim, "components": [to_source(e) for e in self.exprs]}


def expr_to_text(expr: sympy.Expr) -> str:
    return sympy.sstr(expr, order="lex").replace("**", "^")


def _symbol_to_input(sym: sympy.Symbol, arity: int, dim: int) -> Optional[Tuple[int, int]]:
    """(k, c), 0-indexed, for a valid input symbol; None otherwise."""
    match = _VARIABLE_RE.match(sym.name)
    if not match:
        return None
    k, c = int(match.group(1)), match.group(2)
    if dim == 1:
        if c is not None or not 1 <= k <= arity:
            return None
        return k - 1, 0
    if c is None or not 1 <= k <= arity or not 1 <= int(c) <= dim:
        return None
    return k - 1, int(c) - 1


def _infer_arity(exprs: Sequence[sympy.Expr]) -> int:
    indices = [int(m.group(1)) for e in exprs for s in e.free_symbols
               if (m := _VARIABLE_RE.match(s.name))]
    return max(indices, default=1)


def parse(text: str, arity: Optional[int] = None, dim: int = 1,
          constants: Optional[Mapping[str, float]] = None) -> ResponseFunction:
    """
    Parses a response function. One component per non-empty line ('#' starts
    a comment line). Named constants are substituted as they are read; any name
    left over, and any x index beyond the arity, raises UnknownVariable.
    """
    if dim < 1:
        raise InvalidConfig(f"Cell phase dimension must be positive, got {dim}.")
    bindings = _constant_bindings(constants or {})
    grammar = ExpressionGrammar(bindings)

    exprs: List[sympy.Expr] = []
    spans: List[Span] = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        exprs.append(grammar.parse_line(line, line_no))
        spans.extend((line_no, token, start, end) for token, start, end in grammar.spans)
    if not exprs:
        grammar.parse_line("", 1)
    if len(exprs) != dim:
        raise InvalidConfig(f"Expected {dim} component line(s), found {len(exprs)}.",
                            {"dim": dim, "components": len(exprs)})

    if arity is None:
        arity = _infer_arity(exprs)
    for expr in exprs:
        for sym in sorted(expr.free_symbols, key=lambda s: s.name):
            if sym != LAMBDA and _symbol_to_input(sym, arity, dim) is None:
                where = next(((ln, st) for ln, tok, st, _ in spans if tok == sym.name), (0, 0))
                raise UnknownVariable(
                    f"Unknown variable '{sym.name}' (arity {arity}, dim {dim}).",
                    {"name": sym.name, "line": where[0], "column": where[1] + 1},
                )
    return ResponseFunction(arity, dim, tuple(exprs), tuple(spans))


def _constant_bindings(constants: Mapping[str, float]) -> Dict[sympy.Symbol, sympy.Expr]:
    bindings = {}
    for name, value in constants.items():
        if not _CONST_RE.match(name) or name == "lambda" or _VARIABLE_RE.match(name):
            raise InvalidConfig(f"'{name}' cannot be used as a constant name.")
        bindings[sympy.Symbol(name)] = sympy.nsimplify(value, rational=True)
    return bindings


def parse_constants(items: Sequence[str]) -> Dict[str, float]:
    """['a=1', 'b=-0.5'] -> {'a': 1.0, 'b': -0.5}."""
    out = {}
    for item in items:
        name, sep, value = item.partition("=")
        if not sep:
            raise InvalidConfig(f"Constant '{item}' must look like name=value.")
        try:
            out[name.strip()] = float(value)
        except ValueError:
            raise InvalidConfig(f"Constant '{name.strip()}' has a non-numeric value '{value}'.")
    return out


def from_exprs(exprs: Sequence[sympy.Expr], arity: int, dim: int = 1) -> ResponseFunction:
    return ResponseFunction(arity, dim, tuple(sympy.sympify(e) for e in exprs))


def zero_function(arity: int, dim: int = 1) -> ResponseFunction:
    return from_exprs([sympy.Integer(0)] * dim, arity, dim)


def partial(rf: ResponseFunction, var: Union[int, str, Tuple[int, int]]) -> ResponseFunction:
    """
    Symbolic derivative. `var` is an input index (1-indexed, d = 1), an
    (index, component) pair, a symbol name such as 'x2_1', or 'lambda'.
    """
    if var == "lambda":
        sym = LAMBDA
    elif isinstance(var, str):
        sym = sympy.Symbol(var)
        if _symbol_to_input(sym, rf.arity, rf.dim) is None:
            raise UnknownVariable(f"Cannot differentiate with respect to '{var}'.", {"name": var})
    else:
        k, c = (var, 1) if isinstance(var, int) else var
        if not 1 <= k <= rf.arity or not 1 <= c <= rf.dim:
            raise UnknownVariable(f"Input index {var} is out of range.", {"arity": rf.arity, "dim": rf.dim})
        sym = variable_symbol(k, c, rf.dim)
    return ResponseFunction(rf.arity, rf.dim, tuple(sympy.diff(e, sym) for e in rf.exprs))
