# ================================================
# File: netsym/dsl/network_ops.py
# ================================================
# Composition and Lie bracket of network vector fields, computed on their
# response functions. (A_j X)_m = X_{table[m][j]}.
from typing import Dict, List, Sequence

import sympy

from ..errors import InvalidConfig, InvalidNetwork
from ..network.monoid import MonoidTable, NetworkSpec
from ..utils.helpers import log
from .expression import ResponseFunction
from .grammar import variable_symbol


def _check_arity(table: MonoidTable, *rfs: ResponseFunction) -> None:
    for rf in rfs:
        if rf.arity != table.size:
            raise InvalidConfig(f"Response function arity {rf.arity} does not match monoid size {table.size}.")
    if len({rf.dim for rf in rfs}) > 1:
        raise InvalidConfig("Response functions have different cell dimensions.")


def substitute(exprs: Sequence[sympy.Expr], subs: Dict[sympy.Symbol, sympy.Expr]) -> List[sympy.Expr]:
    """Replaces symbols without re-evaluating the trees around them."""
    with sympy.evaluate(False):
        return [e.xreplace(subs) for e in exprs]


def shifted_inputs(table: MonoidTable, j: int, dim: int) -> Dict[sympy.Symbol, sympy.Symbol]:
    """Substitution turning an expression in X into the same expression in A_j X."""
    return {
        variable_symbol(m + 1, c + 1, dim): variable_symbol(table.product(m, j) + 1, c + 1, dim)
        for m in range(table.size) for c in range(dim)
    }


def precompose(rf: ResponseFunction, table: MonoidTable, j: int) -> List[sympy.Expr]:
    """Components of X -> rf(A_j X)."""
    subs = shifted_inputs(table, j, rf.dim)
    return substitute(rf.exprs, subs)


def compose_networks(f: ResponseFunction, g: ResponseFunction, table: MonoidTable) -> ResponseFunction:
    """h with gamma_h = gamma_f o gamma_g: h(X) = f(g(A_1 X), ..., g(A_n X))."""
    _check_arity(table, f, g)
    d = f.dim
    subs = {}
    for k in range(table.size):
        g_k = precompose(g, table, k)
        for c in range(d):
            subs[variable_symbol(k + 1, c + 1, d)] = g_k[c]
    h = tuple(substitute(f.exprs, subs))
    log("DSL", f"Composed two arity-{table.size} response functions.")
    return ResponseFunction(f.arity, d, h)


def _directional(f: ResponseFunction, g: ResponseFunction, table: MonoidTable) -> List[sympy.Expr]:
    """sum_k D_k f(X) . g(A_k X), per component of f."""
    d = f.dim
    out = [sympy.Integer(0)] * d
    for k in range(table.size):
        g_k = precompose(g, table, k)
        for c_out in range(d):
            for c in range(d):
                out[c_out] += sympy.diff(f.exprs[c_out], variable_symbol(k + 1, c + 1, d)) * g_k[c]
    return out


def lie_bracket(f: ResponseFunction, g: ResponseFunction, table: MonoidTable) -> ResponseFunction:
    """i with [gamma_f, gamma_g] = D gamma_f . gamma_g - D gamma_g . gamma_f = gamma_i."""
    _check_arity(table, f, g)
    fg = _directional(f, g, table)
    gf = _directional(g, f, table)
    return ResponseFunction(f.arity, f.dim, tuple(sympy.expand((a - b).doit()) for a, b in zip(fg, gf)))


def reindex_inputs(rf: ResponseFunction, mapping: Sequence[int], new_arity: int) -> ResponseFunction:
    """Input k (0-indexed) of rf becomes input mapping[k]; other new inputs are ignored."""
    if len(mapping) != rf.arity:
        raise InvalidConfig(f"Index mapping has {len(mapping)} entries for arity {rf.arity}.")
    if len(set(mapping)) != len(mapping) or any(not 0 <= m < new_arity for m in mapping):
        raise InvalidConfig("Index mapping must be injective into the new inputs.", {"mapping": list(mapping)})
    d = rf.dim
    subs = {
        variable_symbol(k + 1, c + 1, d): variable_symbol(m + 1, c + 1, d)
        for k, m in enumerate(mapping) for c in range(d)
    }
    return ResponseFunction(new_arity, d, tuple(substitute(rf.exprs, subs)))


def extend_arity(rf: ResponseFunction, original: NetworkSpec, extended: NetworkSpec) -> ResponseFunction:
    """
    Adapts rf, written for the maps of `original`, to the maps of `extended`
    (a closure or monoid completion of it). Inputs for maps that were added
    by the extension do not enter the result.
    """
    mapping = []
    for k, m in enumerate(original.maps):
        idx = extended.index_of(m)
        if idx is None:
            raise InvalidNetwork(f"Map {k + 1} of the original network is missing from the extended one.")
        mapping.append(idx)
    if mapping == list(range(rf.arity)) and extended.size == rf.arity:
        return rf
    log("DSL", f"Reindexed response inputs {[k + 1 for k in range(rf.arity)]} -> {[m + 1 for m in mapping]}.")
    return reindex_inputs(rf, mapping, extended.size)
