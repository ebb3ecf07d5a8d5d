from .expression import (
    ResponseFunction, expr_to_text, from_exprs, input_symbols, parse, parse_constants,
    partial, zero_function,
)
from .grammar import LAMBDA, to_source, variable_symbol
from .network_ops import compose_networks, extend_arity, lie_bracket, precompose, reindex_inputs
