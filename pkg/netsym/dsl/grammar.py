# ================================================
# File: netsym/dsl/grammar.py
# ================================================
from fractions import Fraction
from typing import Dict, List, Mapping, Optional as Opt, Tuple

import sympy
from pyparsing import (
    Forward, Literal, Optional, ParseBaseException, ParseResults, Regex,
    Suppress, Word, ZeroOrMore, alphanums, alphas,
)

from ..errors import DslSyntaxError

LAMBDA = sympy.Symbol("lambda")

# binding strength of printed forms, loosest first
EXPR, TERM, FACTOR, ATOM = 1, 2, 3, 4


def variable_symbol(index: int, component: int = 0, dim: int = 1) -> sympy.Symbol:
    """x{k} when d = 1, x{k}_{c} otherwise (both 1-indexed in the name)."""
    if dim == 1:
        return sympy.Symbol(f"x{index}")
    return sympy.Symbol(f"x{index}_{component}")


def negate(a: sympy.Expr) -> sympy.Expr:
    if isinstance(a, sympy.Number):
        return -a
    return sympy.Mul(sympy.Integer(-1), a, evaluate=False)

def combine(op: str, a: sympy.Expr, b: sympy.Expr) -> sympy.Expr:
    """One binary node. Only subtrees that are both numbers get folded."""
    if isinstance(a, sympy.Number) and isinstance(b, sympy.Number):
        return {"+": a + b, "-": a - b, "*": a * b, "/": a / b}[op]
    if op == "+":
        return sympy.Add(a, b, evaluate=False)
    if op == "-":
        return sympy.Add(a, negate(b), evaluate=False)
    if op == "*":
        return sympy.Mul(a, b, evaluate=False)
    if b == 0:
        return sympy.zoo
    return sympy.Mul(a, sympy.Pow(b, sympy.Integer(-1), evaluate=False), evaluate=False)


class ExpressionGrammar:
    """
    Grammar for one component of a response function:

        expr   := term (('+' | '-') term)*
        term   := factor (('*' | '/') factor)*
        factor := atom ('^' INT)?
        atom   := NUMBER | 'lambda' | 'x' INT ('_' INT)? | NAME | '(' expr ')' | '-' atom

    Negation is part of the atom, so -x1^2 is (-x1)^2. Parse actions build
    unevaluated sympy nodes; constant subtrees are folded and nothing else is
    rewritten, so x1/x1 stays a quotient. Names found in `constants` are
    replaced by their values as they are read. Identifier tokens are recorded
    with their source offsets in `spans`.
    """

    def __init__(self, constants: Opt[Mapping[sympy.Symbol, sympy.Expr]] = None):
        self.spans: List[Tuple[str, int, int]] = []
        self.constants: Dict[sympy.Symbol, sympy.Expr] = dict(constants or {})

        # numeric types
        number = Regex(r"(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?")
        integer = Regex(r"-?\d+")

        # variables and names
        variable = Regex(r"x\d+(_\d+)?(?![A-Za-z0-9_])")
        lam = Regex(r"lambda(?![A-Za-z0-9_])")
        name = Word(alphas + "_", alphanums + "_")

        # operations
        plus, minus = Literal("+"), Literal("-")
        mult, div = Literal("*"), Literal("/")
        par_l, par_r = Suppress("("), Suppress(")")
        exp = Suppress("^")

        number.set_parse_action(self._on_number)
        variable.set_parse_action(self._on_identifier)
        lam.set_parse_action(lambda s, loc, t: self._record(t[0], loc) or LAMBDA)
        name.set_parse_action(self._on_identifier)

        self.expr = Forward()
        atom = Forward()

        negation = (Suppress(minus) + atom).set_parse_action(lambda t: negate(t[0]))
        atom <<= number | variable | lam | name | (par_l + self.expr + par_r) | negation
        exponent = integer | (par_l + integer + par_r)
        factor = (atom + Optional(exp + exponent)).set_parse_action(self._on_power)
        term = (factor + ZeroOrMore((mult | div) + factor)).set_parse_action(self._fold)
        self.expr <<= (term + ZeroOrMore((plus | minus) + term)).set_parse_action(self._fold)

    def _record(self, token: str, loc: int) -> None:
        span = (token, loc, loc + len(token))
        if span not in self.spans:
            self.spans.append(span)

    @staticmethod
    def _on_number(tokens):
        value = Fraction(tokens[0])
        return sympy.Rational(value.numerator, value.denominator)

    def _on_identifier(self, s, loc, tokens):
        self._record(tokens[0], loc)
        sym = sympy.Symbol(tokens[0])
        return self.constants.get(sym, sym)

    @staticmethod
    def _on_power(tokens):
        if len(tokens) == 1:
            return tokens[0]
        base, k = tokens[0], sympy.Integer(int(tokens[1]))
        if isinstance(base, sympy.Number):
            return base ** k
        return sympy.Pow(base, k, evaluate=False)

    @staticmethod
    def _fold(tokens):
        items = tokens.as_list() if isinstance(tokens, ParseResults) else list(tokens)
        result = items[0]
        for op, operand in zip(items[1::2], items[2::2]):
            result = combine(op, result, operand)
        return result

    def parse_line(self, text: str, line: int = 1) -> sympy.Expr:
        """Parses one component; spans are offsets within this line."""
        self.spans = []
        if not text.strip():
            raise DslSyntaxError("Empty expression", line, 1, text)
        try:
            result = self.expr.parse_string(text, parse_all=True)
        except ParseBaseException as e:
            raise DslSyntaxError(f"Invalid expression: {e.msg}", line, e.col, text)
        expr = result[0]
        if expr.has(sympy.zoo, sympy.nan, sympy.oo, -sympy.oo):
            raise DslSyntaxError("Division by a zero constant", line, 1, text)
        return expr


# --- Printing ---

def _is_negation(e: sympy.Expr) -> bool:
    return isinstance(e, sympy.Mul) and len(e.args) == 2 and e.args[0] == -1

def _is_reciprocal(e: sympy.Expr) -> bool:
    return isinstance(e, sympy.Pow) and e.exp == -1

def _wrap(e: sympy.Expr, level: int) -> str:
    text, strength = _source(e)
    return f"({text})" if strength < level else text

def _source(e: sympy.Expr) -> Tuple[str, int]:
    if isinstance(e, sympy.Symbol):
        return e.name, ATOM
    if isinstance(e, sympy.Integer):
        return str(e), ATOM
    if isinstance(e, sympy.Rational):
        return f"{e.p}/{e.q}", TERM
    if isinstance(e, sympy.Float):
        return repr(float(e)), ATOM
    if isinstance(e, sympy.Add):
        text = _wrap(e.args[0], EXPR)
        for a in e.args[1:]:
            if _is_negation(a):
                text += " - " + _wrap(a.args[1], TERM)
            else:
                text += " + " + _wrap(a, TERM)
        return text, EXPR
    if isinstance(e, sympy.Mul):
        if _is_negation(e):
            return "-" + _wrap(e.args[1], ATOM), ATOM
        text = _wrap(e.args[0], TERM)
        for a in e.args[1:]:
            if _is_reciprocal(a):
                text += "/" + _wrap(a.base, FACTOR)
            else:
                text += "*" + _wrap(a, FACTOR)
        return text, TERM
    if isinstance(e, sympy.Pow) and e.exp.is_Integer:
        return f"{_wrap(e.base, ATOM)}^{e.exp}", FACTOR
    return f"({sympy.sstr(e)})", ATOM


def to_source(expr: sympy.Expr) -> str:
    """
    Text in the expression grammar that parses back to the same tree, for
    trees the parser built. Other sympy expressions print to text with the
    same value.
    """
    return _source(sympy.sympify(expr))[0]
