import numpy as np
import pytest
import sympy

from netsym.dsl import (
    LAMBDA, compose_networks, extend_arity, from_exprs, lie_bracket, parse, parse_constants,
    partial, reindex_inputs, zero_function,
)
from netsym.errors import DslSyntaxError, InvalidConfig, NonFinite, UnknownVariable
from netsym.network import NetworkSpec, composition_table, fundamental_network, monoid_completion
from netsym.simulator import NetworkVectorField

x1, x2, x3 = sympy.symbols("x1 x2 x3")


def same(a, b):
    return sympy.expand(sympy.sympify(a).doit() - b) == 0


def test_parse_polynomial():
    rf = parse("x1 + 2*x2^2 - lambda", 2)
    assert rf.arity == 2 and rf.dim == 1
    assert same(rf.exprs[0], x1 + 2 * x2 ** 2 - LAMBDA)
    assert rf.is_polynomial

def test_decimals_are_exact():
    rf = parse("0.25*x1 + 1e-1", 1)
    assert same(rf.exprs[0], sympy.Rational(1, 4) * x1 + sympy.Rational(1, 10))

def test_negation_binds_tighter_than_power():
    assert parse("-x1^2", 1).evaluate([3.0]) == pytest.approx([9.0])
    assert parse("-(x1^2)", 1).evaluate([3.0]) == pytest.approx([-9.0])
    assert parse("0 - x1^2", 1).evaluate([3.0]) == pytest.approx([-9.0])
    assert parse("2*-x1", 1).evaluate([3.0]) == pytest.approx([-6.0])

def test_no_simplification_beyond_constant_folding():
    rf = parse("x1/x1", 1)
    assert rf.exprs[0] != 1
    assert rf.evaluate([2.0]) == pytest.approx([1.0])
    with pytest.raises(NonFinite):
        rf.evaluate([0.0])
    assert parse("x1 - x1", 1).exprs[0] != 0

def test_constant_subtrees_are_folded():
    assert parse("2*3 - 1", 1).exprs[0] == 5
    assert parse("(1 + 1)^3*x1", 1).exprs[0] == sympy.Mul(8, x1, evaluate=False)
    assert parse("-(2)", 1).exprs[0] == -2

def test_precedence_and_parentheses():
    rf = parse("(x1 + 1)*(x2 - 1)/2", 2)
    assert rf.evaluate([1.0, 3.0]) == pytest.approx([2.0])

def test_comments_and_blank_lines_are_skipped():
    rf = parse("# cubic\n\nx1 - x1^3\n", 1)
    assert same(rf.exprs[0], x1 - x1 ** 3)

def test_arity_inferred_from_largest_index():
    assert parse("x3 + x1").arity == 3

def test_constants_substituted():
    rf = parse("a*x1 + b", 1, constants={"a": 2, "b": -0.5})
    assert same(rf.exprs[0], 2 * x1 - sympy.Rational(1, 2))
    assert parse("a*b*x1", 1, constants={"a": 2, "b": 3}).exprs[0] == sympy.Mul(6, x1, evaluate=False)

def test_unknown_name_is_located():
    with pytest.raises(UnknownVariable) as info:
        parse("x1 + b", 1)
    assert info.value.details == {"name": "b", "line": 1, "column": 6}

def test_index_beyond_arity():
    with pytest.raises(UnknownVariable):
        parse("x3", 2)

def test_vector_states_need_component_names():
    rf = parse("x1_1 - x2_2\nx1_2*lambda", 2, dim=2)
    assert rf.evaluate([1.0, 2.0, 3.0, 4.0], 0.5) == pytest.approx([-3.0, 1.0])
    with pytest.raises(UnknownVariable):
        parse("x1\nx2", 2, dim=2)
    with pytest.raises(InvalidConfig):
        parse("x1_1", 2, dim=2)

@pytest.mark.parametrize("text", ["x1 +", "x1 ** 2", "(x1", "2 x1", ""])
def test_syntax_errors(text):
    with pytest.raises(DslSyntaxError) as info:
        parse(text, 1)
    assert info.value.line == 1
    assert info.value.to_dict()["code"] == "syntax_error"

def test_division_by_zero_constant():
    with pytest.raises(DslSyntaxError):
        parse("x1/0", 1)

def test_parse_constants():
    assert parse_constants(["a=1", "b = -0.5"]) == {"a": 1.0, "b": -0.5}
    with pytest.raises(InvalidConfig):
        parse_constants(["a"])
    with pytest.raises(InvalidConfig):
        parse_constants(["a=x"])

@pytest.mark.parametrize("name", ["lambda", "x1", "1a"])
def test_reserved_constant_names(name):
    with pytest.raises(InvalidConfig):
        parse("x1", 1, constants={name: 1.0})


def test_evaluate_and_jacobian():
    rf = parse("x1*x2 + lambda*x1", 2)
    assert rf.evaluate([2.0, 3.0], 0.5) == pytest.approx([7.0])
    J, dlam = rf.jacobian([2.0, 3.0], 0.5)
    assert J == pytest.approx(np.array([[3.5, 2.0]]))
    assert dlam == pytest.approx([2.0])

def test_evaluate_checks_length():
    with pytest.raises(InvalidConfig):
        parse("x1 + x2", 2).evaluate([1.0])

def test_batch_broadcasts_constant_components():
    out = zero_function(2).evaluate_batch(np.ones((3, 2)))
    assert out.shape == (3, 1)
    assert not out.any()

def test_non_finite_value():
    with pytest.raises(NonFinite):
        parse("1/x1", 1).evaluate([0.0])

def test_partial_derivatives():
    rf = parse("x1^2*x2 + lambda*x2", 2)
    assert same(partial(rf, 1).exprs[0], 2 * x1 * x2)
    assert same(partial(rf, "x2").exprs[0], x1 ** 2 + LAMBDA)
    assert same(partial(rf, "lambda").exprs[0], x2)
    with pytest.raises(UnknownVariable):
        partial(rf, 3)

@pytest.mark.parametrize("text", [
    "x1^3 - 2*x2*x1 + lambda",
    "-x1^2 + -(x2^2)",
    "x1/x1 - (x2 - x1) + 1/2*x2",
    "(x1 + x2)*(x1 - x2)/(lambda + 3)^2",
    "x1^-2 - -x2 + 0.25",
    "-(x1*x2) - x1*-x2",
])
def test_text_reparses_to_the_same_tree(text):
    rf = parse(text, 2)
    again = parse(rf.to_text(), 2)
    assert again == rf
    assert again.to_text() == rf.to_text()


# --- Operations on network vector fields ---

@pytest.fixture
def running_fundamental(running_spec):
    table = composition_table(running_spec)
    return table, fundamental_network(running_spec).as_spec()

def test_identity_input_composes_trivially(running_fundamental):
    table, _ = running_fundamental
    g = parse("x2 - x1^2 + x3", 3)
    assert compose_networks(from_exprs([x1], 3), g, table) == g

def test_composition_matches_field_composition(running_fundamental):
    table, fund = running_fundamental
    f = parse("x1*x2 + x3", 3)
    g = parse("x2 - x1^2 + lambda", 3)
    h = compose_networks(f, g, table)
    F, G, H = (NetworkVectorField(fund, rf) for rf in (f, g, h))
    X = np.array([0.3, -1.2, 0.7])
    assert H(X, 0.4) == pytest.approx(F(G(X, 0.4), 0.4))

def test_lie_bracket_matches_fields(running_fundamental):
    table, fund = running_fundamental
    f = parse("x1*x2 - x3^2", 3)
    g = parse("x2 - x1^3", 3)
    bracket = NetworkVectorField(fund, lie_bracket(f, g, table))
    F, G = NetworkVectorField(fund, f), NetworkVectorField(fund, g)
    X = np.array([0.5, -0.4, 1.1])
    expected = F.jacobian(X)[0] @ G(X) - G.jacobian(X)[0] @ F(X)
    assert bracket(X) == pytest.approx(expected, abs=1e-12)

def test_self_bracket_vanishes(running_fundamental):
    table, _ = running_fundamental
    f = parse("x1*x2 - x3^2 + x1", 3)
    assert all(e == 0 for e in lie_bracket(f, f, table).exprs)

def test_arity_must_match_table(running_fundamental):
    table, _ = running_fundamental
    with pytest.raises(InvalidConfig):
        compose_networks(parse("x1", 2), parse("x1", 3), table)

def test_reindex_inputs():
    rf = reindex_inputs(parse("x1 - x2", 2), [2, 0], 3)
    assert rf.arity == 3 and same(rf.exprs[0], x3 - x1)
    with pytest.raises(InvalidConfig):
        reindex_inputs(parse("x1 - x2", 2), [0, 0], 3)

def test_extend_arity_keeps_the_field():
    spec = NetworkSpec.from_external(3, [[1, 2, 1], [1, 1, 1]])
    completed = monoid_completion(spec)
    rf = parse("x1 - x2^3", 2)
    adapted = extend_arity(rf, spec, completed)
    assert adapted.arity == completed.size
    x = np.array([0.2, -0.7, 1.3])
    assert NetworkVectorField(completed, adapted)(x) == pytest.approx(NetworkVectorField(spec, rf)(x))

def test_extend_arity_is_identity_when_nothing_added(running_spec):
    rf = parse("x1 + x3", 3)
    assert extend_arity(rf, running_spec, running_spec) is rf
