from fractions import Fraction

import numpy as np
import pytest
import sympy

from netsym.bifurcation import (
    COMPOSITE, NONE_GENERIC, PITCHFORK, SADDLE_NODE, TRANSCRITICAL,
    classify_codim1, classify_instance, continuation_summary, continue_branches,
    equivariant_taylor_family, jordan_chevalley, lift_equilibria, lift_to_original,
    ls_reduce, match_predictions, reduced_taylor,
)
from netsym.bifurcation.classify import (
    GENERIC_INSTANCE, HYPOTHESIS_VIOLATED, NON_GENERIC_INSTANCE, REGULAR_POINT, kind_from_exponents,
)
from netsym.dsl import parse
from netsym.dsl.grammar import LAMBDA
from netsym.errors import IllConditioned, InvalidConfig, NotAMonoid, NotEquilibrium, NotSymmetricPoint
from netsym.network import NetworkSpec, Representation, fundamental_network, rep_matrices
from netsym.representation import decompose
from netsym.representation.linalg import rank
from netsym.simulator import NetworkVectorField

from .conftest import three_cell


def classification(spec, d=1, seed=1):
    rep = rep_matrices(fundamental_network(spec), d)
    return classify_codim1(rep, decompose(rep, seed=seed))

def one_dim(*values):
    return Representation(1, tuple(sympy.ImmutableMatrix([[v]]) for v in values), 0)

def plane_class(report):
    return next(c for c in report if c.basis.cols == 2)


# --- Jordan-Chevalley ---

@pytest.mark.parametrize("L, S, N", [
    ([[0, 1], [0, 0]], [[0, 0], [0, 0]], [[0, 1], [0, 0]]),
    ([[2, 0], [0, 3]], [[2, 0], [0, 3]], [[0, 0], [0, 0]]),
    ([[1, 1], [0, 1]], [[1, 0], [0, 1]], [[0, 1], [0, 0]]),
])
def test_exact_split(L, S, N):
    jc = jordan_chevalley(sympy.Matrix(L))
    assert jc.exact
    assert sympy.Matrix(jc.S) == sympy.Matrix(S)
    assert sympy.Matrix(jc.N) == sympy.Matrix(N)

def test_exact_split_of_a_dense_matrix():
    L = sympy.Matrix([[3, 1, 2], [0, 3, 5], [0, 0, 1]])
    jc = jordan_chevalley(L)
    S, N = sympy.Matrix(jc.S), sympy.Matrix(jc.N)
    assert S + N == L
    assert S * N == N * S
    assert (N ** 3).is_zero_matrix
    assert S.is_diagonalizable()

def test_numeric_split_of_a_diagonalizable_matrix():
    rng = np.random.default_rng(3)
    Q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    L = Q @ np.diag([1.0, 1.0, 3.0]) @ Q.T
    jc = jordan_chevalley(L)
    assert not jc.exact
    assert np.allclose(jc.S, L, atol=1e-8)
    assert np.allclose(jc.N, 0.0, atol=1e-8)

def test_numeric_split_of_a_nilpotent_block():
    L = np.array([[0.0, 1.0], [0.0, 0.0]])
    jc = jordan_chevalley(L)
    assert np.allclose(jc.S, 0.0)
    assert np.allclose(jc.N, L)

def test_close_eigenvalue_clusters_are_refused():
    with pytest.raises(IllConditioned):
        jordan_chevalley(np.diag([0.0, 2e-6, 4e-6]))

def test_non_square_matrix():
    with pytest.raises(InvalidConfig):
        jordan_chevalley(sympy.Matrix([[1, 2, 3], [4, 5, 6]]))


def random_jordan_matrix(rng, n):
    """P (D + J) P^-1 with small integer eigenvalues, some repeated, and random Jordan chains."""
    eigs = [int(rng.integers(-2, 3)) for _ in range(n)]
    eigs.sort()
    core = sympy.diag(*eigs)
    for i in range(n - 1):
        if eigs[i] == eigs[i + 1] and rng.random() < 0.6:
            core[i, i + 1] = 1
    while True:
        P = sympy.Matrix(n, n, lambda i, j: int(rng.integers(-2, 3)))
        if P.det() != 0:
            break
    return P * core * P.inv()

@pytest.mark.parametrize("case", range(100))
def test_jordan_chevalley_invariants_on_random_matrices(case):
    rng = np.random.default_rng(case)
    n = 2 + case % 3
    L = random_jordan_matrix(rng, n) if case % 2 == 0 else sympy.Matrix(n, n, lambda i, j: int(rng.integers(-3, 4)))
    jc = jordan_chevalley(L)
    S, N = sympy.Matrix(jc.S), sympy.Matrix(jc.N)
    assert jc.exact
    assert S + N == L
    assert S * N == N * S
    assert (N ** n).is_zero_matrix
    # S is annihilated by the squarefree part of the characteristic polynomial
    t = sympy.Symbol("t")
    chi = sympy.Poly(L.charpoly(t).as_expr(), t)
    q = sympy.quo(chi, sympy.gcd(chi, chi.diff(t)))
    qS = sympy.zeros(n, n)
    for c in q.all_coeffs():
        qS = qS * S + c * sympy.eye(n)
    assert qS.is_zero_matrix
    assert sympy.Poly(S.charpoly(t).as_expr(), t) == chi


# --- Equivariant Taylor families ---

def members(family):
    return {e.components[0] for e in family.elements}

def test_family_under_trivial_action():
    family = equivariant_taylor_family(one_dim(1))
    u = family.symbols[0]
    assert members(family) == {LAMBDA, LAMBDA * u, u ** 2, u ** 3, LAMBDA * u ** 2, LAMBDA * u ** 3}
    assert not family.has_trivial_solution

def test_family_under_zero_action():
    family = equivariant_taylor_family(one_dim(1, 0))
    u = family.symbols[0]
    assert members(family) == {LAMBDA * u, u ** 2, u ** 3, LAMBDA * u ** 2, LAMBDA * u ** 3}
    assert family.has_trivial_solution

def test_family_under_sign_action():
    family = equivariant_taylor_family(one_dim(1, -1))
    u = family.symbols[0]
    assert members(family) == {LAMBDA * u, u ** 3, LAMBDA * u ** 3}

def test_general_member_is_equivariant():
    local = rep_matrices(fundamental_network(three_cell("sigma1"))).restrict(
        sympy.Matrix([[1, 0], [0, 0], [0, 1]]))
    family = equivariant_taylor_family(local)
    assert family.is_equivariant(family.general())
    u1 = family.symbols[0]
    # u1^2 alone leaves the plane's action
    assert not family.is_equivariant((sympy.Integer(0), u1 ** 2))

def test_coefficients_of_reads_named_values():
    family = equivariant_taylor_family(one_dim(1, -1))
    u = family.symbols[0]
    values = family.coefficients_of((2 * LAMBDA * u - 5 * u ** 3,))
    assert values is not None
    assert sorted(values.values()) == [-5, 0, 2]
    assert family.coefficients_of((u ** 2,)) is None

def test_degree_cap():
    family = equivariant_taylor_family(one_dim(1), max_degree=2)
    assert max(e.degree for e in family.elements) == 2


# --- Classification of the codimension-one families ---

@pytest.mark.parametrize("exponents, trivial, kind", [
    ([Fraction(1, 2)], False, SADDLE_NODE),
    ([Fraction(1)], True, TRANSCRITICAL),
    ([Fraction(1, 2)], True, PITCHFORK),
    ([Fraction(1), Fraction(1, 2)], True, COMPOSITE),
    ([Fraction(1)], False, COMPOSITE),
    ([], True, NONE_GENERIC),
])
def test_kind_from_exponents(exponents, trivial, kind):
    assert kind_from_exponents(trivial, exponents) == kind

@pytest.mark.parametrize("name, kinds", [
    ("sigma1", ["composite", "saddle-node"]),
    ("sigma2", ["pitchfork", "saddle-node", "transcritical"]),
    ("sigma3", ["saddle-node", "transcritical", "transcritical"]),
    ("sigma4", ["saddle-node", "transcritical"]),
    ("sigma5", ["saddle-node", "transcritical"]),
    ("sigma6", ["none-generic", "saddle-node"]),
    ("sigma7", ["pitchfork", "saddle-node", "transcritical"]),
])
def test_three_cell_catalogue_kinds(name, kinds):
    report = classification(three_cell(name))
    assert report.hypothesis_ok
    assert sorted(report.kinds) == kinds

def test_running_example_kinds(running_spec):
    assert sorted(classification(running_spec).kinds) == ["saddle-node", "transcritical", "transcritical"]

def test_fully_synchronous_summand_is_a_saddle_node(running_spec):
    report = classification(running_spec)
    cls = next(c for c in report if c.kind == SADDLE_NODE)
    assert cls.basis.cols == 1
    assert len(set(cls.basis)) == 1
    (branch,) = cls.branches
    assert branch.symmetric
    assert branch.exponent == Fraction(1, 2)
    assert str(branch.synchrony) == "{1,2,3}"
    assert cls.conditions

@pytest.mark.parametrize("name, kind, count", [
    ("sigma1", COMPOSITE, 3),
    ("sigma4", TRANSCRITICAL, 4),
    ("sigma5", SADDLE_NODE, 2),
])
def test_plane_summand_branches(name, kind, count):
    cls = plane_class(classification(three_cell(name)))
    assert cls.kind == kind
    assert cls.branch_count == count
    assert cls.family is not None and cls.family.dim == 2

def test_sigma1_plane_branch_exponents():
    cls = plane_class(classification(three_cell("sigma1")))
    exponents = sorted(b.exponent for b in cls.branches if not b.trivial)
    assert exponents == [Fraction(1, 2), Fraction(1)]
    assert sum(b.trivial for b in cls.branches) == 1

def test_complex_summand_has_no_generic_branch():
    cls = plane_class(classification(three_cell("sigma6")))
    assert cls.kind == NONE_GENERIC
    assert cls.branches == ()
    assert "complex" in cls.notes

def test_repeated_summands_violate_the_hypothesis():
    report = classification(NetworkSpec.from_dict({"cells": 3, "maps": [[1, 2, 3], [2, 2, 3], [3, 3, 2]]}), d=2)
    assert not report.hypothesis_ok
    assert report.message == HYPOTHESIS_VIOLATED
    assert len(report) == 0

def test_report_serializes(running_spec):
    d = classification(running_spec).to_dict()
    assert d["hypothesis_ok"]
    assert {c["kind"] for c in d["classes"]} == {"saddle-node", "transcritical"}
    assert all(c["summand"] >= 1 for c in d["classes"])


# --- Reduction of a concrete response function ---

@pytest.fixture
def sigma1():
    fund = fundamental_network(three_cell("sigma1"))
    return fund, rep_matrices(fund)

SIGMA1_FIELD = "lambda*x1 + x3 - x1^2"

def test_numeric_reduction_on_sigma1(sigma1):
    fund, rep = sigma1
    reduced = ls_reduce(fund, rep, parse(SIGMA1_FIELD, arity=3), [0.0, 0.0, 0.0], 0.0)
    assert reduced.kernel_dim == 2
    K = np.asarray(reduced.kernel_basis, dtype=float)
    # ker L0^S = span(e1, e3)
    assert np.allclose(K[1], 0.0)
    assert np.linalg.matrix_rank(K) == 2
    J = reduced.jacobian([0.0, 0.0], 0.0)
    assert np.allclose(J @ J, 0.0, atol=1e-10)
    assert np.linalg.matrix_rank(J, tol=1e-8) == 1
    assert np.allclose(reduced([0.0, 0.0], 0.3), 0.0, atol=1e-12)
    assert reduced.equivariance_residual(samples=10, seed=2) < 1e-8

def test_numeric_reduction_lift_is_an_equilibrium_of_the_image_part(sigma1):
    fund, rep = sigma1
    reduced = ls_reduce(fund, rep, parse(SIGMA1_FIELD, arity=3), [0.0, 0.0, 0.0], 0.0)
    X = reduced.lift([0.01, -0.02], 0.05)
    assert X.shape == (3,)

def test_exact_reduced_taylor_on_sigma1(sigma1):
    fund, rep = sigma1
    reduced = reduced_taylor(fund, rep, parse(SIGMA1_FIELD, arity=3), [0, 0, 0], 0)
    assert reduced.kernel_dim == 2
    K = sympy.Matrix(reduced.kernel_basis)
    assert rank(sympy.Matrix.hstack(K, sympy.Matrix([[1, 0], [0, 0], [0, 1]]))) == 2
    linear = sympy.Matrix([[sympy.diff(c, u).subs({s: 0 for s in reduced.symbols}).subs(LAMBDA, 0)
                            for u in reduced.symbols] for c in reduced.components])
    assert linear != sympy.zeros(2, 2)
    assert (linear ** 2).is_zero_matrix

def test_start_point_checks(sigma1):
    fund, rep = sigma1
    with pytest.raises(NotEquilibrium):
        ls_reduce(fund, rep, parse("x1 + 1", arity=3), [0.0, 0.0, 0.0])
    with pytest.raises(NotSymmetricPoint):
        ls_reduce(fund, rep, parse("x1*x2", arity=3), [1.0, 0.0, 0.0])
    with pytest.raises(InvalidConfig):
        ls_reduce(fund, rep, parse(SIGMA1_FIELD, arity=3), [0.0, 0.0])

def test_equilibrium_is_checked_before_symmetry(sigma1):
    fund, rep = sigma1
    with pytest.raises(NotEquilibrium):
        reduced_taylor(fund, rep, parse("x1 + 1", arity=3), [1, 0, 0], 0)


# --- Concrete instances ---

def test_generic_instance_on_sigma1(sigma1):
    fund, _ = sigma1
    report = classify_instance(fund, parse(SIGMA1_FIELD, arity=3), [0, 0, 0], 0, seed=1)
    assert report.status == GENERIC_INSTANCE
    assert report.generic
    assert report.bifurcation.kind == COMPOSITE
    assert len(report.predicted) == 3
    assert report.failing == ()
    # leading-order points are equilibria up to higher-order terms
    vf = NetworkVectorField.fundamental(fund, parse(SIGMA1_FIELD, arity=3))
    mu = 1e-4
    for branch, X in report.points(mu):
        if not branch.trivial:
            assert np.linalg.norm(vf(X, mu)) < 10 * mu ** 1.5

def test_non_generic_instance(sigma1):
    fund, _ = sigma1
    report = classify_instance(fund, parse("lambda*x1 + x3", arity=3), [0, 0, 0], 0, seed=1)
    assert report.status == NON_GENERIC_INSTANCE
    assert report.failing
    assert report.predicted == ()

def test_regular_point(sigma1):
    fund, _ = sigma1
    report = classify_instance(fund, parse("-x1", arity=3), [0, 0, 0], 0)
    assert report.status == REGULAR_POINT
    assert report.to_dict()["reason"] == "L0 is invertible"

def test_instance_off_equilibrium(sigma1):
    fund, _ = sigma1
    with pytest.raises(NotEquilibrium):
        classify_instance(fund, parse("x1 + 1", arity=3), [0, 0, 0], 0)


# --- Continuation ---

@pytest.fixture
def single_cell():
    return fundamental_network(NetworkSpec.from_dict({"cells": 1, "maps": [[1]]}))

@pytest.mark.parametrize("kwargs", [
    {"lambda_range": (0.5, -0.5)},
    {"lambda_range": (0.1, 0.5)},
    {"lambda_range": (-0.5, 0.5), "step": 0.0},
    {"lambda_range": (-0.5, 0.5), "X0": [0.0, 0.0]},
    {"lambda_range": (-0.5, 0.5), "subspace": [[1.0, 0.0]]},
])
def test_continuation_validation(single_cell, kwargs):
    args = {"X0": [0.0], "step": 0.05, **kwargs}
    with pytest.raises(InvalidConfig):
        continue_branches(single_cell, parse("lambda - x1", arity=1), **args)

def test_continuation_needs_an_equilibrium(single_cell):
    with pytest.raises(NotEquilibrium):
        continue_branches(single_cell, parse("lambda - x1 + 1", arity=1), [0.0], (-0.5, 0.5))

def test_regular_point_continues_one_branch(single_cell):
    runs = continue_branches(single_cell, parse("lambda - x1", arity=1), [0.0], (-0.5, 0.5), step=0.05)
    assert len(runs) == 1
    (run,) = runs
    assert run.exponent is None
    assert run.lambdas.min() < -0.4 and run.lambdas.max() > 0.4
    assert np.allclose(run.states[:, 0], run.lambdas, atol=1e-8)
    assert run.max_residual < 1e-8
    assert run.to_csv().splitlines()[0] == "lambda,X1,residual"

@pytest.mark.slow
def test_sigma1_branches_have_predicted_exponents(sigma1):
    fund, _ = sigma1
    rf = parse(SIGMA1_FIELD, arity=3)
    report = classify_instance(fund, rf, [0, 0, 0], 0, seed=1)
    runs = continue_branches(fund, rf, [0.0, 0.0, 0.0], (-0.2, 0.2), step=0.02, seed=1, predictions=report)
    assert any(r.trivial for r in runs)
    exponents = [r.exponent for r in runs if r.exponent is not None]
    assert any(abs(e - 1.0) < 0.05 for e in exponents)
    assert any(abs(e - 0.5) < 0.05 for e in exponents)
    matches = match_predictions(runs, report)
    assert all(m["matched"] for m in matches)
    for m in matches:
        if m["predicted_exponent"] is not None:
            assert m["coefficient_error"] <= 0.05
            assert abs(m["fitted_exponent"] - float(Fraction(m["predicted_exponent"]))) < 0.05
    summary = continuation_summary(runs, matches)
    assert summary["branches"] == len(runs)
    assert len(summary["predictions"]) == 3

@pytest.mark.slow
def test_sigma4_plane_has_four_linear_branches():
    fund = fundamental_network(three_cell("sigma4"))
    rf = parse("lambda*x1 + x1*x2 - 2*x1^2", arity=3)
    runs = continue_branches(fund, rf, [0.0, 0.0, 0.0], (-0.2, 0.2), step=0.02, seed=1,
                             subspace=[[1, 0], [0, 1], [0, 0]])
    assert len(runs) == 4
    assert sum(r.trivial for r in runs) == 1
    found = [r for r in runs if not r.trivial]
    assert all(abs(r.exponent - 1.0) < 0.05 for r in found)
    expected = [np.array([0.5, 0.0, 0.0]), np.array([1.0, 1.0, 0.0]), np.array([0.0, 1.0, 0.0])]
    for c in expected:
        errors = [np.linalg.norm(r.coefficients - c) / np.linalg.norm(c) for r in found]
        assert min(errors) <= 0.05
    for r in runs:
        assert r.max_residual < 1e-8
        assert np.allclose(r.states[:, 2], 0.0)


# --- Lifting to the original network ---

def test_saddle_node_lifts_to_full_synchrony(running_spec):
    report = classification(running_spec)
    cls = next(c for c in report if c.kind == SADDLE_NODE)
    lifted = lift_to_original(running_spec, cls, seed=1)
    assert lifted.kind == SADDLE_NODE
    assert lifted.branches
    assert all(str(b.synchrony) == "{1,2,3}" for b in lifted.branches)

def test_transcritical_branch_lifts_into_a_two_cluster_state(running_spec):
    report = classification(running_spec)
    cls = next(c for c in report
               if c.kind == TRANSCRITICAL and c.basis[1, 0] == 0 and c.basis[2, 0] == 0)
    lifted = lift_to_original(running_spec, cls, seed=1)
    assert lifted.fundamental_kind == TRANSCRITICAL
    assert lifted.kind == TRANSCRITICAL
    (branch,) = [b for b in lifted.branches if not b.trivial]
    assert branch.exponent == 1
    assert str(branch.synchrony) == "{1,2}∪{3}"
    assert branch.to_dict()["state"][0] == "x1 = 0"

def test_lift_equilibria_selects_consistent_states(running_spec):
    v = 0.3
    lifted = lift_equilibria(running_spec, [[0.0, 0.0, 0.0], [v, 0.0, 0.0]])
    assert sorted(tuple(x) for x in lifted) == [(0.0, 0.0, 0.0), (0.0, 0.0, v)]

def test_lift_needs_a_monoid():
    spec = NetworkSpec.from_dict({"cells": 3, "maps": [[1, 2, 1], [1, 1, 1]]})
    with pytest.raises(NotAMonoid):
        lift_equilibria(spec, [[0.0, 0.0]])
