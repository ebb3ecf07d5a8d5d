import random

import numpy as np
import pytest
import sympy

from netsym.errors import BoundExceeded, InvalidConfig
from netsym.network import NetworkSpec, fundamental_network, monoid_completion, rep_matrices
from netsym.representation import (
    COMPLEX, REAL, are_isomorphic, decompose, division_type, endo_algebra, endomorphism_basis,
    hom_space, krull_schmidt_check, make_summand,
)
from netsym.representation.linalg import is_invertible, is_nilpotent, rank, random_combination

from .conftest import three_cell


def rep_of(name, d=1):
    return rep_matrices(fundamental_network(three_cell(name)), d)

def columns(*vectors):
    return sympy.Matrix.hstack(*[sympy.Matrix(v) for v in vectors])

def spans_equal(B, C):
    return B.cols == C.cols and rank(sympy.Matrix.hstack(B, C)) == B.cols

def find_summand(report, *vectors):
    target = columns(*vectors)
    return next(s for s in report.summands if spans_equal(sympy.Matrix(s.basis), target))


# --- End(W) ---

def test_end_of_sigma4_plane_is_scalars():
    local = rep_of("sigma4").restrict(columns([1, 0, 0], [0, 1, 0]))
    alg = endomorphism_basis(local)
    assert alg.dim == 1
    assert sympy.Matrix(alg.basis[0]) == alg.basis[0][0, 0] * sympy.eye(2)

def test_end_of_sigma1_plane_has_nilpotent_part():
    local = rep_of("sigma1").restrict(columns([1, 0, 0], [0, 0, 1]))
    alg = endomorphism_basis(local).with_radical()
    assert alg.dim == 2
    assert alg.radical_dim == 1
    N = sympy.Matrix(alg.radical_basis[0])
    assert N[0, 1] != 0 and N[0, 0] == N[1, 0] == N[1, 1] == 0
    assert division_type(alg) == REAL

def test_end_of_running_example(running_spec):
    rep = rep_matrices(fundamental_network(running_spec))
    alg = endomorphism_basis(rep)
    assert alg.dim == 3
    for L in alg.basis:
        for A in rep.matrices:
            assert L * A == A * L

def test_end_dimension_splits_over_summands(running_spec):
    rep = rep_matrices(fundamental_network(running_spec))
    report = decompose(rep, seed=1)
    assert report.multiplicity_free
    blocks = sum(endomorphism_basis(rep.restrict(s.basis)).dim for s in report.summands)
    assert blocks == endomorphism_basis(rep).dim

def test_rotation_summand_is_complex():
    local = rep_of("sigma6").restrict(columns([1, -1, 0], [0, 1, -1]))
    alg = endo_algebra(local)
    assert alg.radical_dim == 0
    assert division_type(alg) == COMPLEX

def test_trivial_representation_is_real():
    rep = rep_matrices(fundamental_network(NetworkSpec.from_external(1, [[1]])))
    assert division_type(endo_algebra(rep)) == REAL

def test_radical_is_a_nilpotent_ideal():
    alg = endo_algebra(rep_of("sigma1"))
    rad = [sympy.Matrix(r) for r in alg.radical_basis]
    assert rad
    for x in rad:
        for y in rad:
            assert is_nilpotent(x + y)
        for z in alg.basis:
            assert is_nilpotent(sympy.Matrix(z) * x)


# --- Decomposition ---

def test_sigma2_splits_into_three_characters():
    report = decompose(rep_of("sigma2"), seed=7)
    assert [s.dim for s in report.summands] == [1, 1, 1]
    assert report.multiplicity_free
    for v in ([1, 1, 1], [1, 0, 0], [1, 1, -1]):
        summand = find_summand(report, v)
        assert summand.irreducible and summand.type_label == REAL

def test_trivial_monoid_is_one_summand():
    rep = rep_matrices(fundamental_network(NetworkSpec.from_external(2, [[1, 2]])))
    report = decompose(rep)
    assert len(report.summands) == 1 and report.summands[0].dim == 1

def test_sigma5_has_an_indecomposable_plane():
    report = decompose(rep_of("sigma5"), seed=3)
    assert sorted(s.dim for s in report.summands) == [1, 2]
    plane = next(s for s in report.summands if s.dim == 2)
    assert plane.indecomposable and not plane.irreducible
    assert report.multiplicity_free

def test_summands_form_an_invariant_direct_sum(three_cell_specs):
    for name in three_cell_specs:
        rep = rep_of(name)
        report = decompose(rep, seed=11)
        assert sum(s.dim for s in report.summands) == rep.ambient_dim
        assert not report.unresolved
        for P in report.projections():
            for A in rep.matrices:
                assert P * A == A * P

def test_indecomposable_ends_are_local():
    rng = np.random.default_rng(0)
    rep = rep_of("sigma1")
    for s in decompose(rep, seed=5).summands:
        alg = endo_algebra(rep.restrict(s.basis))
        samples = [random_combination([sympy.Matrix(b) for b in alg.basis], rng) for _ in range(50)]
        assert alg.is_local(samples)
        assert alg.quotient_dim in (1, 2, 4)

def test_inflated_representation():
    report = decompose(rep_of("sigma2", d=2), seed=2)
    assert report.ambient_dim == 6
    assert [s.dim for s in report.summands] == [1] * 6
    assert not report.multiplicity_free

def test_decomposition_bound():
    with pytest.raises(BoundExceeded):
        decompose(rep_of("sigma2", d=22))

def test_decomposition_is_deterministic_per_seed():
    a = decompose(rep_of("sigma5"), seed=13).to_dict()
    b = decompose(rep_of("sigma5"), seed=13).to_dict()
    assert a == b


# --- Homomorphisms and isomorphism ---

def test_hom_between_distinct_characters_vanishes():
    rep = rep_of("sigma2")
    trivial = make_summand(rep, columns([1, 1, 1]))
    sign = make_summand(rep, columns([1, 1, -1]))
    assert hom_space(rep, trivial, sign) == []
    assert not are_isomorphic(rep, trivial, sign)[0]
    assert hom_space(rep, sign, sign)

def test_trivial_to_sigma1_plane_has_no_maps():
    rep = rep_of("sigma1")
    trivial = make_summand(rep, columns([1, 1, 1]))
    plane = make_summand(rep, columns([1, 0, 0], [0, 0, 1]))
    assert hom_space(rep, trivial, plane) == []

def test_sigma5_complements_are_isomorphic():
    rep = rep_of("sigma5")
    first = make_summand(rep, columns([1, 1, 0], [0, 0, 1]))
    second = make_summand(rep, columns([1, 0, 1], [0, 1, 0]))
    same, witness = are_isomorphic(rep, first, second, seed=4)
    assert same and is_invertible(witness)
    assert are_isomorphic(rep, first, first)[0]

def test_krull_schmidt():
    assert krull_schmidt_check(rep_of("sigma4"), [1, 2, 3])
    trivial = rep_matrices(fundamental_network(NetworkSpec.from_external(1, [[1]])))
    assert krull_schmidt_check(trivial, [1, 2])
    with pytest.raises(InvalidConfig):
        krull_schmidt_check(trivial, [1])


# --- Sweeps over random monoids ---

def random_monoid_reps(count, seed, max_cells=3, max_size=6):
    """Fundamental representations of monoids generated by random maps, sizes 2..max_size."""
    rng = random.Random(seed)
    reps = []
    while len(reps) < count:
        N = rng.randint(2, max_cells)
        maps = {tuple(rng.randint(1, N) for _ in range(N)) for _ in range(rng.randint(1, 2))}
        completed = monoid_completion(NetworkSpec.from_external(N, sorted(maps)))
        if 2 <= completed.size <= max_size:
            reps.append(rep_matrices(fundamental_network(completed)))
    return reps

@pytest.mark.slow
@pytest.mark.parametrize("index, rep", list(enumerate(random_monoid_reps(50, seed=2024))))
def test_krull_schmidt_on_random_monoids(index, rep):
    assert krull_schmidt_check(rep, [index, index + 101, index + 202])

@pytest.mark.parametrize("name", ["sigma1", "sigma2", "sigma3", "sigma4", "sigma5", "sigma6", "sigma7"])
def test_indecomposable_ends_are_invertible_or_nilpotent(name):
    rng = np.random.default_rng(17)
    rep = rep_of(name)
    for s in decompose(rep, seed=3).summands:
        assert s.indecomposable
        alg = endo_algebra(rep.restrict(s.basis))
        basis = [sympy.Matrix(b) for b in alg.basis]
        radical = [sympy.Matrix(r) for r in alg.radical_basis]
        samples = [random_combination(basis, rng) for _ in range(30)] + radical
        if radical:
            samples += [random_combination(radical, rng) for _ in range(10)]
        for M in samples:
            assert is_invertible(M) or is_nilpotent(M)
        for R in radical:
            assert is_nilpotent(R)
