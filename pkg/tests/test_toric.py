from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st
from sympy.matrices.normalforms import smith_normal_form

from contactlab import models
from contactlab.errors import EmptyInterior, NotCoprime, NotGoodCone, NotPrimitive, ZeroMomentValue
from contactlab.toric import (ConeSpec, TorusActionSpec, cone_faces, is_good, lens_space_info, lerman_pipeline,
                              normalize_contact_form)
from contactlab.toric.lattice import (column_hermite, feasible_point, integer_kernel, is_zbasis, matmul,
                                      smith_invariants)

matrices = st.integers(1, 4).flatmap(lambda r: st.integers(1, 4).flatmap(
    lambda c: st.lists(st.lists(st.integers(-6, 6), min_size=c, max_size=c), min_size=r, max_size=r)))


def sympy_invariants(A):
    D = smith_normal_form(sympy.Matrix(A), domain=sympy.ZZ)
    return tuple(abs(int(D[i, i])) for i in range(min(D.shape)))


@pytest.mark.parametrize("A, want", [([[1, 1], [0, 2]], (1, 2)), ([[0, -1], [1, 1]], (1, 1)),
                                     ([[2, 4], [6, 8]], (2, 4)), ([[0, 0]], (0,))])
def test_known_invariant_factors(A, want):
    assert tuple(smith_invariants(A)) == want


@settings(max_examples=200, deadline=None)
@given(matrices)
def test_smith_invariants_match_sympy(A):
    assert tuple(smith_invariants(A)) == sympy_invariants(A)


@settings(max_examples=200, deadline=None)
@given(matrices)
def test_column_hermite_and_kernel(A):
    H, U, r = column_hermite(A)
    assert abs(sympy.Matrix(U).det()) == 1
    AU = matmul(A, U)
    assert all(AU[i][:len(H[0])] == H[i][:len(H[0])] for i in range(len(A)))
    assert all(v == 0 for row in AU for v in row[r:])
    K = integer_kernel(A)
    assert len(K) == len(A[0]) - sympy.Matrix(A).rank() == len(A[0]) - r
    for k in K:
        assert all(sum(a * b for a, b in zip(row, k)) == 0 for row in A)


def test_kernel_of_nonminimal_cone():
    assert integer_kernel([[1, 0, 1], [0, 1, 1]]) == [[1, 1, -1]]


def test_zbasis_test():
    assert is_zbasis([[1, 0, 0], [1, 2, 0]]) == (False, (1, 2))
    assert is_zbasis([[1, 0, 0], [0, 0, 1]])[0]


def test_feasible_point_is_exact():
    eqs = [([1, 1, 0], Fraction(0))]
    ineqs = [([1, 0, 0], Fraction(1)), ([0, 0, 1], Fraction(1, 3))]
    x = feasible_point(eqs, ineqs, 3)
    assert x[0] + x[1] == 0 and x[0] >= 1 and x[2] >= Fraction(1, 3)
    assert feasible_point([], [([1], Fraction(1)), ([-1], Fraction(0))], 1) is None


def test_plane_cone_faces():
    faces = cone_faces(ConeSpec([[0, -1], [1, 1]]))
    assert sorted(f.label() for f in faces) == ["{1}", "{2}"]
    assert all(f.zbasis for f in faces)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_orthant_faces(n):
    faces = cone_faces(ConeSpec([[int(i == j) for j in range(n)] for i in range(n)]))
    assert len(faces) == 2 ** n - 2 and all(f.zbasis for f in faces)


def test_counterexample_witness():
    rep = is_good(ConeSpec([[1, 0, 0], [1, 2, 0], [0, 0, 1]]))
    assert not rep.good and rep.witness.label() == "{1,2}" and rep.witness.invariants == (1, 2)


def test_cone_errors():
    with pytest.raises(NotPrimitive):
        ConeSpec([[2, 0], [0, 1]])
    with pytest.raises(EmptyInterior):
        cone_faces(ConeSpec([[1, 0], [-1, 0]]))


def test_nonminimal_cone_reports_redundancy():
    C = ConeSpec([[1, 0], [0, 1], [1, 1]])
    assert not C.is_minimal and C.redundant_normals() == [2]


@pytest.mark.parametrize("p, q, norm", [(0, 1, (0, 1)), (1, 0, (1, 0)), (2, 1, (2, 1)), (5, 7, (5, 2)),
                                        (7, 3, (7, 2)), (-5, 2, (5, 2))])
def test_lens_normalization(p, q, norm):
    assert lens_space_info(p, q).normalized == norm


def test_lens_requires_coprime():
    with pytest.raises(NotCoprime):
        lens_space_info(4, 2)


def test_lerman_rejects_bad_cone():
    with pytest.raises(NotGoodCone):
        lerman_pipeline(ConeSpec([[1, 0, 0], [1, 2, 0], [0, 0, 1]]))


def test_lerman_exact_data_for_nonminimal_cone():
    rep = lerman_pipeline(ConeSpec([[1, 0], [0, 1], [1, 1]]), samples=50)
    assert rep.kernel_basis == [[1, 1, -1]] and rep.dim_N == 1 and rep.discrete_invariants == ()
    tau = sympy.Matrix(rep.tau)
    sigma = sympy.Matrix([[sympy.Rational(v.numerator, v.denominator) for v in row] for row in rep.sigma])
    assert tau * sigma == sympy.eye(2)
    assert rep.passed


def test_moment_map_on_weighted_sphere():
    entry = models.build("weighted_sphere", n=1, a=(1, 2))
    spec = TorusActionSpec(entry.manifold, entry.extras["rotations"])
    assert spec.check(entry.manifold.sample(20, 0))["passed"]
    single = TorusActionSpec(entry.manifold, entry.extras["rotations"][:1])
    with pytest.raises(ZeroMomentValue):
        normalize_contact_form(single, np.array([[0.0, 0.0, 1.0, 0.0]]))


CONES = [[[0, -1], [1, 1]], [[1, 0], [0, 1]], [[1, 0, 0], [1, 2, 0], [0, 0, 1]], [[1, 0, 0], [0, 1, 0], [0, 0, 1]]]


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(CONES), st.lists(st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(-3, 3)),
                                        min_size=1, max_size=6))
def test_goodness_is_invariant_under_lattice_changes(normals, moves):
    n = len(normals[0])
    A = [[int(i == j) for j in range(n)] for i in range(n)]
    for i, j, c in moves:
        i, j = i % n, j % n
        if i != j:
            A[i] = [a + c * b for a, b in zip(A[i], A[j])]
    moved = [[sum(A[r][k] * v[k] for k in range(n)) for r in range(n)] for v in normals]
    assert is_good(ConeSpec(moved)).good == is_good(ConeSpec(normals)).good
