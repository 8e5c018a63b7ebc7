import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from contactlab import models
from contactlab.errors import ChartMismatch
from contactlab.geometry import (Chart, DifferentialForm, ManifoldSpec, ScalarField, SmoothMap, VectorField,
                                 exterior_derivative, interior_product, lie_bracket, lie_derivative_form,
                                 pullback, restricted_values, wedge)

CHART = Chart(("x", "y", "z"))
SX, SY, SZ = sympy.symbols("x y z")
PTS = np.random.default_rng(3).uniform(-1.5, 1.5, size=(25, 3))


def sym(src):
    return sympy.sympify(src.replace("^", "**"), locals={"x": SX, "y": SY, "z": SZ})


def num(expr):
    f = sympy.lambdify((SX, SY, SZ), expr, "numpy")
    return np.broadcast_to(np.asarray(f(PTS[:, 0], PTS[:, 1], PTS[:, 2]), dtype=float), (len(PTS),))


ONE_FORM = {"x": "y*sin(z)", "y": "x^2 - z", "z": "exp(x*y)"}
FIELD = {"x": "y^2", "y": "cos(x) + z", "z": "x*y*z"}


def test_exterior_derivative_matches_sympy():
    a = DifferentialForm.from_coefficients(CHART, ONE_FORM)
    da = exterior_derivative(a).at(PTS)
    c = {k: sym(v) for k, v in ONE_FORM.items()}
    want = {(0, 1): sympy.diff(c["y"], SX) - sympy.diff(c["x"], SY),
            (0, 2): sympy.diff(c["z"], SX) - sympy.diff(c["x"], SZ),
            (1, 2): sympy.diff(c["z"], SY) - sympy.diff(c["y"], SZ)}
    for key, expr in want.items():
        np.testing.assert_allclose(da[key], num(expr), rtol=1e-12, atol=1e-12)


def test_lie_derivative_matches_coordinate_formula():
    a = DifferentialForm.from_coefficients(CHART, ONE_FORM)
    X = VectorField.from_components(CHART, FIELD)
    L = lie_derivative_form(X, a).coefficient_array(PTS)
    xs = (SX, SY, SZ)
    A = [sym(ONE_FORM[n]) for n in "xyz"]
    V = [sym(FIELD[n]) for n in "xyz"]
    for j in range(3):
        expr = sum(V[i] * sympy.diff(A[j], xs[i]) + A[i] * sympy.diff(V[i], xs[j]) for i in range(3))
        np.testing.assert_allclose(L[:, j], num(expr), rtol=1e-11, atol=1e-11)


def test_lie_bracket_matches_sympy():
    X = VectorField.from_components(CHART, FIELD)
    Y = VectorField.from_components(CHART, {"x": "z", "y": "x*y", "z": "sin(y)"})
    xs = (SX, SY, SZ)
    Vx = [sym(FIELD[n]) for n in "xyz"]
    Vy = [sym(s) for s in ("z", "x*y", "sin(y)")]
    got = lie_bracket(X, Y).at(PTS)
    for k in range(3):
        expr = sum(Vx[i] * sympy.diff(Vy[k], xs[i]) - Vy[i] * sympy.diff(Vx[k], xs[i]) for i in range(3))
        np.testing.assert_allclose(got[:, k], num(expr), rtol=1e-12, atol=1e-12)


def test_pullback_of_shear_map_matches_symbolic_oracle():
    # computed by hand and confirmed with sympy: phi^*(-y dx - y dy + 2 dz) = -(x + y) dx + 4 dz
    phi, target, _ = models.shear_contactomorphism()
    got = pullback(phi, target).coefficient_array(PTS)
    want = np.stack([-(PTS[:, 0] + PTS[:, 1]), np.zeros(len(PTS)), np.full(len(PTS), 4.0)], axis=1)
    np.testing.assert_allclose(got, want, atol=1e-13)


def test_pullback_along_identity():
    a = DifferentialForm.from_coefficients(CHART, ONE_FORM)
    got = pullback(SmoothMap.identity(CHART), a).coefficient_array(PTS)
    np.testing.assert_allclose(got, a.coefficient_array(PTS), atol=1e-15)


def test_interior_product_of_area_form():
    area = DifferentialForm.from_coefficients(CHART, {("x", "y"): 1.0}, degree=2)
    X = VectorField.from_components(CHART, FIELD)
    got = interior_product(X, area).coefficient_array(PTS)
    v = X.at(PTS)
    np.testing.assert_allclose(got[:, 0], -v[:, 1])
    np.testing.assert_allclose(got[:, 1], v[:, 0])
    np.testing.assert_allclose(got[:, 2], 0.0)


def test_mixing_charts_is_rejected():
    other = Chart(("u", "v", "w"))
    a = DifferentialForm.from_coefficients(CHART, {"x": 1.0})
    b = DifferentialForm.from_coefficients(other, {"u": 1.0})
    with pytest.raises(ChartMismatch):
        wedge(a, b)


def random_form(seed, degree=1):
    rng = np.random.default_rng(seed)
    fs = [models.random_scalar_field(CHART, rng) for _ in range(3)]
    a = DifferentialForm.from_coefficients(CHART, {n: f for n, f in zip("xyz", fs)})
    return a if degree == 1 else exterior_derivative(a) + wedge(a, DifferentialForm.from_coefficients(CHART, {"z": fs[0]}))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_d_squared_vanishes(seed):
    f = models.random_scalar_field(CHART, np.random.default_rng(seed))
    for a in (f.as_form(), random_form(seed)):
        dd = exterior_derivative(exterior_derivative(a))
        assert np.abs(dd.coefficient_array(PTS)).max() < 1e-10


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_wedge_of_one_forms_is_antisymmetric(seed):
    a, b = random_form(seed), random_form(seed + 1)
    ab, ba = wedge(a, b).coefficient_array(PTS), wedge(b, a).coefficient_array(PTS)
    np.testing.assert_allclose(ab, -ba, atol=1e-13)
    np.testing.assert_allclose(wedge(a, a).coefficient_array(PTS), 0.0, atol=1e-13)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_cartan_formula_on_two_forms(seed):
    w = random_form(seed, 2)
    rng = np.random.default_rng(seed)
    X = VectorField.from_components(CHART, [models.random_scalar_field(CHART, rng) for _ in range(3)])
    lhs = lie_derivative_form(X, w).coefficient_array(PTS)
    rhs = (exterior_derivative(interior_product(X, w)) + interior_product(X, exterior_derivative(w)))
    np.testing.assert_allclose(lhs, rhs.coefficient_array(PTS), atol=1e-10)


def test_sphere_samples_and_tangent_bases():
    chart = Chart(("x0", "y0", "x1", "y1"))
    S = ManifoldSpec(chart, [ScalarField.from_expression(chart, "x0^2 + y0^2 + x1^2 + y1^2 - 1")])
    pts = S.sample(50, 0)
    np.testing.assert_allclose(np.linalg.norm(pts, axis=1), 1.0, atol=1e-13)
    T = S.tangent_basis(pts)
    assert T.shape == (50, 4, 3)
    np.testing.assert_allclose(np.einsum("pia,pib->pab", T, T), np.broadcast_to(np.eye(3), (50, 3, 3)), atol=1e-13)
    np.testing.assert_allclose(np.einsum("pi,pia->pa", pts, T), 0.0, atol=1e-13)


def test_domain_constraints_respected_with_margin():
    chart = Chart(("r", "s"), bounds=((0.0, 2.0), (-1.0, 1.0)), domain_constraints=("r > s^2",))
    pts = chart.sample(np.random.default_rng(0), 200)
    assert len(pts) == 200 and np.all(pts[:, 0] - pts[:, 1] ** 2 > 1e-3)


def test_restricted_values_on_intrinsic_chart_are_plain_values():
    a = DifferentialForm.from_coefficients(CHART, ONE_FORM)
    M = ManifoldSpec(CHART)
    np.testing.assert_allclose(restricted_values(a, M, PTS), a.coefficient_array(PTS))
