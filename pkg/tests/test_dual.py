import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from contactlab import dual


def d(f, x):
    t = dual.new_tag()
    return dual.derivative(f(dual.Dual(t, np.float64(x), 1.0)), t)


@pytest.mark.parametrize("f, df", [
    (dual.sin, np.cos),
    (dual.cos, lambda x: -np.sin(x)),
    (dual.exp, np.exp),
    (dual.tan, lambda x: 1 / np.cos(x) ** 2),
    (dual.sinh, np.cosh),
    (dual.cosh, np.sinh),
    (lambda x: dual.log(x), lambda x: 1 / x),
    (lambda x: dual.sqrt(x), lambda x: 0.5 / np.sqrt(x)),
    (lambda x: dual.power(x, 3), lambda x: 3 * x ** 2),
    (lambda x: dual.divide(1.0, x), lambda x: -1 / x ** 2),
])
def test_elementary_derivatives(f, df):
    for x in (0.3, 0.9, 1.7):
        assert d(f, x) == pytest.approx(df(x), rel=1e-14)


def test_nested_tags_give_mixed_partial():
    s, t = dual.new_tag(), dual.new_tag()
    x = dual.Dual(s, np.float64(0.7), 1.0)
    y = dual.Dual(t, np.float64(1.3), 1.0)
    f = dual.sin(x * y)
    fy = dual.derivative(f, t)
    fxy = dual.derivative(fy, s)
    xv, yv = 0.7, 1.3
    assert fxy == pytest.approx(np.cos(xv * yv) - xv * yv * np.sin(xv * yv), rel=1e-14)


def test_lstsq_derivative_matches_finite_differences():
    rng = np.random.default_rng(0)
    A0, A1 = rng.normal(size=(4, 4)), rng.normal(size=(4, 4))
    b0, b1 = rng.normal(size=4), rng.normal(size=4)
    t = dual.new_tag()
    x = dual.lstsq(dual.Dual(t, A0, A1), dual.Dual(t, b0, b1))
    h = 1e-6
    fd = (np.linalg.solve(A0 + h * A1, b0 + h * b1) - np.linalg.solve(A0 - h * A1, b0 - h * b1)) / (2 * h)
    np.testing.assert_allclose(dual.derivative(x, t), fd, rtol=1e-6, atol=1e-8)
    np.testing.assert_allclose(dual.real(x), np.linalg.solve(A0, b0), rtol=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3))
def test_product_and_quotient_rules(a, b):
    s = dual.new_tag()
    x = dual.Dual(s, np.float64(a), 1.0)
    p = x * x * np.float64(b) + x
    assert dual.derivative(p, s) == pytest.approx(2 * a * b + 1, rel=1e-12, abs=1e-12)
    q = dual.divide(x, 2.0 + dual.power(x, 2))
    want = (2 + a * a - 2 * a * a) / (2 + a * a) ** 2
    assert dual.derivative(q, s) == pytest.approx(want, rel=1e-12, abs=1e-12)
