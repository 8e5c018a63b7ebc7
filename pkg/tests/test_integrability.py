import numpy as np
import pytest

from contactlab import models
from contactlab.errors import BadComponentList, DegenerateFrequencyDenominator, DimensionMismatch
from contactlab.integrability import (IntegrableSystemSpec, build_action_angle_model, build_normal_form_model,
                                      check_integrable, span_diagnostics)


def test_action_angle_frequencies_match_hand_computation():
    # y0 = y1^2 / 2: w0 = 1 / (y0 - y1 y0') = -2 / y1^2, w1 = -y1 w0
    model = build_action_angle_model(1, "0.5*y1^2")
    w = model.frequencies(np.array([1.5]))
    np.testing.assert_allclose(w, [-2 / 1.5 ** 2, 2 / 1.5], rtol=1e-14)
    pts = model.base.sample(20, 0)
    R = model.base.reeb_field.at(pts)
    np.testing.assert_allclose(R[:, :2], model.frequencies(pts[:, 2:]), atol=1e-12)
    np.testing.assert_allclose(R[:, 2:], 0.0, atol=1e-14)


def test_action_angle_model_is_integrable():
    rep = check_integrable(build_action_angle_model(2, "1 + 0.1*y1*y2"), samples=50)
    assert rep.passed and rep.independence_fraction == 1.0


def test_degenerate_frequency_denominator():
    with pytest.raises(DegenerateFrequencyDenominator):
        build_action_angle_model(1, "y1")


@pytest.mark.parametrize("comps", [("elliptic", "hyperbolic"), ("focus_pair",)])
def test_normal_form_models(comps):
    spec = build_normal_form_model(3, 1, comps)
    rep = check_integrable(spec, samples=60)
    assert rep.max_residual < 1e-10
    span = span_diagnostics(spec, samples=20)
    assert span.min_rank == span.expected_rank and span.involutivity < 1e-10


@pytest.mark.parametrize("n, k, comps", [(2, 1, ()), (2, 3, ()), (2, 0, ("parabolic", "elliptic"))])
def test_bad_component_lists(n, k, comps):
    with pytest.raises(BadComponentList):
        build_normal_form_model(n, k, comps)


def test_wrong_number_of_integrals():
    M = models.build("weighted_sphere", n=2, a=(1, 2, 3)).manifold
    with pytest.raises(DimensionMismatch):
        IntegrableSystemSpec(M, M.reeb_field, ["x0^2 + y0^2"])


def test_non_reeb_invariant_function_fails():
    M = models.build("standard", n=1).manifold
    rep = check_integrable(IntegrableSystemSpec(M, M.reeb_field, ["z"]), samples=30)
    assert not rep.passed and rep.residuals["[1,f_i]"] == pytest.approx(1.0)


def test_independence_failures_lie_on_coordinate_locus():
    entry = models.build("weighted_sphere", n=1, a=(1, 2))
    M = entry.manifold
    pts = np.array([[1.0, 0.0, 0.0, 0.0], [0.6, 0.0, 0.8, 0.0], [0.0, 0.0, 0.0, 1.0]])
    spec = IntegrableSystemSpec(M, M.reeb_field, entry.extras["integrals"][:1])
    rep = check_integrable(spec, points=pts)
    assert len(rep.failures) == 2 and rep.independence_fraction == pytest.approx(1 / 3)
