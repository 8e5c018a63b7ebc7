import numpy as np
import pytest

from contactlab import models
from contactlab.errors import LeftDomain, NotLevelSet
from contactlab.flows import (conservation_report, hamiltonian_vs_reeb_trajectories, integrate, rk4_order_ratio,
                              transported_alpha_drift)
from contactlab.geometry import VectorField

A = (1.0, 2.0)
ENTRY = models.build("weighted_sphere", n=1, a=A)
S3 = ENTRY.manifold
Z0 = np.array([0.6, 0.0, 0.0, 0.8])


def rotation_flow(z0, t):
    # the Reeb flow rotates z_j by the angle 4 t / a_j
    out = np.empty(4)
    for j, w in enumerate(A):
        c = complex(z0[2 * j], z0[2 * j + 1]) * np.exp(1j * 4.0 * t / w)
        out[2 * j], out[2 * j + 1] = c.real, c.imag
    return out


def test_reeb_flow_matches_rotation_and_conserves_integrals():
    f = {f"f{j}": g for j, g in enumerate(ENTRY.extras["integrals"])}
    trace = integrate(S3, S3.reeb_field, Z0, 2.0, 1e-3, f)
    assert max(conservation_report(trace, f).values()) < 1e-10
    np.testing.assert_allclose(trace.states[-1], rotation_flow(Z0, 2.0), atol=1e-9)
    np.testing.assert_allclose(np.linalg.norm(trace.states, axis=1), 1.0, atol=1e-12)


def test_rk4_order_on_nonlinear_flow():
    e1, e2, ratio = rk4_order_ratio(S3, S3.reeb_field, Z0, 3.0, 0.05, rotation_flow)
    assert e2 > 1e-12
    assert 12.0 <= ratio <= 20.0


def test_action_angle_flow_is_integrated_exactly():
    from contactlab.integrability import build_action_angle_model
    model = build_action_angle_model(1, "0.5*y1^2")
    z = np.array([0.3, 1.0, 1.2])
    end = integrate(model.base, model.X, z, 1.0, 0.1).states[-1]
    np.testing.assert_allclose(end, model.closed_form_flow(z, 1.0), atol=1e-13)


def test_transported_frame_keeps_alpha_for_strict_field():
    M = models.build("standard", n=1).manifold
    X = models.exp_shear_field(M.chart)
    assert transported_alpha_drift(M, X, [0.1, 0.2, -0.3], 0.2, 1e-3) < 1e-10


def test_transported_frame_detects_non_strict_field():
    M = models.build("standard", n=1).manifold
    X = VectorField.from_components(M.chart, ["2*z", "x", "y"])  # L_X alpha = 2 alpha
    assert transported_alpha_drift(M, X, [0.1, 0.2, -0.3], 0.2, 1e-3) > 1e-2


def test_leaving_the_domain():
    M = models.build("cylindrical").manifold
    X = VectorField.from_components(M.chart, [-1.0, 0.0, 0.0])
    with pytest.raises(LeftDomain) as info:
        integrate(M, X, [0.5, 1.0, 0.0], 1.0, 0.01)
    assert 0.4 < info.value.t < 0.6


def test_invalid_step():
    with pytest.raises(ValueError):
        integrate(S3, S3.reeb_field, Z0, 1.0, 0.0)


def test_csv_round_trips_exactly(tmp_path):
    trace = integrate(S3, S3.reeb_field, Z0, 0.1, 0.01, {"f0": ENTRY.extras["integrals"][0]})
    path = tmp_path / "flow.csv"
    text = trace.to_csv(path)
    assert text.splitlines()[0] == "t,x0,y0,x1,y1,f0"
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    np.testing.assert_array_equal(data[:, 1:5], trace.states)


def test_collinearity_requires_level_set():
    plane = models.build("symplectic_plane", n=2)
    W = plane.manifold
    r2 = plane.extras["radius2"]
    report = hamiltonian_vs_reeb_trajectories(W.manifold, W.omega, r2, W.liouville, r2 - 1.0)
    assert report.passed
    np.testing.assert_allclose(np.abs(report.speed_ratio), report.speed_ratio[0] * np.sign(report.speed_ratio[0]),
                               rtol=1e-10)
    with pytest.raises(NotLevelSet):
        hamiltonian_vs_reeb_trajectories(W.manifold, W.omega, "x1", W.liouville, r2 - 1.0)
