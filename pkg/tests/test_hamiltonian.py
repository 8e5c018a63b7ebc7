import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from contactlab import models
from contactlab.errors import NotContactField, NotReebIntegral
from contactlab.geometry import VectorField
from contactlab.hamiltonian import (alpha_of, check_bracket_laws, function_of_field, hamiltonian_field,
                                    jacobi_bracket, reeb_integral_properties)

STD = models.build("standard", n=1).manifold  # chart (z, x, y), alpha = dz + x dy
PTS = STD.sample(30, 0)


def test_hamiltonian_field_of_coordinates():
    # hand-derived on dz + x dy from alpha(X) = H and i_X dalpha = dH(R) alpha - dH:
    # X_1 = d/dz, X_x = d/dy, X_y = y d/dz - d/dx
    z, x, y = PTS.T
    zeros, ones = np.zeros_like(x), np.ones_like(x)
    np.testing.assert_allclose(hamiltonian_field(STD, 1.0).at(PTS), np.stack([ones, zeros, zeros], 1), atol=1e-13)
    np.testing.assert_allclose(hamiltonian_field(STD, "x").at(PTS), np.stack([zeros, zeros, ones], 1), atol=1e-13)
    np.testing.assert_allclose(hamiltonian_field(STD, "y").at(PTS), np.stack([y, -ones, zeros], 1), atol=1e-13)


def test_bracket_of_coordinates():
    # [x, y] = X_x(y) - y R(x) = 1 and [1, z] = R(z) = 1
    np.testing.assert_allclose(jacobi_bracket(STD, "x", "y").at(PTS), 1.0, atol=1e-13)
    np.testing.assert_allclose(jacobi_bracket(STD, 1.0, "z").at(PTS), 1.0, atol=1e-13)


@pytest.mark.parametrize("mode", ["char1", "lie"])
def test_bracket_modes_agree(mode):
    rng = np.random.default_rng(5)
    f, g = (models.random_scalar_field(STD.chart, rng) for _ in range(2))
    a = jacobi_bracket(STD, f, g, "char2").at(PTS)
    np.testing.assert_allclose(jacobi_bracket(STD, f, g, mode).at(PTS), a, atol=1e-10)


def test_unknown_mode():
    with pytest.raises(ValueError):
        jacobi_bracket(STD, "x", "y", "poisson")


def test_round_trip_rejects_non_contact_field():
    with pytest.raises(NotContactField):
        function_of_field(STD, VectorField.coordinate(STD.chart, "x"))


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000))
def test_alpha_of_hamiltonian_field_is_h(seed):
    M = [STD, models.build("torus_family", n=3).manifold][seed % 2]
    H = models.random_scalar_field(M.chart, np.random.default_rng(seed))
    p = M.sample(10, seed)
    np.testing.assert_allclose(alpha_of(M, hamiltonian_field(M, H)).at(p), H.at(p), atol=1e-12)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10_000))
def test_bracket_laws_on_weighted_sphere(seed):
    M = models.build("weighted_sphere", n=1, a=(1, 2)).manifold
    rng = np.random.default_rng(seed)
    fs = [models.random_scalar_field(M.chart, rng, terms=2) for _ in range(3)]
    rep = check_bracket_laws(M, fs, M.sample(10, seed), rng)
    assert rep.max("antisymmetry") < 1e-9 and rep.max("jacobi") < 1e-6
    assert max(rep.residuals.values()) < 1e-7


def test_reeb_integrals_commute_on_weighted_sphere():
    entry = models.build("weighted_sphere", n=2, a=(1, 2, 3))
    f0, f1, f2 = entry.extras["integrals"]
    rep = reeb_integral_properties(entry.manifold, f0, f1, entry.manifold.sample(30, 0), g2=f2)
    assert rep.flags_agree and max(rep.xf_g, rep.xg_f, rep.bracket, rep.closure) < 1e-8


def test_reeb_integral_precondition():
    with pytest.raises(NotReebIntegral):
        reeb_integral_properties(STD, "z", "x", PTS)
