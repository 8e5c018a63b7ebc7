import numpy as np
import pytest

from contactlab import models
from contactlab.contact import SymplecticManifold, check_symplectic, reeb
from contactlab.errors import BadParams


@pytest.mark.parametrize("entry", models.contact_entries(), ids=lambda e: e.manifold.name)
def test_closed_form_reeb_matches_solver(entry):
    M = entry.manifold
    pts = M.sample(60, 2)
    np.testing.assert_allclose(reeb(M, pts), entry.closed_form_reeb.at(pts), atol=1e-11)


def test_weighted_sphere_generators_are_hamiltonian_fields():
    from contactlab.hamiltonian import hamiltonian_field
    entry = models.build("weighted_sphere", n=1, a=(1, 3))
    M = entry.manifold
    pts = M.sample(30, 0)
    for f, G in zip(entry.extras["integrals"], entry.extras["generators"]):
        np.testing.assert_allclose(hamiltonian_field(M, f).at(pts), G.at(pts), atol=1e-11)


@pytest.mark.parametrize("key, params", [
    ("standard", {"n": 0}),
    ("torus_family", {"n": 0}),
    ("torus_family", {"n": 1.5}),
    ("weighted_sphere", {"n": 1, "a": (1, -2)}),
    ("weighted_sphere", {"n": 2, "a": (1, 2)}),
    ("nonexistent", {}),
    ("standard", {"m": 2}),
])
def test_bad_parameters(key, params):
    with pytest.raises(BadParams):
        models.build(key, **params)


def test_symplectic_entries_are_symplectic():
    for entry in (models.build("symplectic_plane", n=2), models.build("symplectisation", base="standard", n=1)):
        W = entry.manifold
        assert isinstance(W, SymplecticManifold)
        check_symplectic(W.manifold, W.omega, W.sample(30, 0))


def test_random_scalar_field_is_seeded():
    chart = models.build("standard", n=1).manifold.chart
    a = models.random_scalar_field(chart, np.random.default_rng(7))
    b = models.random_scalar_field(chart, np.random.default_rng(7))
    pts = np.random.default_rng(0).uniform(-1, 1, (5, 3))
    np.testing.assert_array_equal(a.at(pts), b.at(pts))
