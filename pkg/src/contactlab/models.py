"""Catalog of concrete contact and symplectic manifolds.

Complex coordinates are always realised as real pairs ``z_j = x_j + i y_j``;
charts on ``C^{n+1}`` use the order ``(x0, y0, x1, y1, ...)``. In these
coordinates ``z dz-bar - z-bar dz = -2i (x dy - y dx)``, which is how the
weighted sphere form below is obtained.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .contact import (StrictContactManifold, SymplecticManifold, check_symplectic, contactise,
                      symplectise, verify_contact)
from .errors import BadParams
from .geometry import Chart, DifferentialForm, ManifoldSpec, ScalarField, VectorField

TWO_PI = 2.0 * math.pi


@dataclass
class CatalogEntry:
    key: str
    params: dict
    manifold: object  # StrictContactManifold or SymplecticManifold
    description: str
    closed_form_reeb: Optional[VectorField] = None
    extras: dict = field(default_factory=dict)

    @property
    def is_contact(self):
        return isinstance(self.manifold, StrictContactManifold)


def _pairs(n, start=1, prefix=("x", "y")):
    names = []
    for j in range(start, start + n):
        names += [f"{prefix[0]}{j}", f"{prefix[1]}{j}"]
    return names


def standard(n: int = 1) -> CatalogEntry:
    """``(R^{2n+1}, dz + sum x_j dy_j)``; chart order ``(z, x1, y1, ..., xn, yn)``."""
    if n < 1:
        raise BadParams("n must be at least 1")
    names = ["z", "x", "y"] if n == 1 else ["z"] + _pairs(n)
    chart = Chart(tuple(names))
    coeffs = {"z": 1.0}
    for j in range(n):
        coeffs[names[2 + 2 * j]] = names[1 + 2 * j]
    alpha = DifferentialForm.from_coefficients(chart, coeffs, label="alpha_st")
    R = VectorField.coordinate(chart, "z")
    M = StrictContactManifold(ManifoldSpec(chart, name=f"R^{2 * n + 1}"), alpha, f"standard(n={n})", R,
                              "standard contact form dz + sum x_j dy_j")
    return CatalogEntry("standard", {"n": n}, M, M.provenance, R)


def torus_family(n: int = 1) -> CatalogEntry:
    """``cos(nt) dtheta1 + sin(nt) dtheta2`` on the 3-torus ``(t, theta1, theta2)``."""
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise BadParams(f"the torus family needs a positive integer n, got {n!r}")
    chart = Chart(("t", "θ1", "θ2"), (True, True, True))
    alpha = DifferentialForm.from_coefficients(chart, {"θ1": f"cos({n}*t)", "θ2": f"sin({n}*t)"},
                                               label=f"alpha_{n}")
    R = VectorField.from_components(chart, [0.0, f"cos({n}*t)", f"sin({n}*t)"], "R_closed")
    M = StrictContactManifold(ManifoldSpec(chart, name="S1 x T2"), alpha, f"torus_family(n={n})", R,
                              "cos(nt) dtheta1 + sin(nt) dtheta2 on S^1 x T^2")
    return CatalogEntry("torus_family", {"n": n}, M, M.provenance, R)


def cylindrical(r_max: float = 4.0) -> CatalogEntry:
    """``cos(r) dz + r sin(r) dtheta`` on ``r > 0, 0 < theta < 2 pi``, chart ``(r, theta, z)``.

    ``alpha ^ dalpha = (r + sin r cos r) dr ^ dtheta ^ dz`` which is positive for r > 0.
    """
    chart = Chart(("r", "θ", "z"), (False, False, False), ((0.0, r_max), (0.0, TWO_PI), (-2.0, 2.0)),
                  ("r > 0", "θ > 0", "θ < 2*pi"))
    alpha = DifferentialForm.from_coefficients(chart, {"z": "cos(r)", "θ": "r*sin(r)"}, label="alpha_U")
    den = "(r + sin(r)*cos(r))"
    R = VectorField.from_components(chart, [0.0, f"sin(r)/{den}", f"(sin(r) + r*cos(r))/{den}"], "R_closed")
    M = StrictContactManifold(ManifoldSpec(chart, name="U"), alpha, "cylindrical", R,
                              "cos(r) dz + r sin(r) dtheta in cylindrical coordinates")
    return CatalogEntry("cylindrical", {"r_max": r_max}, M, M.provenance, R)


def _sphere_sampler(dim):
    def sample(rng, count):
        g = rng.standard_normal((count, dim))
        return g / np.linalg.norm(g, axis=1, keepdims=True)
    return sample


def sphere_spec(n_complex: int, name="") -> ManifoldSpec:
    """Unit sphere in ``C^{n_complex}`` as the level set ``|z|^2 - 1 = 0``."""
    names = _pairs(n_complex, start=0)
    chart = Chart(tuple(names))
    F = ScalarField.from_expression(chart, " + ".join(f"{v}^2" for v in names) + " - 1")
    return ManifoldSpec(chart, [F], name or f"S^{2 * n_complex - 1}", _sphere_sampler(len(names)))


def weighted_sphere(n: int = 1, a=None) -> CatalogEntry:
    """``alpha = (1/4) sum a_j (x_j dy_j - y_j dx_j)`` on ``S^{2n+1}``.

    Closed forms: ``R = sum (4/a_j)(x_j d/dy_j - y_j d/dx_j)``; the rotation
    generators ``x_j d/dy_j - y_j d/dx_j`` have alpha-moment ``a_j |z_j|^2 / 4``;
    ``f_j = |z_j|^2`` has Hamiltonian field ``(4/a_j)`` times the j-th rotation.
    """
    a = tuple(float(v) for v in (a if a is not None else [1.0] * (n + 1)))
    if n < 1 or len(a) != n + 1 or any(v <= 0 for v in a):
        raise BadParams(f"weighted sphere needs n >= 1 and n+1 positive weights, got n={n}, a={a}")
    S = sphere_spec(n + 1)
    chart = S.chart
    coeffs, reeb = {}, []
    rotations, integrals = [], []
    for j, w in enumerate(a):
        x, y = f"x{j}", f"y{j}"
        coeffs[x] = f"-{w / 4!r}*{y}"
        coeffs[y] = f"{w / 4!r}*{x}"
        reeb += [f"-{4 / w!r}*{y}", f"{4 / w!r}*{x}"]
        comps = [0.0] * chart.dim
        comps[2 * j], comps[2 * j + 1] = f"-{y}", x
        rotations.append(VectorField.from_components(chart, comps, f"rot{j}"))
        integrals.append(ScalarField.from_expression(chart, f"{x}^2 + {y}^2"))
    alpha = DifferentialForm.from_coefficients(chart, coeffs, label="alpha_a")
    R = VectorField.from_components(chart, reeb, "R_closed")
    M = StrictContactManifold(S, alpha, f"weighted_sphere(n={n}, a={a})", R,
                              "(i/8) sum a_j (z_j dzbar_j - zbar_j dz_j) on the unit sphere")
    generators = [(4.0 / w) * r for w, r in zip(a, rotations)]
    extras = {"rotations": rotations, "integrals": integrals, "generators": generators, "weights": a}
    return CatalogEntry("weighted_sphere", {"n": n, "a": a}, M, M.provenance, R, extras)


def symplectic_plane(n: int = 1) -> CatalogEntry:
    """``(R^{2n}, sum dy_i ^ dx_i)`` with Liouville field ``(1/2) sum (x d/dx + y d/dy)``."""
    if n < 1:
        raise BadParams("n must be at least 1")
    names = _pairs(n)
    chart = Chart(tuple(names))
    omega = DifferentialForm.from_coefficients(
        chart, {(f"y{j}", f"x{j}"): 1.0 for j in range(1, n + 1)}, degree=2, label="omega_st")
    Y = VectorField.from_components(chart, [f"0.5*{v}" for v in names], "Y_radial")
    W = SymplecticManifold(ManifoldSpec(chart, name=f"R^{2 * n}"), omega, Y, f"symplectic_plane(n={n})")
    radius2 = ScalarField.from_expression(chart, " + ".join(f"{v}^2" for v in names))
    return CatalogEntry("symplectic_plane", {"n": n}, W, "sum dy_i ^ dx_i with the radial Liouville field",
                        extras={"radius2": radius2})


def contact_sphere(n: int = 2) -> CatalogEntry:
    """The unit sphere in ``(R^{2n}, omega_st)`` with ``alpha = i_Y omega``.

    ``alpha = (1/2) sum (y dx - x dy)`` and ``R = 2 sum (y d/dx - x d/dy)``.
    """
    plane = symplectic_plane(n)
    W = plane.manifold
    S = plane.extras["radius2"] - 1.0
    M = contactise(W.manifold, W.omega, W.liouville, S, name=f"S^{2 * n - 1}")
    M.manifold._sampler = _sphere_sampler(2 * n)
    M.name = f"contact_sphere(n={n})"
    M.provenance = "unit sphere with i_Y omega_st for the radial Liouville field"
    comps = []
    for j in range(1, n + 1):
        comps += [f"2*y{j}", f"-2*x{j}"]
    R = VectorField.from_components(M.chart, comps, "R_closed")
    M.closed_form_reeb = R
    return CatalogEntry("contact_sphere", {"n": n}, M, M.provenance, R, {"plane": plane})


def symplectisation(base: str = "standard", **params) -> CatalogEntry:
    key = base
    base = build(key, **params)
    if not base.is_contact:
        raise BadParams(f"{key} is not a contact entry")
    W, primitive = symplectise(base.manifold)
    return CatalogEntry("symplectisation", {"base": key, **params}, W,
                        f"symplectisation of {base.manifold.name}", extras={"primitive": primitive, "base": base})


BUILDERS = {
    "standard": standard,
    "torus_family": torus_family,
    "cylindrical": cylindrical,
    "weighted_sphere": weighted_sphere,
    "symplectic_plane": symplectic_plane,
    "contact_sphere": contact_sphere,
    "symplectisation": symplectisation,
}


def build(key: str, check: bool = True, **params) -> CatalogEntry:
    """Build a catalog entry and run its self-check (contact or symplectic)."""
    try:
        builder = BUILDERS[key]
    except KeyError:
        raise BadParams(f"unknown catalog key {key!r}; known: {sorted(BUILDERS)}") from None
    try:
        entry = builder(**params)
    except TypeError as exc:
        raise BadParams(str(exc)) from None
    if check:
        self_check(entry)
    return entry


def self_check(entry: CatalogEntry, samples=100, seed=0):
    m = entry.manifold
    if isinstance(m, StrictContactManifold):
        rep = verify_contact(m.manifold, m.alpha, samples=samples, seed=seed)
        if not rep.is_contact:
            raise BadParams(f"{entry.key}: contact condition fails at {rep.witness}")
    else:
        check_symplectic(m.manifold, m.omega, m.sample(samples, seed))


def contact_entries():
    """The contact part of the catalog with representative parameters."""
    return [
        build("standard", n=1),
        build("standard", n=2),
        build("torus_family", n=1),
        build("torus_family", n=2),
        build("torus_family", n=3),
        build("cylindrical"),
        build("weighted_sphere", n=1, a=(1, 2)),
        build("weighted_sphere", n=2, a=(1, 2, 3)),
        build("contact_sphere", n=1),
        build("contact_sphere", n=2),
    ]


def exp_shear_field(chart: Chart) -> VectorField:
    """``-x e^y d/dx + e^y d/dy + 2 d/dz``, a strict contact field of ``dz + x dy``."""
    return VectorField.from_components(chart, {"x": "-x*exp(y)", "y": "exp(y)", "z": 2.0}, "X2")


def shear_contactomorphism():
    """``phi(x, y, z) = (-y, x + y, 2z)`` with target form ``-y dx - y dy + 2 dz``.

    The pair is offered as a strict contactomorphism onto ``dz + x dy``, which is
    returned as ``claimed``. The actual pullback is ``-(x + y) dx + 4 dz``, which
    is not even proportional to ``dz + x dy``, so the claim does not hold.
    Both sides use the chart order ``(x, y, z)``. Returns ``(phi, target_form, claimed)``.
    """
    from .geometry import SmoothMap
    chart = Chart(("x", "y", "z"))
    phi = SmoothMap.from_components(chart, chart, ["-y", "x + y", "2*z"], "phi")
    target = DifferentialForm.from_coefficients(chart, {"x": "-y", "y": "-y", "z": 2.0})
    expected = DifferentialForm.from_coefficients(chart, {"z": 1.0, "y": "x"})
    return phi, target, expected


def random_scalar_field(chart: Chart, rng, terms: int = 3, scale: float = 1.0) -> ScalarField:
    """A seeded smooth function mixing trigonometric and polynomial terms."""
    names = chart.coord_names
    parts = []
    for _ in range(terms):
        c = rng.uniform(-1.0, 1.0) * scale
        k = rng.integers(-2, 3, size=len(names))
        if not k.any():
            k[rng.integers(len(names))] = 1
        phase = rng.uniform(0.0, TWO_PI)
        arg = " + ".join(f"({int(ki)})*{v}" for ki, v in zip(k, names) if ki)
        fn = "sin" if rng.random() < 0.5 else "cos"
        parts.append(f"({c!r})*{fn}({arg} + {phase!r})")
    i, j = rng.integers(len(names), size=2)
    if not chart.periodic[i] and not chart.periodic[j]:
        parts.append(f"({rng.uniform(-0.5, 0.5)!r})*{names[i]}*{names[j]}")
    return ScalarField.from_expression(chart, " + ".join(parts))
