"""Strict contact manifolds: contact condition, Reeb fields, alpha-flat/sharp and the
bridge to symplectic manifolds (Liouville fields, contactisation, symplectisation).

Every pointwise solve goes through one stacked linear system. Unknowns are the
vector ``X`` and one multiplier per embedding constraint ``F_k``::

    sum_i dalpha(e_i, e_j) X_i - sum_k lam_k dF_k(e_j) = c_j     (each j)
    dF_k(X) = 0                                                   (each k)
    alpha(X) = a

so that ``i_X dalpha = c`` and ``alpha(X) = a`` hold on the tangent space of
the level set. The system is solved by least squares and differentiated
through the dual layers, which makes solve-defined fields differentiable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import dual
from .errors import (EvenDimension, LiouvilleFailed, NotHorizontal, NotSemibasic,
                     NotSymplectic, NotTransverse, SingularSystem)
from .geometry import (Chart, DifferentialForm, ManifoldSpec, ScalarField, VectorField,
                       _coords, exterior_derivative, interior_product, lie_derivative_form,
                       restricted_values, wedge, wedge_power)

CONTACT_THRESHOLD = 1e-10
RESIDUAL_GATE = 1e-8
CONDITION_GATE = 1e12


class StrictContactManifold:
    def __init__(self, manifold: ManifoldSpec, alpha: DifferentialForm, name: str = "",
                 closed_form_reeb: Optional[VectorField] = None, provenance: str = ""):
        if alpha.degree != 1:
            raise ValueError("a contact form has degree 1")
        if manifold.dim % 2 == 0:
            raise EvenDimension(f"contact manifolds are odd-dimensional, got {manifold.dim}")
        self.manifold = manifold
        self.alpha = alpha
        self.dalpha = exterior_derivative(alpha)
        self.name = name or manifold.name
        self.closed_form_reeb = closed_form_reeb
        self.provenance = provenance
        self.reeb_field = VectorField(self.chart, lambda x: contact_solve(self, x, None, 1.0), "R")

    def __repr__(self):
        return f"StrictContactManifold({self.name!r})"

    @property
    def chart(self) -> Chart:
        return self.manifold.chart

    @property
    def n(self):
        return (self.manifold.dim - 1) // 2

    def sample(self, count=100, seed=0):
        return self.manifold.sample(count, seed)

    def rescaled(self, factor: ScalarField, name=None):
        return StrictContactManifold(self.manifold, factor * self.alpha, name or self.name)


@dataclass
class SymplecticManifold:
    manifold: ManifoldSpec
    omega: DifferentialForm
    liouville: Optional[VectorField] = None
    name: str = ""

    @property
    def chart(self):
        return self.manifold.chart

    def sample(self, count=100, seed=0):
        return self.manifold.sample(count, seed)


# the stacked solve

def _omega_matrix(dalpha_coeffs, N):
    rows = [[0.0] * N for _ in range(N)]
    for (i, j), c in dalpha_coeffs.items():
        rows[i][j] = c
        rows[j][i] = -c
    return rows


def contact_system(M: StrictContactManifold, x, covector=None, alpha_value=0.0):
    """Matrix rows and right-hand side of the stacked system at ``x``."""
    N = M.chart.dim
    om = _omega_matrix(M.dalpha.fn(x), N)
    a = M.alpha.fn(x)
    grads = [F.gradient(x) for F in M.manifold.constraints]
    m = len(grads)
    rows = []
    for j in range(N):
        rows.append([om[i][j] for i in range(N)] + [-g[j] for g in grads])
    for g in grads:
        rows.append(list(g) + [0.0] * m)
    rows.append([a.get((i,), 0.0) for i in range(N)] + [0.0] * m)
    cov = [0.0] * N if covector is None else list(covector)
    rhs = cov + [0.0] * m + [alpha_value]
    return rows, rhs


def contact_solve(M: StrictContactManifold, x, covector=None, alpha_value=0.0, check=True):
    """Components of the unique tangent ``X`` with ``i_X dalpha = covector`` and
    ``alpha(X) = alpha_value``. Works on batches and on dual inputs."""
    rows, rhs = contact_system(M, x, covector, alpha_value)
    A = dual.stack([dual.stack(r, -1) for r in rows], -2)
    b = dual.stack(rhs, -1)
    sol = dual.lstsq(A, b)
    if check:
        _gate(dual.real(A), dual.real(sol), dual.real(b), x)
    return dual.unstack(sol, -1)[:M.chart.dim]


def _gate(A, sol, b, x):
    A = np.asarray(A, dtype=float)
    b = np.broadcast_to(b, A.shape[:-1])
    resid = np.abs(np.einsum("...ij,...j->...i", A, sol) - b).max(axis=-1)
    s = np.linalg.svd(A, compute_uv=False)
    cond = s[..., 0] / np.maximum(s[..., -1], 1e-300)
    scale = 1.0 + np.abs(b).max(axis=-1)
    bad = (resid > RESIDUAL_GATE * scale) | (cond > CONDITION_GATE)
    if np.any(bad):
        idx = np.unravel_index(np.argmax(bad), np.shape(bad)) if np.ndim(bad) else ()
        where = [float(np.asarray(dual.real(xi))[idx] if np.ndim(dual.real(xi)) else dual.real(xi)) for xi in x]
        c = float(np.asarray(cond)[idx]) if np.ndim(cond) else float(cond)
        raise SingularSystem(f"contact system not uniquely solvable at {where}", c)


def _as_points(p):
    p = np.asarray(p, dtype=float)
    return p, p.ndim == 1


def _to_array(comps, points):
    return np.stack([np.broadcast_to(np.asarray(dual.real(c), dtype=float), points.shape[:-1])
                     for c in comps], axis=-1)


# contact condition and Reeb field

@dataclass
class ContactReport:
    is_contact: bool
    min_value: float
    witness: np.ndarray
    values: np.ndarray = field(repr=False)
    threshold: float = CONTACT_THRESHOLD


def contact_volume(M: ManifoldSpec, alpha: DifferentialForm):
    n2 = M.dim - 1
    return wedge(alpha, wedge_power(exterior_derivative(alpha), n2 // 2)) if n2 else alpha


def verify_contact(M: ManifoldSpec, alpha: DifferentialForm, points=None, samples=100, seed=0,
                   threshold=CONTACT_THRESHOLD) -> ContactReport:
    """Evaluate ``alpha ^ (dalpha)^n`` on orthonormal tangent bases at sample points."""
    if M.dim % 2 == 0:
        raise EvenDimension(f"the contact condition needs odd dimension, got {M.dim}")
    pts = M.sample(samples, seed) if points is None else np.atleast_2d(points)
    vals = np.abs(restricted_values(contact_volume(M, alpha), M, pts)[:, 0])
    k = int(np.argmin(vals))
    return ContactReport(bool(vals[k] > threshold), float(vals[k]), pts[k], vals, threshold)


def reeb(M: StrictContactManifold, p):
    """Reeb vector at ``p`` (one point, or a batch of points)."""
    pts, single = _as_points(p)
    out = _to_array(contact_solve(M, _coords(pts), None, 1.0), pts)
    return out


def alpha_values(M: StrictContactManifold, p):
    """Coefficient vector of alpha at ``p``."""
    return M.alpha.coefficient_array(p)


def dalpha_matrix(M: StrictContactManifold, p):
    pts = np.asarray(p, dtype=float)
    coeffs = M.dalpha.at(pts)
    N = M.chart.dim
    out = np.zeros(pts.shape[:-1] + (N, N))
    for (i, j), c in coeffs.items():
        out[..., i, j] = c
        out[..., j, i] = -c
    return out


def decompose_vector(M: StrictContactManifold, X, p):
    """Split ``X`` at ``p`` into ``(alpha(X), X - alpha(X) R)``."""
    pts = np.asarray(p, dtype=float)
    v = X.at(pts) if isinstance(X, VectorField) else np.asarray(X, dtype=float)
    c = np.einsum("...i,...i->...", alpha_values(M, pts), v)
    return c, v - c[..., None] * reeb(M, pts)


def decompose_form(M: StrictContactManifold, beta, p):
    """Split a 1-form at ``p`` into ``(beta(R), beta - beta(R) alpha)``."""
    pts = np.asarray(p, dtype=float)
    b = beta.coefficient_array(pts) if isinstance(beta, DifferentialForm) else np.asarray(beta, dtype=float)
    c = np.einsum("...i,...i->...", b, reeb(M, pts))
    return c, b - c[..., None] * alpha_values(M, pts)


def alpha_flat(M: StrictContactManifold, X, p, tol=1e-8):
    """``-i_X dalpha`` for a horizontal vector ``X`` at ``p``."""
    pts = np.asarray(p, dtype=float)
    v = X.at(pts) if isinstance(X, VectorField) else np.asarray(X, dtype=float)
    a = np.einsum("...i,...i->...", alpha_values(M, pts), v)
    if np.any(np.abs(a) > tol * np.maximum(1.0, np.linalg.norm(v, axis=-1))):
        raise NotHorizontal(f"alpha(X) = {np.max(np.abs(a)):.3e} is not zero")
    return -np.einsum("...i,...ij->...j", v, dalpha_matrix(M, pts))


def alpha_sharp(M: StrictContactManifold, eta, p, tol=1e-8):
    """The horizontal ``X`` with ``-i_X dalpha = eta`` for a semibasic covector ``eta``."""
    pts = np.asarray(p, dtype=float)
    e = eta.coefficient_array(pts) if isinstance(eta, DifferentialForm) else np.asarray(eta, dtype=float)
    e = np.broadcast_to(e, pts.shape)
    r = np.einsum("...i,...i->...", e, reeb(M, pts))
    if np.any(np.abs(r) > tol * np.maximum(1.0, np.linalg.norm(e, axis=-1))):
        raise NotSemibasic(f"eta(R) = {np.max(np.abs(r)):.3e} is not zero")
    cov = [-e[..., j] for j in range(M.chart.dim)]
    return _to_array(contact_solve(M, _coords(pts), cov, 0.0), pts)


def semibasic_part(M: StrictContactManifold, x, covector):
    """``beta - beta(R) alpha`` for a covector given as a component list (dual-safe)."""
    R = M.reeb_field.fn(x)
    a = M.alpha.fn(x)
    c = sum((b * r for b, r in zip(covector, R)), 0.0)
    return [b - c * a.get((i,), 0.0) for i, b in enumerate(covector)]


def sharp_components(M: StrictContactManifold, x, covector):
    return contact_solve(M, x, [-c for c in covector], 0.0)


# vector field classification

@dataclass
class VFClass:
    kind: str  # strict_contact, contact or not_contact
    residual: float
    mu: Optional[np.ndarray] = None
    witness: Optional[np.ndarray] = None

    @property
    def is_contact(self):
        return self.kind in ("strict_contact", "contact")


def classify_vector_field(M: StrictContactManifold, X: VectorField, points=None, samples=100,
                          seed=0, tol=1e-8) -> VFClass:
    pts = M.sample(samples, seed) if points is None else np.atleast_2d(points)
    L = lie_derivative_form(X, M.alpha)
    lv = np.abs(restricted_values(L, M.manifold, pts)).max(axis=-1)
    if lv.max() < tol:
        return VFClass("strict_contact", float(lv.max()), mu=np.zeros(len(pts)))
    wv = np.abs(restricted_values(wedge(L, M.alpha), M.manifold, pts)).max(axis=-1)
    scale = np.maximum(1.0, lv)
    if np.all(wv < tol * scale):
        mu = np.einsum("pi,pi->p", L.coefficient_array(pts), reeb(M, pts))
        return VFClass("contact", float((wv / scale).max()), mu=mu)
    k = int(np.argmax(wv / scale))
    return VFClass("not_contact", float(wv[k] / scale[k]), witness=pts[k])


# symplectic side

@dataclass
class LiouvilleReport:
    passed: bool
    residual: float


def check_symplectic(W: ManifoldSpec, omega: DifferentialForm, points, tol=1e-8):
    if omega.degree != 2 or W.dim % 2:
        raise NotSymplectic("a symplectic form is a 2-form on an even-dimensional manifold")
    closed = np.abs(restricted_values(exterior_derivative(omega), W, points)).max() if W.dim > 2 else 0.0
    if closed > tol:
        raise NotSymplectic(f"omega is not closed (residual {closed:.3e})")
    top = np.abs(restricted_values(wedge_power(omega, W.dim // 2), W, points)[:, 0])
    if top.min() <= CONTACT_THRESHOLD:
        raise NotSymplectic(f"omega degenerates at {points[int(np.argmin(top))]}")
    return float(closed), float(top.min())


def liouville_check(W: ManifoldSpec, omega: DifferentialForm, Y: VectorField, points=None,
                    samples=100, seed=0, tol=1e-8) -> LiouvilleReport:
    """Residual of ``d(i_Y omega) = omega``."""
    pts = W.sample(samples, seed) if points is None else np.atleast_2d(points)
    check_symplectic(W, omega, pts, tol)
    diff = exterior_derivative(interior_product(Y, omega)) - omega
    res = float(np.abs(restricted_values(diff, W, pts)).max())
    return LiouvilleReport(res < tol, res)


def transversality(W: ManifoldSpec, Y: VectorField, S: ScalarField, points):
    """``|dS(Y)| / (|dS| |Y|)`` at points of the level set."""
    g = S.grad_at(points)
    y = Y.at(points)
    num = np.abs(np.einsum("pi,pi->p", g, y))
    den = np.linalg.norm(g, axis=-1) * np.linalg.norm(y, axis=-1)
    return np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0)


def contactise(W: ManifoldSpec, omega: DifferentialForm, Y: VectorField, S, samples=100, seed=0,
               tol=1e-8, transverse_tol=1e-6, name="") -> StrictContactManifold:
    """The hypersurface ``S = 0`` with ``alpha = i_Y omega`` restricted to it.

    Transversality is tested first so that a tangent field is reported as such
    even when it also fails to be Liouville.
    """
    S = ScalarField.coerce(W.chart, S)
    level = ManifoldSpec(W.chart, tuple(W.constraints) + (S,), name or f"{{{S.label} = 0}}")
    pts = level.sample(samples, seed)
    ratio = transversality(W, Y, S, pts)
    k = int(np.argmin(ratio))
    if ratio[k] <= transverse_tol:
        raise NotTransverse(pts[k], float(ratio[k]))
    rep = liouville_check(W, omega, Y, points=W.sample(samples, seed) if not W.is_embedded else pts,
                          tol=tol)
    if not rep.passed:
        raise LiouvilleFailed(f"d(i_Y omega) differs from omega by {rep.residual:.3e}")
    M = StrictContactManifold(level, interior_product(Y, omega), level.name)
    report = verify_contact(level, M.alpha, points=pts)
    if not report.is_contact:
        raise LiouvilleFailed(f"restricted form is not contact (min {report.min_value:.3e})")
    return M


def symplectise(M: StrictContactManifold, t_bounds=(-1.0, 1.0)):
    """``(R x M, d(e^t alpha))`` with the Liouville field ``d/dt``.

    Returns the symplectic manifold and the primitive ``e^t alpha``.
    """
    if M.manifold.is_embedded:
        raise ValueError("symplectisation needs an intrinsic chart")
    tname = next(s for s in ("t", "s", "tau", "t_") if s not in M.chart.coord_names)
    chart = Chart((tname,), (False,), (t_bounds,)).product(M.chart)
    f = M.alpha.fn

    def beta(x):
        et = dual.exp(x[0])
        return {(i + 1,): et * c for (i,), c in f(x[1:]).items()}

    primitive = DifferentialForm(chart, 1, beta, f"e^{tname}*{M.alpha.label}")
    omega = exterior_derivative(primitive)
    Y = VectorField.coordinate(chart, 0)
    W = SymplecticManifold(ManifoldSpec(chart, name=f"symplectisation of {M.name}"), omega, Y,
                           f"symplectisation of {M.name}")
    return W, primitive
