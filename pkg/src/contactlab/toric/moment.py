"""Alpha-moment maps of torus actions, moment cones and the cut-down
construction of a contact toric manifold from a good cone."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np

from .. import dual
from ..contact import StrictContactManifold
from ..errors import NotGoodCone, RightInverseNotFound, ZeroMomentValue
from ..geometry import ScalarField, lie_bracket, lie_derivative_form, restricted_values
from .lattice import (ConeSpec, column_hermite, extreme_rays, integer_kernel, is_good, is_zbasis,
                      rational_inverse, smith_invariants, transpose)


@dataclass
class TorusActionSpec:
    base: StrictContactManifold
    generators: list

    def check(self, points, tol=1e-7):
        """Residuals of pairwise commutation and of ``L_X alpha = 0`` per generator."""
        pts = np.atleast_2d(points)
        comm = max((float(np.abs(lie_bracket(a, b).at(pts)).max())
                    for a, b in combinations(self.generators, 2)), default=0.0)
        inv = max(float(np.abs(restricted_values(lie_derivative_form(X, self.base.alpha),
                                                 self.base.manifold, pts)).max())
                  for X in self.generators)
        return {"commute": comm, "invariance": inv, "passed": comm < tol and inv < tol}


def moment_components(spec: TorusActionSpec):
    """``Psi_j = alpha(X_j)`` as scalar fields."""
    a = spec.base.alpha.fn
    out = []
    for X in spec.generators:
        def fn(x, V=X.fn):
            v = V(x)
            return sum((c * v[i] for (i,), c in a(x).items()), 0.0)
        out.append(ScalarField(spec.base.chart, fn, f"alpha({X.label})"))
    return out


def alpha_moment_map(spec: TorusActionSpec, p) -> np.ndarray:
    pts = np.asarray(p, dtype=float)
    return np.stack([f.at(pts) for f in moment_components(spec)], axis=-1)


def normalize_contact_form(spec: TorusActionSpec, points, tol=1e-9) -> TorusActionSpec:
    """Rescale alpha by ``1/|Psi_alpha|`` so the moment map takes values on the unit sphere."""
    pts = np.atleast_2d(points)
    psi = alpha_moment_map(spec, pts)
    norms = np.linalg.norm(psi, axis=1)
    if np.any(norms < 1e-12):
        k = int(np.argmin(norms))
        raise ZeroMomentValue(pts[k])
    comps = moment_components(spec)

    def inv_norm(x):
        s = sum((f.fn(x) * f.fn(x) for f in comps), 0.0)
        return 1.0 / dual.sqrt(s)

    lam = ScalarField(spec.base.chart, inv_norm, "1/|Psi|")
    base = spec.base.rescaled(lam, f"{spec.base.name} normalised")
    out = TorusActionSpec(base, spec.generators)
    post = np.linalg.norm(alpha_moment_map(out, pts), axis=1)
    if np.max(np.abs(post - 1.0)) > tol:
        raise ZeroMomentValue(pts[int(np.argmax(np.abs(post - 1.0)))])
    return out


@dataclass
class MomentConeReport:
    rays: np.ndarray  # unit vectors t Psi / |Psi|
    contained: bool
    covered: bool
    min_inequality: float  # min over rays and normals of <u, v_i> / |v_i|
    facet_distance: list  # per normal: min over rays of <u, v_i> / |v_i|


def moment_cone_sample(spec: TorusActionSpec, count=2000, seed=0, cone: ConeSpec = None,
                       tol=1e-9, angle=1e-2) -> MomentConeReport:
    """Sampled rays of ``{t Psi(x)}`` and the two-sided comparison with ``cone``."""
    pts = spec.base.sample(count, seed)
    psi = alpha_moment_map(spec, pts)
    norms = np.linalg.norm(psi, axis=1)
    rays = psi[norms > 0] / norms[norms > 0, None]
    if cone is None:
        return MomentConeReport(rays, True, True, float("nan"), [])
    V = np.array(cone.normals, dtype=float)
    V /= np.linalg.norm(V, axis=1, keepdims=True)
    ip = rays @ V.T
    dist = [float(v) for v in ip.min(axis=0)]
    return MomentConeReport(rays, bool(ip.min() >= -tol), all(abs(d) < angle for d in dist),
                            float(ip.min()), dist)


# cut-down construction

@dataclass
class LermanReport:
    tau: list
    rank: int
    kernel_basis: list
    dim_N: int
    discrete_invariants: tuple  # nontrivial invariant factors of Z^n / tau(Z^d)
    sigma: list  # d x n rational right inverse of tau
    samples: int
    membership_ok: bool  # u = tau^T eta >= 0 and orthogonal to ker tau
    in_cone_fraction: float
    max_image_error: float  # |F - eta| in floating point
    sigma_independence: float  # |F_sigma - F_pinv|
    freeness_ok: bool
    support_patterns: list = field(default_factory=list)

    @property
    def passed(self):
        return self.membership_ok and self.in_cone_fraction == 1.0 and self.freeness_ok


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def lerman_pipeline(C: ConeSpec, samples=100, seed=0, tol=1e-9) -> LermanReport:
    """Exact lattice data of ``tau: R^d -> R^n`` and a sampled check of the
    level set, the image of the reduced moment map and freeness."""
    good = is_good(C)
    if not good.good:
        raise NotGoodCone(good.witness)
    n, d = C.n, C.d
    tau = transpose([list(v) for v in C.normals])  # n x d
    H, U, r = column_hermite(tau)
    if r < n:
        raise RightInverseNotFound(f"tau has rank {r} < {n}")
    Hinv = rational_inverse([row[:n] for row in H])
    sigma = [[sum(Fraction(U[i][k]) * Hinv[k][j] for k in range(n)) for j in range(n)] for i in range(d)]
    kernel = integer_kernel(tau)
    discrete = tuple(v for v in smith_invariants(tau) if v > 1)

    # alternative right inverse tau^T (tau tau^T)^{-1} for the independence check
    ttT = [[sum(Fraction(a) * b for a, b in zip(ri, rj)) for rj in tau] for ri in tau]
    pinv = [[sum(Fraction(tau[k][i]) * w for k, w in zip(range(n), col)) for col in zip(*rational_inverse(ttT))]
            for i in range(d)]

    rng = np.random.default_rng(seed)
    rays = extreme_rays(C)
    membership, in_cone, free = True, 0, True
    max_err, indep = 0.0, 0.0
    patterns = set()
    for s in range(samples):
        if s < len(rays):
            chosen = [s]
        else:
            k = int(rng.integers(1, len(rays) + 1))
            chosen = sorted(rng.choice(len(rays), size=k, replace=False).tolist())
        eta = [Fraction(0)] * n
        for i in chosen:
            w = Fraction(int(rng.integers(1, 10)), int(rng.integers(1, 10)))
            eta = [a + w * b for a, b in zip(eta, rays[i])]
        u = [_dot(v, eta) for v in C.normals]  # tau^T eta, exact
        if any(x < 0 for x in u) or any(_dot(k_, u) != 0 for k_ in kernel):
            membership = False
        total = sum(u)
        mod2 = np.array([float(x / total) for x in u])
        phases = rng.uniform(0.0, 2 * math.pi, d)
        z = np.sqrt(mod2) * np.exp(1j * phases)
        h = math.pi * np.abs(z) ** 2
        scale = float(total) / math.pi
        S = np.array([[float(v) for v in row] for row in sigma])
        P = np.array([[float(v) for v in row] for row in pinv])
        F = S.T @ h * scale
        F2 = P.T @ h * scale
        eta_f = np.array([float(v) for v in eta])
        max_err = max(max_err, float(np.abs(F - eta_f).max()))
        indep = max(indep, float(np.abs(F - F2).max()))
        nf = np.linalg.norm(F)
        if nf > 0 and all(_dot(v, F) >= -tol * nf for v in C.normals):
            in_cone += 1
        J = tuple(j for j in range(d) if u[j] == 0)
        patterns.add(J)
        if J and not is_zbasis([C.normals[j] for j in J])[0]:
            free = False
    return LermanReport(tau, r, kernel, d - r, discrete, sigma, samples, membership, in_cone / samples,
                        max_err, indep, free, sorted(patterns))
