"""Contact complete integrability checks and the two model families
(action-angle coordinates and the local normal form)."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .contact import StrictContactManifold
from .errors import BadComponentList, DegenerateFrequencyDenominator, DimensionMismatch
from .geometry import Chart, DifferentialForm, ManifoldSpec, ScalarField, VectorField, lie_bracket
from .hamiltonian import alpha_of, hamiltonian_field, jacobi_bracket

RANK_CUTOFF = 1e-6
TWO_PI = 2.0 * np.pi


@dataclass
class IntegrableSystemSpec:
    base: StrictContactManifold
    X: VectorField
    integrals: list
    mode: str = "reeb"  # "reeb" (alpha(X) = 1) or "hamiltonian_of_f1" (alpha(X) = f1)
    name: str = ""

    def __post_init__(self):
        self.integrals = [ScalarField.coerce(self.base.chart, f) for f in self.integrals]
        if len(self.integrals) != self.base.n:
            raise DimensionMismatch(f"{len(self.integrals)} integrals on a manifold with n = {self.base.n}")
        if self.mode not in ("reeb", "hamiltonian_of_f1"):
            raise ValueError(f"unknown mode {self.mode!r}")


@dataclass
class IntegrabilityReport:
    residuals: dict
    independence_fraction: float
    failures: list  # (point, sigma_n / sigma_1) at samples where independence fails
    passed: bool
    tol: float
    threshold: float

    @property
    def max_residual(self):
        return max(self.residuals.values()) if self.residuals else 0.0


def _max(a):
    return float(np.max(np.abs(a))) if np.size(a) else 0.0


def independence_ratios(spec: IntegrableSystemSpec, pts) -> np.ndarray:
    """``sigma_n / sigma_1`` of the integral gradients restricted to the tangent space."""
    M = spec.base.manifold
    G = np.stack([f.grad_at(pts) for f in spec.integrals], axis=1)  # (P, n, N)
    T = M.tangent_basis(pts)
    s = np.linalg.svd(G @ T, compute_uv=False)
    return np.where(s[:, 0] > 0, s[:, -1] / np.where(s[:, 0] > 0, s[:, 0], 1.0), 0.0)


def check_integrable(spec: IntegrableSystemSpec, samples=200, seed=0, points=None, tol=1e-7,
                     threshold=0.95) -> IntegrabilityReport:
    """Evaluate the five defining conditions at sample points.

    1. ``X(f_i) = 0``; 2. ``[f_i, f_j] = 0``; 3. the ``df_i`` are independent
    almost everywhere (at a fraction ``threshold`` of samples); 4. ``alpha(X)``
    equals ``f_1`` or 1; 5. ``[1, f_i] = R(f_i) = 0``.
    """
    M = spec.base
    pts = M.sample(samples, seed) if points is None else np.atleast_2d(points)
    fs = spec.integrals
    res = {}
    res["X(f_i)"] = max(_max(spec.X.apply(f).at(pts)) for f in fs)
    res["[f_i,f_j]"] = max((_max(jacobi_bracket(M, f, g).at(pts)) for f, g in combinations(fs, 2)),
                           default=0.0)
    target = fs[0].at(pts) if spec.mode == "hamiltonian_of_f1" else 1.0
    res["alpha(X)"] = _max(alpha_of(M, spec.X).at(pts) - target)
    res["[1,f_i]"] = max(_max(M.reeb_field.apply(f).at(pts)) for f in fs)
    ratios = independence_ratios(spec, pts)
    regular = ratios > RANK_CUTOFF
    frac = float(regular.mean())
    failures = [(pts[i], float(ratios[i])) for i in np.flatnonzero(~regular)]
    passed = all(v < tol for v in res.values()) and frac >= threshold
    return IntegrabilityReport(res, frac, failures, passed, tol, threshold)


@dataclass
class SpanReport:
    regular: int
    singular: list  # indices of samples excluded for rank deficiency
    min_rank: int
    min_horizontal_rank: int
    involutivity: float
    expected_rank: int


def _rank(mats):
    s = np.linalg.svd(mats, compute_uv=False)
    return (s > RANK_CUTOFF * s[..., :1]).sum(axis=-1)


def span_diagnostics(spec: IntegrableSystemSpec, samples=100, seed=0, points=None) -> SpanReport:
    """Rank of ``{R, X_f1, ..., X_fn}`` and involutivity of the horizontal parts."""
    M = spec.base
    pts = M.sample(samples, seed) if points is None else np.atleast_2d(points)
    ratios = independence_ratios(spec, pts)
    ok = ratios > RANK_CUTOFF
    singular = [int(i) for i in np.flatnonzero(~ok)]
    good = pts[ok]
    n = M.n
    if not len(good):
        return SpanReport(0, singular, 0, 0, float("nan"), n + 1)
    Xs = [hamiltonian_field(M, f) for f in spec.integrals]
    R = M.reeb_field
    frame = np.stack([R.at(good)] + [X.at(good) for X in Xs], axis=1)
    horiz = [X - f * R for X, f in zip(Xs, spec.integrals)]
    hframe = np.stack([H.at(good) for H in horiz], axis=1)
    inv = max((_max(lie_bracket(a, b).at(good)) for a, b in combinations(horiz, 2)), default=0.0)
    return SpanReport(len(good), singular, int(_rank(frame).min()), int(_rank(hframe).min()), inv, n + 1)


# models

class ActionAngleModel(IntegrableSystemSpec):
    """``alpha_0 = y0(y) dtheta_0 + sum y_i dtheta_i`` on ``T^{n+1} x D``.

    The Reeb field is linear on each torus with frequencies
    ``w_0 = 1/(y0 - sum y_i d_i y0)`` and ``w_i = -(d_i y0) w_0``.
    """

    def __init__(self, base, y0: ScalarField, n: int):
        self.y0 = y0
        self.n = n
        super().__init__(base, base.reeb_field, [f"y{i}" for i in range(1, n + 1)], "reeb",
                         f"action-angle model (n={n}, y0={y0.label})")

    def frequencies(self, y):
        """Frequencies ``(w_0, ..., w_n)`` at action values ``y`` (shape ``(n,)`` or ``(P, n)``)."""
        y = np.asarray(y, dtype=float)
        full = np.concatenate([np.zeros(y.shape[:-1] + (self.n + 1,)), y], axis=-1)
        g = self.y0.grad_at(full)[..., self.n + 1:]
        den = self.y0.at(full) - np.einsum("...i,...i->...", y, g)
        w0 = 1.0 / den
        return np.concatenate([w0[..., None], -g * w0[..., None]], axis=-1)

    def closed_form_flow(self, z0, t):
        """``theta(t) = theta(0) + t w`` and constant actions."""
        z0 = np.asarray(z0, dtype=float)
        t = np.asarray(t, dtype=float)[..., None]
        w = self.frequencies(z0[self.n + 1:])
        out = np.broadcast_to(z0, t.shape[:-1] + z0.shape).copy()
        out[..., : self.n + 1] = z0[: self.n + 1] + t * w
        return out


def build_action_angle_model(n: int, y0_expr="1", domain=None, samples=200, seed=0) -> ActionAngleModel:
    """The model on ``T^{n+1} x D`` with ``D`` a box of action values (default ``(0.5, 2)^n``)."""
    if n < 1:
        raise DimensionMismatch("n must be at least 1")
    names = tuple(f"θ{i}" for i in range(n + 1)) + tuple(f"y{i}" for i in range(1, n + 1))
    domain = domain or [(0.5, 2.0)] * n
    if len(domain) != n:
        raise DimensionMismatch("one interval per action variable")
    chart = Chart(names, (True,) * (n + 1) + (False,) * n, ((0.0, TWO_PI),) * (n + 1) + tuple(domain))
    y0 = ScalarField.coerce(chart, y0_expr)
    coeffs = {"θ0": y0}
    for i in range(1, n + 1):
        coeffs[f"θ{i}"] = f"y{i}"
    alpha = DifferentialForm.from_coefficients(chart, coeffs, label="alpha_0")
    spec = ManifoldSpec(chart, name=f"T^{n + 1} x D")
    pts = spec.sample(samples, seed)
    ys = pts[:, n + 1:]
    g = y0.grad_at(pts)[:, n + 1:]
    den = y0.at(pts) - np.einsum("pi,pi->p", ys, g)
    if np.min(np.abs(den)) < 1e-8:
        k = int(np.argmin(np.abs(den)))
        raise DegenerateFrequencyDenominator(f"y0 - sum y_i d_i y0 vanishes near {pts[k]}")
    base = StrictContactManifold(spec, alpha, f"action-angle(n={n})")
    return ActionAngleModel(base, y0, n)


COMPONENTS = ("elliptic", "hyperbolic", "focus_pair")


def _component_slots(n, k, component_types):
    if k < 0 or k > n:
        raise BadComponentList(f"need 0 <= k <= n, got n={n}, k={k}")
    slots = []
    for c in component_types:
        if c not in COMPONENTS:
            raise BadComponentList(f"unknown component type {c!r}")
        slots += [c] if c != "focus_pair" else ["focus_pair", "focus_pair"]
    if len(slots) != n - k:
        raise BadComponentList(f"components fill {len(slots)} slots, expected n - k = {n - k}")
    return slots


def build_normal_form_model(n: int, k: int, component_types=()) -> IntegrableSystemSpec:
    """``alpha_0 = dtheta_0 + sum p_i dtheta_i + (1/2) sum (x_j dy_j - y_j dx_j)``.

    Coordinates ``(theta_0..theta_k, p_1..p_k, x_1, y_1, ..., x_m, y_m)`` with
    ``m = n - k``. Integrals: ``p_i``, then ``x^2 + y^2`` (elliptic), ``x y``
    (hyperbolic) or the pair ``(x_j y_{j+1} - x_{j+1} y_j, x_j y_j + x_{j+1} y_{j+1})``.
    """
    slots = _component_slots(n, k, list(component_types))
    m = n - k
    names = [f"θ{i}" for i in range(k + 1)] + [f"p{i}" for i in range(1, k + 1)]
    for j in range(1, m + 1):
        names += [f"x{j}", f"y{j}"]
    periodic = [True] * (k + 1) + [False] * (len(names) - k - 1)
    bounds = [(0.0, TWO_PI)] * (k + 1) + [(-1.0, 1.0)] * (len(names) - k - 1)
    chart = Chart(tuple(names), tuple(periodic), tuple(bounds))
    coeffs = {"θ0": 1.0}
    for i in range(1, k + 1):
        coeffs[f"θ{i}"] = f"p{i}"
    for j in range(1, m + 1):
        coeffs[f"y{j}"] = f"0.5*x{j}"
        coeffs[f"x{j}"] = f"-0.5*y{j}"
    alpha = DifferentialForm.from_coefficients(chart, coeffs, label="alpha_0")
    R = VectorField.coordinate(chart, "θ0")
    base = StrictContactManifold(ManifoldSpec(chart, name="normal form model"), alpha,
                                 f"normal_form(n={n}, k={k}, {list(component_types)})", R)
    integrals = [f"p{i}" for i in range(1, k + 1)]
    j = 1
    while j <= m:
        kind = slots[j - 1]
        if kind == "elliptic":
            integrals.append(f"x{j}^2 + y{j}^2")
            j += 1
        elif kind == "hyperbolic":
            integrals.append(f"x{j}*y{j}")
            j += 1
        else:
            integrals.append(f"x{j}*y{j + 1} - x{j + 1}*y{j}")
            integrals.append(f"x{j}*y{j} + x{j + 1}*y{j + 1}")
            j += 2
    return IntegrableSystemSpec(base, R, integrals, "reeb", base.name)
