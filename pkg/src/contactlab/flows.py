"""Fixed-step RK4 integration of vector fields with conservation diagnostics."""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import dual
from .contact import StrictContactManifold, contactise, reeb
from .errors import LeftDomain, NotLevelSet, StepRejected
from .geometry import (DifferentialForm, ManifoldSpec, ScalarField, VectorField, _coords,
                       newton_correction)


@dataclass
class FlowTrace:
    times: np.ndarray
    states: np.ndarray
    step: float
    coord_names: tuple
    conserved_logs: dict = field(default_factory=dict)
    method: str = "rk4"

    def to_csv(self, path=None) -> str:
        """CSV with header ``t, coords..., conserved...`` (17 significant digits)."""
        names = list(self.conserved_logs)
        buf = io.StringIO()
        buf.write(",".join(["t", *self.coord_names, *names]) + "\n")
        cols = [self.times[:, None], self.states] + [np.asarray(self.conserved_logs[k])[:, None] for k in names]
        for row in np.hstack(cols):
            buf.write(",".join(f"{v:.17g}" for v in row) + "\n")
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)
        return text


def _manifold(M):
    return M.manifold if isinstance(M, StrictContactManifold) else M


def _field_fn(X: VectorField):
    """Evaluate ``X`` at a single state vector using scalar coordinates."""
    fn = X.fn

    def f(z):
        return np.array([float(dual.real(c)) for c in fn(list(z))])
    return f


def rk4_step(f, z, h):
    k1 = f(z)
    k2 = f(z + 0.5 * h * k1)
    k3 = f(z + 0.5 * h * k2)
    k4 = f(z + h * k3)
    return z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate(M, X: VectorField, z0, t_end: float, h: float, conserved: Optional[dict] = None,
              project_tol: float = 1e-10) -> FlowTrace:
    """Classical RK4 from ``z0`` to ``t_end`` with step ``h``.

    For embedded manifolds every step is followed by one Newton step back onto
    the constraint set; the step is rejected if that does not land within
    ``project_tol``.
    """
    if h <= 0:
        raise ValueError("step must be positive")
    spec = _manifold(M)
    z = np.array(z0, dtype=float)
    if not spec.chart.contains(z[None])[0]:
        raise LeftDomain(0.0, z)
    steps = int(round(t_end / h))
    f = _field_fn(X)
    states = np.empty((steps + 1, z.size))
    states[0] = z
    for s in range(1, steps + 1):
        z = rk4_step(f, z, h)
        if spec.is_embedded:
            z = z - newton_correction(spec.constraint_jacobian(z[None]), spec.constraint_values(z[None]))[0]
            if not np.all(np.abs(spec.constraint_values(z[None])) < project_tol):
                raise StepRejected(f"projection failed at t={s * h}")
        if not spec.chart.contains(z[None])[0]:
            raise LeftDomain(s * h, z)
        states[s] = z
    times = h * np.arange(steps + 1)
    logs = {}
    for name, g in (conserved or {}).items():
        logs[name] = ScalarField.coerce(spec.chart, g).at(states)
    return FlowTrace(times, states, h, spec.chart.coord_names, logs)


def conservation_report(trace: FlowTrace, functions: dict, chart=None) -> dict:
    """``max_t |f(z(t)) - f(z(0))|`` per named function."""
    out = {}
    for name, g in functions.items():
        vals = g.at(trace.states) if isinstance(g, ScalarField) else np.asarray(g(trace.states))
        out[name] = float(np.max(np.abs(vals - vals[0])))
    return out


def transported_alpha_drift(M: StrictContactManifold, X: VectorField, z0, t_end: float, h: float):
    """Drift of ``alpha(v(t))`` for the coordinate frame pushed forward by the flow.

    Frames obey the linearised equation ``v' = DX(z) v`` (exact directional
    derivatives), integrated jointly with ``z`` by RK4. For a strict contact
    field ``alpha`` is preserved, so every entry stays at its initial value.
    """
    N = M.chart.dim
    z = np.array(z0, dtype=float)
    V = np.eye(N)

    def rhs(state):
        z, V = state[0], state[1:]
        zs = np.broadcast_to(z, V.shape)
        dz = X.at(z[None])[0]
        dV = np.stack([np.asarray(dual.real(c), dtype=float) * np.ones(N) for c in X.jvp(_coords(zs), _coords(V))], axis=-1)
        return np.vstack([dz[None], dV])

    state = np.vstack([z[None], V])
    a0 = np.einsum("i,ki->k", M.alpha.coefficient_array(z), V)
    drift = 0.0
    for _ in range(int(round(t_end / h))):
        state = rk4_step(rhs, state, h)
        a = np.einsum("i,ki->k", M.alpha.coefficient_array(state[0]), state[1:])
        drift = max(drift, float(np.max(np.abs(a - a0))))
    return drift


def rk4_order_ratio(M, X: VectorField, z0, t_end: float, h: float, exact) -> tuple:
    """Endpoint errors at ``h`` and ``h/2`` against ``exact(z0, t_end)`` and their ratio."""
    target = np.asarray(exact(np.asarray(z0, dtype=float), t_end), dtype=float)
    e1 = float(np.max(np.abs(integrate(M, X, z0, t_end, h).states[-1] - target)))
    e2 = float(np.max(np.abs(integrate(M, X, z0, t_end, h / 2).states[-1] - target)))
    return e1, e2, (e1 / e2 if e2 > 0 else float("inf"))


@dataclass
class CollinearityReport:
    max_sine: float
    speed_ratio: np.ndarray  # |X^H| / |R| with sign of <X^H, R>
    points: np.ndarray
    passed: bool


def symplectic_hamiltonian_field(omega: DifferentialForm, H: ScalarField, points) -> np.ndarray:
    """Solve ``i_X omega = -dH`` pointwise."""
    pts = np.atleast_2d(points)
    N = omega.chart.dim
    Om = np.zeros((len(pts), N, N))
    for (i, j), c in omega.at(pts).items():
        Om[:, i, j] = c
        Om[:, j, i] = -c
    g = H.grad_at(pts)
    return np.linalg.solve(np.swapaxes(Om, 1, 2), -g[..., None])[..., 0]


def hamiltonian_vs_reeb_trajectories(W: ManifoldSpec, omega: DifferentialForm, H, Y: VectorField, S,
                                     samples=100, seed=0, tol=1e-6) -> CollinearityReport:
    """Check that the symplectic Hamiltonian field of ``H`` and the Reeb field of
    ``i_Y omega`` on the level set ``S = 0`` are parallel."""
    H = ScalarField.coerce(W.chart, H)
    M = contactise(W, omega, Y, S, samples=samples, seed=seed)
    pts = M.sample(samples, seed)
    hv = H.at(pts)
    if np.max(np.abs(hv - hv[0])) > 1e-8 * max(1.0, abs(hv[0])):
        raise NotLevelSet(f"H varies by {np.ptp(hv):.3e} on the hypersurface")
    XH = symplectic_hamiltonian_field(omega, H, pts)
    R = reeb(M, pts)
    a = XH / np.linalg.norm(XH, axis=1, keepdims=True)
    b = R / np.linalg.norm(R, axis=1, keepdims=True)
    c = np.einsum("pi,pi->p", a, b)
    sine = np.linalg.norm(a - c[:, None] * b, axis=1)
    ratio = np.sign(c) * np.linalg.norm(XH, axis=1) / np.linalg.norm(R, axis=1)
    ms = float(sine.max())
    return CollinearityReport(ms, ratio, pts, ms < tol)
