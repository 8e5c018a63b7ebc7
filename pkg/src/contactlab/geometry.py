"""Charts, fields and differential forms with pointwise exterior calculus.

Every field is a function of a list of coordinate values. Coordinates may be
numpy arrays (a batch of sample points) or tagged duals, so every operation
here is differentiable again and derivatives come from dual passes rather
than symbolic rewriting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from numbers import Number
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from . import dual
from .dual import Dual, new_tag
from .errors import ChartMismatch, DegenerateTangentBasis, DegreeOverflow, DimensionMismatch
from .expr import BinOp, Expression, parse

TWO_PI = 2.0 * math.pi


def _is_zero(x):
    return not isinstance(x, Dual) and np.ndim(x) == 0 and x == 0.0


def _dep(y, tag):
    """Perturbation of ``y`` for ``tag``, or None when ``y`` is independent of it."""
    if isinstance(y, Dual) and y.tag == tag:
        return y.der
    return None


def _coords(points):
    points = np.asarray(points, dtype=float)
    return [points[..., i] for i in range(points.shape[-1])]


def _full(value, shape):
    return np.broadcast_to(np.asarray(dual.real(value), dtype=float), shape).copy()


def sort_sign(indices):
    """Sorted copy of ``indices`` and the sign of the sorting permutation."""
    idx = list(indices)
    sign = 1
    for i in range(len(idx)):
        for j in range(len(idx) - 1 - i):
            if idx[j] > idx[j + 1]:
                idx[j], idx[j + 1] = idx[j + 1], idx[j]
                sign = -sign
    return tuple(idx), sign


# charts and manifolds

@dataclass(frozen=True)
class Chart:
    coord_names: tuple
    periodic: tuple = None
    bounds: tuple = None
    domain_constraints: tuple = ()  # expressions g with g > 0 on the domain

    def __post_init__(self):
        names = tuple(self.coord_names)
        object.__setattr__(self, "coord_names", names)
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate coordinate names: {names}")
        if not names:
            raise ValueError("a chart needs at least one coordinate")
        periodic = tuple(self.periodic) if self.periodic is not None else (False,) * len(names)
        if len(periodic) != len(names):
            raise ValueError("periodic flags must match the coordinates")
        object.__setattr__(self, "periodic", tuple(bool(p) for p in periodic))
        if self.bounds is None:
            bounds = tuple((0.0, TWO_PI) if p else (-2.0, 2.0) for p in self.periodic)
        else:
            bounds = tuple((float(lo), float(hi)) for lo, hi in self.bounds)
        object.__setattr__(self, "bounds", bounds)
        cons = []
        for c in self.domain_constraints:
            cons.append(inequality(c, names) if isinstance(c, str) else c)
        object.__setattr__(self, "domain_constraints", tuple(cons))

    @property
    def dim(self):
        return len(self.coord_names)

    def index(self, name):
        try:
            return self.coord_names.index(name)
        except ValueError:
            raise KeyError(f"no coordinate {name!r} in chart {self.coord_names}") from None

    def contains(self, points, margin=0.0):
        points = np.asarray(points, dtype=float)
        ok = np.all(np.isfinite(points), axis=-1)
        xs = _coords(points)
        for g in self.domain_constraints:
            ok &= np.asarray(g(xs)) > margin
        return ok

    def sample(self, rng, count, margin=1e-3):
        lo = np.array([b[0] for b in self.bounds])
        hi = np.array([b[1] for b in self.bounds])
        out = []
        have = 0
        while have < count:
            pts = rng.uniform(lo, hi, size=(max(count, 16), self.dim))
            pts = pts[self.contains(pts, margin)]
            out.append(pts)
            have += len(pts)
        return np.concatenate(out)[:count]

    def product(self, other):
        """Chart on ``self x other``."""
        return Chart(self.coord_names + other.coord_names,
                     self.periodic + other.periodic,
                     self.bounds + other.bounds,
                     tuple(_shift_expr(g, self.coord_names + other.coord_names)
                           for g in other.domain_constraints)
                     + tuple(_shift_expr(g, self.coord_names + other.coord_names)
                             for g in self.domain_constraints))


def _shift_expr(e, names):
    return Expression(e.ast, tuple(names))


def inequality(text, names):
    """Expression ``g`` with ``g > 0`` exactly where the strict inequality holds."""
    for op in (">", "<"):
        if op in text:
            lhs, rhs = text.split(op, 1)
            left = parse(lhs.strip(), names)
            right = parse(rhs.strip(), names)
            if op == ">":
                return Expression(BinOp("-", left.ast, right.ast), tuple(names))
            return Expression(BinOp("-", right.ast, left.ast), tuple(names))
    raise ValueError(f"not a strict inequality: {text!r}")


class ManifoldSpec:
    """A chart, optionally cut down to the common zero set of ``constraints``.

    With constraints the chart is the ambient chart and the manifold is the
    regular level set ``{F_k = 0}``; tangent spaces are null spaces of the
    constraint Jacobian.
    """

    def __init__(self, chart: Chart, constraints: Sequence = (), name: str = "",
                 sampler: Callable = None):
        self.chart = chart
        self.constraints = tuple(ScalarField.coerce(chart, c) for c in constraints)
        self.name = name
        self._sampler = sampler

    def __repr__(self):
        return f"ManifoldSpec({self.name or self.chart.coord_names!r})"

    @property
    def is_embedded(self):
        return bool(self.constraints)

    @property
    def dim(self):
        return self.chart.dim - len(self.constraints)

    def constraint_values(self, points):
        points = np.asarray(points, dtype=float)
        if not self.constraints:
            return np.zeros(points.shape[:-1] + (0,))
        return np.stack([c.at(points) for c in self.constraints], axis=-1)

    def constraint_jacobian(self, points):
        points = np.asarray(points, dtype=float)
        if not self.constraints:
            return np.zeros(points.shape[:-1] + (0, self.chart.dim))
        return np.stack([c.grad_at(points) for c in self.constraints], axis=-2)

    def project(self, points, steps=60, tol=1e-14):
        """Newton projection onto the constraint set along the constraint gradients."""
        x = np.array(points, dtype=float)
        if not self.constraints:
            return x
        for _ in range(steps):
            F = self.constraint_values(x)
            if np.max(np.abs(F)) < tol:
                break
            x = x - newton_correction(self.constraint_jacobian(x), F)
        return x

    def sample(self, count=100, seed=0):
        rng = np.random.default_rng(seed)
        if self._sampler is not None:
            return self._sampler(rng, count)
        if not self.constraints:
            return self.chart.sample(rng, count)
        out, have = [], 0
        while have < count:
            raw = rng.standard_normal((max(count, 16), self.chart.dim))
            for i, p in enumerate(self.chart.periodic):
                if p:
                    raw[:, i] = rng.uniform(0.0, TWO_PI, len(raw))
            pts = self.project(raw)
            ok = np.all(np.abs(self.constraint_values(pts)) < 1e-12, axis=-1)
            ok &= self.chart.contains(pts, 1e-3)
            out.append(pts[ok])
            have += int(ok.sum())
        return np.concatenate(out)[:count]

    def tangent_basis(self, points):
        """Orthonormal tangent bases, shape ``(P, N, dim)``."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        P, N = points.shape
        if not self.constraints:
            return np.broadcast_to(np.eye(N), (P, N, N)).copy()
        jac = self.constraint_jacobian(points)
        m = len(self.constraints)
        out = np.empty((P, N, N - m))
        for p in range(P):
            q, r, _ = scipy.linalg.qr(jac[p].T, pivoting=True)
            diag = np.abs(np.diag(r))
            if diag.size < m or diag[m - 1] <= 1e-12 * max(diag[0], 1e-300):
                raise DegenerateTangentBasis(f"constraint Jacobian rank-deficient at {points[p]}")
            out[p] = q[:, m:]
        return out


def newton_correction(jac, F):
    """Minimum-norm Newton step ``J^T (J J^T)^{-1} F`` for a batch of points."""
    gram = jac @ np.swapaxes(jac, -1, -2)
    lam = np.linalg.solve(gram, F[..., None])[..., 0]
    return np.einsum("...kn,...k->...n", jac, lam)


# fields

class ScalarField:
    def __init__(self, chart: Chart, fn: Callable, label: str = ""):
        self.chart = chart
        self.fn = fn
        self.label = label

    def __repr__(self):
        return f"ScalarField({self.label or '<closure>'})"

    def __call__(self, x):
        return self.fn(x)

    @classmethod
    def from_expression(cls, chart, source):
        e = parse(source, chart.coord_names) if isinstance(source, str) else source
        idx = [chart.index(v) for v in e.free_vars]
        return cls(chart, lambda x: e([x[i] for i in idx]), str(e))

    @classmethod
    def constant(cls, chart, c):
        c = float(c)
        return cls(chart, lambda x: c, repr(c))

    @classmethod
    def coerce(cls, chart, value):
        if isinstance(value, ScalarField):
            _check_chart(chart, value.chart)
            return value
        if isinstance(value, (str, Expression)):
            return cls.from_expression(chart, value)
        if isinstance(value, Number):
            return cls.constant(chart, value)
        if callable(value):
            return cls(chart, value)
        raise TypeError(f"cannot make a scalar field from {value!r}")

    def at(self, points):
        points = np.asarray(points, dtype=float)
        return _full(self.fn(_coords(points)), points.shape[:-1])

    def gradient(self, x):
        """Partial derivatives at ``x`` from one dual pass per coordinate."""
        out = []
        for i in range(len(x)):
            tag = new_tag()
            xs = list(x)
            xs[i] = Dual(tag, x[i], 1.0)
            d = _dep(self.fn(xs), tag)
            out.append(0.0 if d is None else d)
        return out

    def grad_at(self, points):
        points = np.asarray(points, dtype=float)
        g = self.gradient(_coords(points))
        return np.stack([_full(c, points.shape[:-1]) for c in g], axis=-1)

    def directional(self, x, v):
        """Derivative along the vector ``v`` at ``x`` (a single dual pass)."""
        tag = new_tag()
        d = _dep(self.fn([Dual(tag, xi, vi) for xi, vi in zip(x, v)]), tag)
        return 0.0 if d is None else d

    def partial(self, i):
        i = self.chart.index(i) if isinstance(i, str) else i

        def fn(x):
            tag = new_tag()
            xs = list(x)
            xs[i] = Dual(tag, x[i], 1.0)
            d = _dep(self.fn(xs), tag)
            return 0.0 if d is None else d

        return ScalarField(self.chart, fn, f"d{self.chart.coord_names[i]}({self.label})")

    def d(self):
        return exterior_derivative(self.as_form())

    def as_form(self):
        return DifferentialForm(self.chart, 0, lambda x: {(): self.fn(x)})

    def _binary(self, other, op, sym):
        if isinstance(other, ScalarField):
            _check_chart(self.chart, other.chart)
            f, g = self.fn, other.fn
            return ScalarField(self.chart, lambda x: op(f(x), g(x)), f"({self.label}{sym}{other.label})")
        if isinstance(other, Number):
            f, c = self.fn, float(other)
            return ScalarField(self.chart, lambda x: op(f(x), c), f"({self.label}{sym}{other})")
        return NotImplemented

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b, "+")

    def __radd__(self, other):
        return self._binary(other, lambda a, b: b + a, "+")

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b, "-")

    def __rsub__(self, other):
        return self._binary(other, lambda a, b: b - a, "-")

    def __mul__(self, other):
        if isinstance(other, (VectorField, DifferentialForm)):
            return NotImplemented
        return self._binary(other, lambda a, b: a * b, "*")

    def __rmul__(self, other):
        return self._binary(other, lambda a, b: b * a, "*")

    def __truediv__(self, other):
        return self._binary(other, lambda a, b: a / b, "/")

    def __rtruediv__(self, other):
        return self._binary(other, lambda a, b: b / a, "/")

    def __neg__(self):
        f = self.fn
        return ScalarField(self.chart, lambda x: -f(x), f"-{self.label}")


class VectorField:
    """A vector field given by a function returning all components at once."""

    def __init__(self, chart: Chart, fn: Callable, label: str = ""):
        self.chart = chart
        self.fn = fn
        self.label = label

    def __repr__(self):
        return f"VectorField({self.label or '<closure>'})"

    def __call__(self, x):
        return self.fn(x)

    @classmethod
    def from_components(cls, chart, components, label=""):
        if isinstance(components, dict):
            comps = [0.0] * chart.dim
            for k, v in components.items():
                comps[chart.index(k) if isinstance(k, str) else k] = v
            components = comps
        if len(components) != chart.dim:
            raise DimensionMismatch(f"{len(components)} components for a {chart.dim}-dimensional chart")
        fields = [ScalarField.coerce(chart, c) for c in components]
        fns = [f.fn for f in fields]
        return cls(chart, lambda x: [f(x) for f in fns], label or "(" + ", ".join(f.label for f in fields) + ")")

    @classmethod
    def coordinate(cls, chart, name):
        i = chart.index(name) if isinstance(name, str) else name
        comps = [0.0] * chart.dim
        comps[i] = 1.0
        return cls(chart, lambda x: comps, f"d/d{chart.coord_names[i]}")

    @classmethod
    def zero(cls, chart):
        comps = [0.0] * chart.dim
        return cls(chart, lambda x: comps, "0")

    def at(self, points):
        points = np.asarray(points, dtype=float)
        comps = self.fn(_coords(points))
        return np.stack([_full(c, points.shape[:-1]) for c in comps], axis=-1)

    def component(self, i):
        f = self.fn
        return ScalarField(self.chart, lambda x: f(x)[i], f"{self.label}[{i}]")

    def apply(self, f: ScalarField) -> ScalarField:
        """The derivative X(f) = df(X) as a scalar field."""
        _check_chart(self.chart, f.chart)
        X = self.fn
        return ScalarField(self.chart, lambda x: f.directional(x, X(x)), f"{self.label}({f.label})")

    def jvp(self, x, v):
        """Directional derivative of the components along ``v``."""
        tag = new_tag()
        out = self.fn([Dual(tag, xi, vi) for xi, vi in zip(x, v)])
        res = []
        for c in out:
            d = _dep(c, tag)
            res.append(0.0 if d is None else d)
        return res

    def __add__(self, other):
        _check_chart(self.chart, other.chart)
        f, g = self.fn, other.fn
        return VectorField(self.chart, lambda x: [a + b for a, b in zip(f(x), g(x))], f"({self.label}+{other.label})")

    def __sub__(self, other):
        _check_chart(self.chart, other.chart)
        f, g = self.fn, other.fn
        return VectorField(self.chart, lambda x: [a - b for a, b in zip(f(x), g(x))], f"({self.label}-{other.label})")

    def __neg__(self):
        f = self.fn
        return VectorField(self.chart, lambda x: [-a for a in f(x)], f"-{self.label}")

    def __rmul__(self, other):
        f = self.fn
        if isinstance(other, ScalarField):
            _check_chart(self.chart, other.chart)
            g = other.fn
            return VectorField(self.chart, lambda x: [g(x) * a for a in f(x)], f"{other.label}*{self.label}")
        if isinstance(other, Number):
            c = float(other)
            return VectorField(self.chart, lambda x: [c * a for a in f(x)], f"{other}*{self.label}")
        return NotImplemented

    __mul__ = __rmul__


def _normalize_index(chart, key):
    if isinstance(key, str):
        key = tuple(s.strip() for s in key.split(",") if s.strip())
    elif isinstance(key, int):
        key = (key,)
    idx = [chart.index(k) if isinstance(k, str) else int(k) for k in key]
    return sort_sign(idx)


class DifferentialForm:
    """A k-form: a function returning coefficients keyed by increasing index tuples."""

    def __init__(self, chart: Chart, degree: int, fn: Callable, label: str = ""):
        if degree < 0 or degree > chart.dim:
            raise DegreeOverflow(f"degree {degree} on a {chart.dim}-dimensional chart")
        self.chart = chart
        self.degree = degree
        self.fn = fn
        self.label = label

    def __repr__(self):
        return f"DifferentialForm(degree={self.degree}, {self.label or '<closure>'})"

    def __call__(self, x):
        return self.fn(x)

    @classmethod
    def from_coefficients(cls, chart, coefficients: dict, degree=None, label=""):
        """Build from ``{index: coefficient}``; indices are name/int tuples or "x,y" strings."""
        terms = {}
        for key, value in coefficients.items():
            idx, sign = _normalize_index(chart, key)
            if len(set(idx)) != len(idx):
                continue
            f = ScalarField.coerce(chart, value)
            if idx in terms:
                prev_sign, prev = terms[idx]
                f = prev * prev_sign + f * sign
                sign = 1
            terms[idx] = (sign, f)
        if degree is None:
            degrees = {len(k) for k in terms}
            if len(degrees) != 1:
                raise ValueError("cannot infer the degree of an empty or mixed form")
            degree = degrees.pop()
        if any(len(k) != degree for k in terms):
            raise ValueError("all coefficient indices must have the form's degree")
        items = [(k, s, f.fn) for k, (s, f) in terms.items()]

        def fn(x):
            return {k: (f(x) if s > 0 else -f(x)) for k, s, f in items}

        return cls(chart, degree, fn, label)

    @classmethod
    def zero(cls, chart, degree):
        return cls(chart, degree, lambda x: {}, "0")

    def at(self, points):
        points = np.asarray(points, dtype=float)
        shape = points.shape[:-1]
        return {k: _full(v, shape) for k, v in self.fn(_coords(points)).items()}

    def coefficient_array(self, points):
        """Dense coefficients over all increasing indices, shape ``(P, C(N, k))``."""
        points = np.asarray(points, dtype=float)
        vals = self.at(points)
        keys = list(combinations(range(self.chart.dim), self.degree))
        out = np.zeros(points.shape[:-1] + (len(keys),))
        for j, k in enumerate(keys):
            if k in vals:
                out[..., j] = vals[k]
        return out

    def evaluate_on(self, x, vectors):
        """Value of the form at ``x`` on ``degree`` vectors (component lists)."""
        if len(vectors) != self.degree:
            raise ValueError(f"a {self.degree}-form takes {self.degree} vectors")
        return alternating_value(self.fn(x), vectors)

    def d(self):
        return exterior_derivative(self)

    def _combine(self, other, sign):
        _check_chart(self.chart, other.chart)
        if other.degree != self.degree:
            raise ValueError("cannot add forms of different degrees")
        f, g = self.fn, other.fn

        def fn(x):
            out = dict(f(x))
            for k, v in g(x).items():
                out[k] = out[k] + sign * v if k in out else sign * v
            return out

        return DifferentialForm(self.chart, self.degree, fn)

    def __add__(self, other):
        return self._combine(other, 1.0)

    def __sub__(self, other):
        return self._combine(other, -1.0)

    def __neg__(self):
        f = self.fn
        return DifferentialForm(self.chart, self.degree, lambda x: {k: -v for k, v in f(x).items()})

    def __rmul__(self, other):
        f = self.fn
        if isinstance(other, ScalarField):
            _check_chart(self.chart, other.chart)
            g = other.fn

            def fn(x):
                s = g(x)
                return {k: s * v for k, v in f(x).items()}

            return DifferentialForm(self.chart, self.degree, fn)
        if isinstance(other, Number):
            c = float(other)
            return DifferentialForm(self.chart, self.degree, lambda x: {k: c * v for k, v in f(x).items()})
        return NotImplemented

    __mul__ = __rmul__

    def __xor__(self, other):
        return wedge(self, other)

    def to_scalar(self):
        if self.degree != 0:
            raise ValueError("only 0-forms convert to scalar fields")
        f = self.fn
        return ScalarField(self.chart, lambda x: f(x).get((), 0.0))


def alternating_value(coeffs: dict, vectors):
    if not vectors:
        return coeffs.get((), 0.0)
    total = 0.0
    for idx, c in coeffs.items():
        rows = [[v[i] for v in vectors] for i in idx]
        total = total + c * dual.det(rows)
    return total


@dataclass
class SmoothMap:
    source: Chart
    target: Chart
    fn: Callable
    label: str = ""

    @classmethod
    def from_components(cls, source, target, components, label=""):
        if len(components) != target.dim:
            raise DimensionMismatch(f"{len(components)} components for a {target.dim}-dimensional target")
        fns = [ScalarField.coerce(source, c).fn for c in components]
        return cls(source, target, lambda x: [f(x) for f in fns], label)

    @classmethod
    def identity(cls, chart):
        return cls(chart, chart, lambda x: list(x), "id")

    def __call__(self, x):
        return self.fn(x)

    def at(self, points):
        points = np.asarray(points, dtype=float)
        return np.stack([_full(c, points.shape[:-1]) for c in self.fn(_coords(points))], axis=-1)

    def jacobian(self, x):
        """``jac[t][s] = d(phi^t)/d(x^s)`` from one dual pass per source coordinate."""
        cols = []
        for s in range(self.source.dim):
            tag = new_tag()
            xs = list(x)
            xs[s] = Dual(tag, x[s], 1.0)
            out = self.fn(xs)
            col = []
            for c in out:
                d = _dep(c, tag)
                col.append(0.0 if d is None else d)
            cols.append(col)
        return [[cols[s][t] for s in range(self.source.dim)] for t in range(self.target.dim)]


def _check_chart(a, b):
    if a is not b and a != b:
        raise ChartMismatch(f"charts differ: {a.coord_names} vs {b.coord_names}")


# exterior calculus

def wedge(a: DifferentialForm, b: DifferentialForm) -> DifferentialForm:
    _check_chart(a.chart, b.chart)
    deg = a.degree + b.degree
    if deg > a.chart.dim:
        raise DegreeOverflow(f"wedge of degree {deg} on a {a.chart.dim}-dimensional chart")
    f, g = a.fn, b.fn

    def fn(x):
        A, B = f(x), g(x)
        out = {}
        for I, ca in A.items():
            for J, cb in B.items():
                if set(I) & set(J):
                    continue
                K, sign = sort_sign(I + J)
                term = ca * cb if sign > 0 else -(ca * cb)
                out[K] = out[K] + term if K in out else term
        return out

    return DifferentialForm(a.chart, deg, fn, f"({a.label}^{b.label})")


def wedge_power(a: DifferentialForm, n: int) -> DifferentialForm:
    out = None
    for _ in range(n):
        out = a if out is None else wedge(out, a)
    if out is None:
        return DifferentialForm(a.chart, 0, lambda x: {(): 1.0}, "1")
    return out


def exterior_derivative(a: DifferentialForm) -> DifferentialForm:
    N, k = a.chart.dim, a.degree
    if k >= N:
        raise DegreeOverflow(f"d of a {k}-form on a {N}-dimensional chart")
    f = a.fn

    def fn(x):
        out = {}
        for i in range(N):
            tag = new_tag()
            xs = list(x)
            xs[i] = Dual(tag, x[i], 1.0)
            for I, c in f(xs).items():
                if i in I:
                    continue
                dc = _dep(c, tag)
                if dc is None:
                    continue
                K = tuple(sorted(I + (i,)))
                if sum(1 for j in I if j < i) % 2:
                    dc = -dc
                out[K] = out[K] + dc if K in out else dc
        return out

    return DifferentialForm(a.chart, k + 1, fn, f"d{a.label}")


def interior_product(X: VectorField, a: DifferentialForm) -> DifferentialForm:
    _check_chart(X.chart, a.chart)
    if a.degree < 1:
        raise DegreeOverflow("interior product needs a form of degree at least 1")
    f, V = a.fn, X.fn

    def fn(x):
        v = V(x)
        out = {}
        for I, c in f(x).items():
            for m, i in enumerate(I):
                if _is_zero(v[i]):
                    continue
                J = I[:m] + I[m + 1:]
                term = v[i] * c if m % 2 == 0 else -(v[i] * c)
                out[J] = out[J] + term if J in out else term
        return out

    return DifferentialForm(a.chart, a.degree - 1, fn, f"i_{X.label}{a.label}")


def lie_derivative_form(X: VectorField, a: DifferentialForm) -> DifferentialForm:
    """Cartan's formula ``L_X a = d(i_X a) + i_X(da)``."""
    _check_chart(X.chart, a.chart)
    if a.degree == 0:
        f = a.fn
        return DifferentialForm(a.chart, 0, lambda x: {(): ScalarField(a.chart, lambda y: f(y).get((), 0.0)).directional(x, X.fn(x))})
    first = exterior_derivative(interior_product(X, a))
    if a.degree == a.chart.dim:
        return first
    return first + interior_product(X, exterior_derivative(a))


def lie_bracket(X: VectorField, Y: VectorField) -> VectorField:
    """``[X, Y] = (X.grad) Y - (Y.grad) X`` via directional dual passes."""
    _check_chart(X.chart, Y.chart)

    def fn(x):
        vx, vy = X.fn(x), Y.fn(x)
        a = Y.jvp(x, vx)
        b = X.jvp(x, vy)
        return [p - q for p, q in zip(a, b)]

    return VectorField(X.chart, fn, f"[{X.label},{Y.label}]")


def pullback(phi: SmoothMap, a: DifferentialForm) -> DifferentialForm:
    _check_chart(phi.target, a.chart)
    k = a.degree
    if k > phi.source.dim:
        raise DimensionMismatch(f"cannot pull a {k}-form back to a {phi.source.dim}-dimensional chart")
    keys = list(combinations(range(phi.source.dim), k))
    f = a.fn

    def fn(x):
        jac = phi.jacobian(x)
        y = phi.fn(x)
        A = f(y)
        if k == 0:
            return {(): A.get((), 0.0)}
        out = {}
        for I in keys:
            total = 0.0
            for J, c in A.items():
                total = total + c * dual.det([[jac[t][s] for s in I] for t in J])
            out[I] = total
        return out

    return DifferentialForm(phi.source, k, fn, f"{phi.label}*{a.label}")


# restriction to tangent spaces

def restricted_values(form: DifferentialForm, M: ManifoldSpec, points, basis=None):
    """Values of ``form`` on all increasing tuples of an orthonormal tangent basis.

    For an intrinsic chart this is just the coefficient array.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if not M.is_embedded and basis is None:
        return form.coefficient_array(points)
    T = M.tangent_basis(points) if basis is None else basis
    coeffs = form.at(points)
    k = T.shape[-1]
    tuples = list(combinations(range(k), form.degree))
    out = np.zeros((points.shape[0], len(tuples)))
    for col, B in enumerate(tuples):
        for I, c in coeffs.items():
            if form.degree == 0:
                out[:, col] += c
                continue
            sub = T[:, list(I), :][:, :, list(B)]
            out[:, col] += c * np.linalg.det(sub)
    return out


def max_norm(form: DifferentialForm, M: ManifoldSpec, points) -> np.ndarray:
    """Per-point max-abs of the restricted values (zero for an empty form)."""
    vals = restricted_values(form, M, points)
    return np.max(np.abs(vals), axis=-1) if vals.shape[-1] else np.zeros(len(vals))
