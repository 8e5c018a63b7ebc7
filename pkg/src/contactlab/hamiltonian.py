"""Contact Hamiltonian fields and the Jacobi bracket."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .contact import (StrictContactManifold, classify_vector_field, semibasic_part,
                      sharp_components)
from .errors import NotContactField, NotReebIntegral
from .geometry import ScalarField, VectorField, lie_bracket

MODES = ("lie", "char1", "char2")


class ContactHamiltonianField(VectorField):
    """``X_H = H R + alpha_sharp(semibasic part of dH)``, evaluated pointwise."""

    def __init__(self, M: StrictContactManifold, H: ScalarField):
        H = ScalarField.coerce(M.chart, H)
        self.H = H
        self.base = M

        def fn(x):
            R = M.reeb_field.fn(x)
            h = H.fn(x)
            sb = semibasic_part(M, x, H.gradient(x))
            S = sharp_components(M, x, sb)
            return [h * r + s for r, s in zip(R, S)]

        super().__init__(M.chart, fn, f"X_{H.label}")


def hamiltonian_field(M: StrictContactManifold, H) -> ContactHamiltonianField:
    return ContactHamiltonianField(M, H)


def function_of_field(M: StrictContactManifold, X: VectorField, points=None, samples=100, seed=0,
                      tol=1e-8) -> ScalarField:
    """``alpha(X)`` for a contact vector field ``X``."""
    cls = classify_vector_field(M, X, points=points, samples=samples, seed=seed, tol=tol)
    if not cls.is_contact:
        raise NotContactField(f"L_X alpha is not proportional to alpha near {cls.witness}")
    return alpha_of(M, X)


def alpha_of(M: StrictContactManifold, X: VectorField) -> ScalarField:
    a, V = M.alpha.fn, X.fn

    def fn(x):
        v = V(x)
        return sum((c * v[i] for (i,), c in a(x).items()), 0.0)

    return ScalarField(M.chart, fn, f"alpha({X.label})")


def _reeb_derivative(M, f, x):
    return f.directional(x, M.reeb_field.fn(x))


def jacobi_bracket(M: StrictContactManifold, f, g, mode: str = "char2") -> ScalarField:
    """The Jacobi bracket ``[f, g]`` computed by one of three equivalent formulas.

    lie:   alpha([X_f, X_g])
    char1: dalpha(X_f, X_g) + f R(g) - g R(f)
    char2: X_f(g) - g R(f)
    """
    f = ScalarField.coerce(M.chart, f)
    g = ScalarField.coerce(M.chart, g)
    label = f"[{f.label},{g.label}]"
    if mode == "char2":
        Xf = hamiltonian_field(M, f)

        def fn(x):
            return g.directional(x, Xf.fn(x)) - g.fn(x) * _reeb_derivative(M, f, x)

    elif mode == "char1":
        Xf, Xg = hamiltonian_field(M, f), hamiltonian_field(M, g)
        da = M.dalpha

        def fn(x):
            return (da.evaluate_on(x, [Xf.fn(x), Xg.fn(x)])
                    + f.fn(x) * _reeb_derivative(M, g, x)
                    - g.fn(x) * _reeb_derivative(M, f, x))

    elif mode == "lie":
        br = lie_bracket(hamiltonian_field(M, f), hamiltonian_field(M, g))
        fn = alpha_of(M, br).fn
    else:
        raise ValueError(f"unknown bracket mode {mode!r}; expected one of {MODES}")
    return ScalarField(M.chart, fn, label)


@dataclass
class BracketLawReport:
    residuals: dict = field(default_factory=dict)

    def max(self, key):
        return self.residuals[key]


def check_bracket_laws(M: StrictContactManifold, functions, points, rng=None) -> BracketLawReport:
    """Residuals of the Lie-algebra laws, the Leibniz defect, the product rule for
    Hamiltonian fields, the bracket/field morphism and mode agreement.

    ``functions`` needs at least three scalar fields; the first three are used
    as ``(f, g, h)`` and ``f' = h`` in the Leibniz identities.
    """
    fs = [ScalarField.coerce(M.chart, f) for f in functions]
    if len(fs) < 3:
        raise ValueError("bracket laws need at least three functions")
    f, g, h = fs[:3]
    rng = np.random.default_rng(0) if rng is None else rng
    a, b = rng.uniform(-2.0, 2.0, size=2)
    pts = np.atleast_2d(points)
    one = ScalarField.constant(M.chart, 1.0)
    br = lambda u, v: jacobi_bracket(M, u, v)
    at = lambda s: s.at(pts)
    out = {}

    fg, gf = at(br(f, g)), at(br(g, f))
    out["antisymmetry"] = _max(fg + gf)
    out["bilinearity"] = _max(at(br(a * f + b * h, g)) - a * fg - b * at(br(h, g)))
    out["jacobi"] = _max(at(br(f, br(g, h))) + at(br(g, br(h, f))) + at(br(h, br(f, g))))
    fp = h
    out["leibniz_defect"] = _max(at(br(f * fp, g)) - at(f) * at(br(fp, g)) - at(fp) * fg
                                 + at(f) * at(fp) * at(br(one, g)))
    X = lambda s: hamiltonian_field(M, s).at(pts)
    R = M.reeb_field.at(pts)
    out["product_rule"] = _max(X(f * fp) - at(f)[:, None] * X(fp) - at(fp)[:, None] * X(f)
                               + (at(f) * at(fp))[:, None] * R)
    out["morphism"] = _max(X(br(f, g)) - lie_bracket(hamiltonian_field(M, f), hamiltonian_field(M, g)).at(pts))
    c1 = at(jacobi_bracket(M, f, g, "char1"))
    lie = at(jacobi_bracket(M, f, g, "lie"))
    out["char1_vs_char2"] = _max(c1 - fg)
    out["lie_vs_char2"] = _max(lie - fg)
    out["self_bracket"] = _max(at(br(f, f)))
    out["unit_bracket"] = _max(at(br(one, f)) - at(M.reeb_field.apply(f)))
    return BracketLawReport(out)


def _max(a):
    return float(np.max(np.abs(a)))


@dataclass
class ReebIntegralReport:
    xf_g: float
    xg_f: float
    bracket: float
    flags_agree: bool
    closure: float = 0.0
    tol: float = 1e-8


def reeb_integral_properties(M: StrictContactManifold, f, g, points, g2=None, tol=1e-8):
    """For Reeb-invariant ``f, g``: ``X_f(g) = 0``, ``X_g(f) = 0`` and ``[f,g] = 0`` agree."""
    f = ScalarField.coerce(M.chart, f)
    g = ScalarField.coerce(M.chart, g)
    pts = np.atleast_2d(points)
    funcs = [f, g] + ([ScalarField.coerce(M.chart, g2)] if g2 is not None else [])
    for s in funcs:
        r = _max(M.reeb_field.apply(s).at(pts))
        if r >= tol:
            raise NotReebIntegral(f"R({s.label}) reaches {r:.3e}")
    Xf, Xg = hamiltonian_field(M, f), hamiltonian_field(M, g)
    a = _max(Xf.apply(g).at(pts))
    b = _max(Xg.apply(f).at(pts))
    c = _max(jacobi_bracket(M, f, g).at(pts))
    small = [v < tol for v in (a, b, c)]
    rep = ReebIntegralReport(a, b, c, all(small) or not any(small), tol=tol)
    if g2 is not None:
        g2 = funcs[2]
        if a < tol and _max(Xf.apply(g2).at(pts)) < tol:
            rep.closure = _max(Xf.apply(jacobi_bracket(M, g, g2)).at(pts))
    return rep
