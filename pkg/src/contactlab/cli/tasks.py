"""Resolution of scene declarations and the verification tasks."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .. import contact, flows, hamiltonian, integrability, models
from ..contact import StrictContactManifold
from ..errors import BadComponentList, BadParams, ContactLabError, SceneError
from ..geometry import (Chart, DifferentialForm, ManifoldSpec, ScalarField, VectorField,
                        exterior_derivative, interior_product, restricted_values)
from ..toric import (ConeSpec, TorusActionSpec, alpha_moment_map, is_good, lens_space_info,
                     lerman_pipeline, moment_cone_sample, normalize_contact_form)
from .scene import (Entry, Scene, Section, parse_expression, parse_number, parse_numbers,
                    parse_vectors, split_list)

BRACKET_LAW_TOLERANCES = {
    "antisymmetry": 1e-9, "bilinearity": 1e-9, "self_bracket": 1e-9, "jacobi": 1e-6,
    "leibniz_defect": 1e-7, "product_rule": 1e-7, "morphism": 1e-7, "char1_vs_char2": 1e-7,
    "lie_vs_char2": 1e-7, "unit_bracket": 1e-7,
}


def fmt(v) -> str:
    v = float(v)
    return "nan" if math.isnan(v) else f"{v:.6e}"


def fmt_vec(v) -> str:
    return "(" + ", ".join(fmt(x) for x in np.ravel(v)) + ")"


@dataclass
class Options:
    seed: int = 0
    samples: int = 100
    tol: float = 1e-8


@dataclass
class TaskResult:
    name: str
    kind: str
    passed: bool
    max_residual: float
    lines: list = field(default_factory=list)
    files: dict = field(default_factory=dict)

    def summary(self):
        return f"TASK {self.name} {'PASS' if self.passed else 'FAIL'} max_residual={fmt(self.max_residual)}"

    def report(self):
        return "\n".join([f"task: {self.kind}", f"name: {self.name}", *self.lines, self.summary()]) + "\n"


def coordinate(entry: Entry, names, key):
    """Coordinate named by ``key(arg)``: a name, or a 0-based index in chart order."""
    a = entry.arg.strip("() ")
    if a in names:
        return a
    if a.isdigit() and int(a) < len(names):
        return names[int(a)]
    raise SceneError(f"{key}({entry.arg}) is not a coordinate of ({', '.join(names)})", entry.line, 1)


# declarations

@dataclass
class ManifoldDecl:
    name: str
    obj: object  # StrictContactManifold or SymplecticManifold
    entry: object = None  # CatalogEntry when built from the catalog
    system: object = None  # IntegrableSystemSpec for model manifolds

    @property
    def chart(self):
        return self.obj.chart


class Workspace:
    """Resolves every declaration of a scene up front so name errors surface as parse errors."""

    def __init__(self, scene: Scene, options: Options):
        self.scene = scene
        self.options = options
        self.manifolds, self.fields, self.functions = {}, {}, {}
        for sec in scene.of_kind("manifold"):
            self._unique(sec)
            self.manifolds[sec.name] = self._manifold(sec)
        for sec in scene.of_kind("function"):
            self._unique(sec)
            m = self.manifold(sec.require("manifold"))
            e = sec.require("expr")
            self.functions[sec.name] = (m, ScalarField.from_expression(m.chart, parse_expression(e, m.chart.coord_names)))
        for sec in scene.of_kind("field"):
            self._unique(sec)
            self.fields[sec.name] = self._field(sec)

    def _unique(self, sec):
        if sec.name in self.manifolds or sec.name in self.fields or sec.name in self.functions:
            raise SceneError(f"name {sec.name!r} declared twice", sec.line, 1)

    def manifold(self, entry: Entry) -> ManifoldDecl:
        try:
            return self.manifolds[entry.value]
        except KeyError:
            raise entry.error(f"unknown manifold {entry.value!r}") from None

    def function(self, entry: Entry, decl: ManifoldDecl, text=None) -> ScalarField:
        """A declared function name, or an inline expression over the manifold's coordinates."""
        text = entry.value if text is None else text
        if text in self.functions:
            return self.functions[text][1]
        return ScalarField.from_expression(decl.chart, parse_expression(entry, decl.chart.coord_names, text))

    def vector_field(self, entry: Entry, decl: ManifoldDecl) -> VectorField:
        text = entry.value
        if text == "reeb":
            return decl.obj.reeb_field
        if text.startswith("hamiltonian:"):
            return hamiltonian.hamiltonian_field(decl.obj, self.function(entry, decl, text.split(":", 1)[1].strip()))
        try:
            return self.fields[text]
        except KeyError:
            raise entry.error(f"unknown field {text!r}") from None

    def _manifold(self, sec: Section) -> ManifoldDecl:
        cat = sec.get("catalog")
        model = sec.get("model")
        if cat is not None:
            params = {}
            for e in sec.entries:
                if e.key in ("catalog",):
                    continue
                if e.key == "a":
                    params["a"] = tuple(parse_numbers(e))
                elif e.key in ("n",):
                    params["n"] = parse_number(e, int)
                elif e.key == "r_max":
                    params["r_max"] = parse_number(e)
                elif e.key == "base":
                    params["base"] = e.value
                else:
                    raise e.error(f"unknown catalog parameter {e.key!r}", -len(e.key) - 3)
            try:
                entry = models.build(cat.value, **params)
            except BadParams as exc:
                raise cat.error(str(exc)) from None
            return ManifoldDecl(sec.name, entry.manifold, entry)
        if model is not None:
            n = parse_number(sec.require("n"), int)
            try:
                if model.value == "action_angle":
                    y0 = sec.get("y0")
                    system = integrability.build_action_angle_model(n, y0.value if y0 else "1")
                elif model.value == "normal_form":
                    k = parse_number(sec.require("k"), int)
                    comps = split_list(sec.value("components", ""))
                    system = integrability.build_normal_form_model(n, k, comps)
                else:
                    raise model.error(f"unknown model {model.value!r}")
            except (BadComponentList, ContactLabError) as exc:
                if isinstance(exc, SceneError):
                    raise
                raise model.error(str(exc)) from None
            return ManifoldDecl(sec.name, system.base, None, system)
        coords_e = sec.require("coords")
        names = split_list(coords_e.value)
        periodic_names = split_list(sec.value("periodic", "")) if sec.get("periodic") else []
        for p in periodic_names:
            if p not in names:
                raise sec.get("periodic").error(f"unknown coordinate {p!r}")
        bounds = []
        for nm in names:
            b = next((e for e in sec.all("bounds") if e.arg == nm), None)
            if b is not None:
                lo, hi = parse_numbers(b)
                bounds.append((lo, hi))
            else:
                bounds.append((0.0, 2 * math.pi) if nm in periodic_names else (-2.0, 2.0))
        domain = []
        for e in sec.all("domain"):
            for op in (">", "<"):
                if op in e.value:
                    lhs, rhs = e.value.split(op, 1)
                    parse_expression(e, names, lhs)
                    parse_expression(e, names, rhs)
                    break
            else:
                raise e.error("expected a strict inequality with '<' or '>'")
            domain.append(e.value)
        try:
            chart = Chart(tuple(names), tuple(n in periodic_names for n in names), tuple(bounds), tuple(domain))
        except ValueError as exc:
            raise coords_e.error(str(exc)) from None
        levels = [ScalarField.from_expression(chart, parse_expression(e, names)) for e in sec.all("level")]
        coeffs = {}
        for e in sec.all("coeff"):
            coeffs[coordinate(e, names, "coeff")] = parse_expression(e, names)
        if not coeffs:
            raise SceneError(f"[manifold {sec.name}] needs at least one coeff(...) line", sec.line, 1)
        alpha = DifferentialForm.from_coefficients(chart, coeffs, label="alpha")
        closed = None
        reeb_entries = sec.all("reeb")
        if reeb_entries:
            comps = {coordinate(e, names, "reeb"): parse_expression(e, names) for e in reeb_entries}
            closed = VectorField.from_components(chart, comps, "R_closed")
        spec = ManifoldSpec(chart, levels, sec.name)
        try:
            M = StrictContactManifold(spec, alpha, sec.name, closed)
        except ContactLabError as exc:
            raise coords_e.error(str(exc)) from None
        return ManifoldDecl(sec.name, M)

    def _field(self, sec: Section) -> VectorField:
        decl = self.manifold(sec.require("manifold"))
        ham = sec.get("hamiltonian")
        if ham is not None:
            return hamiltonian.hamiltonian_field(decl.obj, self.function(ham, decl))
        comps = {}
        for e in sec.all("component"):
            comps[coordinate(e, decl.chart.coord_names, "component")] = parse_expression(e, decl.chart.coord_names)
        if not comps:
            raise SceneError(f"[field {sec.name}] needs component(...) lines or hamiltonian = ...", sec.line, 1)
        return VectorField.from_components(decl.chart, comps, sec.name)


# helpers

def _contact(decl: ManifoldDecl, entry: Entry) -> StrictContactManifold:
    if not isinstance(decl.obj, StrictContactManifold):
        raise entry.error(f"{decl.name} is not a contact manifold")
    return decl.obj


def _bool(entry: Entry):
    v = entry.value.lower()
    if v in ("true", "yes", "1"):
        return True
    if v in ("false", "no", "0"):
        return False
    raise entry.error(f"expected true or false, got {entry.value!r}")


def _tol(sec: Section, default):
    e = sec.get("tol")
    return parse_number(e) if e is not None else default


def _samples(sec: Section, opts: Options):
    e = sec.get("samples")
    return parse_number(e, int) if e is not None else opts.samples


def reeb_axiom_residual(M: StrictContactManifold, pts):
    R = M.reeb_field
    a = np.abs(hamiltonian.alpha_of(M, R).at(pts) - 1.0).max()
    b = np.abs(restricted_values(interior_product(R, M.dalpha), M.manifold, pts)).max()
    return float(max(a, b))


def _expected_field(sec: Section, decl: ManifoldDecl, key="expect"):
    entries = [e for e in sec.entries if e.key == key and e.arg]
    if not entries:
        e = sec.get(key)
        if e is not None and e.value == "closed":
            closed = getattr(decl.obj, "closed_form_reeb", None)
            if closed is None:
                raise e.error(f"{decl.name} has no closed-form Reeb field")
            return closed
        return None
    comps = {}
    for e in entries:
        comps[coordinate(e, decl.chart.coord_names, key)] = parse_expression(e, decl.chart.coord_names)
    return VectorField.from_components(decl.chart, comps, "expected")


# tasks

def task_verify_contact(ws, sec, opts, name):
    decl = ws.manifold(sec.require("manifold"))
    M = _contact(decl, sec.require("manifold"))
    expect = _bool(sec.get("expect")) if sec.get("expect") else True
    n = _samples(sec, opts)
    rep = contact.verify_contact(M.manifold, M.alpha, samples=n, seed=opts.seed)
    res = float("nan")
    if rep.is_contact:
        res = reeb_axiom_residual(M, M.sample(n, opts.seed))
    tol = _tol(sec, 1e-9)
    passed = rep.is_contact == expect and (not rep.is_contact or res < tol)
    lines = [f"manifold: {decl.name}", f"samples: {n}", f"is_contact: {str(rep.is_contact).lower()}",
             f"expected: {str(expect).lower()}", f"min_volume: {fmt(rep.min_value)}",
             f"witness: {fmt_vec(rep.witness)}", f"threshold: {fmt(rep.threshold)}",
             f"reeb_axiom_residual: {fmt(res)}"]
    return passed, res, lines, {}


def task_reeb(ws, sec, opts, name):
    decl = ws.manifold(sec.require("manifold"))
    M = _contact(decl, sec.require("manifold"))
    n = _samples(sec, opts)
    pts = M.sample(n, opts.seed)
    R = contact.reeb(M, pts)
    res = reeb_axiom_residual(M, pts)
    lines = [f"manifold: {decl.name}", f"coordinates: {', '.join(M.chart.coord_names)}", f"samples: {n}",
             f"axiom_residual: {fmt(res)}"]
    E = _expected_field(sec, decl)
    if E is not None:
        dev = float(np.abs(R - E.at(pts)).max())
        lines.append(f"closed_form_deviation: {fmt(dev)}")
        res = max(res, dev)
    show = parse_number(sec.get("show"), int) if sec.get("show") else 5
    for p, r in zip(pts[:show], R[:show]):
        lines.append(f"point {fmt_vec(p)} reeb {fmt_vec(r)}")
    return res < _tol(sec, opts.tol), res, lines, {}


def task_classify_field(ws, sec, opts, name):
    decl = ws.manifold(sec.require("manifold"))
    M = _contact(decl, sec.require("manifold"))
    X = ws.vector_field(sec.require("field"), decl)
    cls = contact.classify_vector_field(M, X, samples=_samples(sec, opts), seed=opts.seed,
                                        tol=_tol(sec, opts.tol))
    expect = sec.value("expect")
    if expect is not None and expect not in ("strict_contact", "contact", "not_contact"):
        raise sec.get("expect").error("expect must be strict_contact, contact or not_contact")
    passed = cls.kind == expect if expect else cls.is_contact
    lines = [f"manifold: {decl.name}", f"field: {sec.value('field')}", f"class: {cls.kind}",
             f"expected: {expect or 'contact or strict_contact'}", f"residual: {fmt(cls.residual)}"]
    if cls.witness is not None:
        lines.append(f"witness: {fmt_vec(cls.witness)}")
    if cls.mu is not None and cls.kind == "contact":
        lines.append(f"mu_range: {fmt(cls.mu.min())} {fmt(cls.mu.max())}")
    # a field that is correctly identified as not contact has no residual to speak of
    res = cls.residual if cls.is_contact else 0.0
    return passed, res, lines, {}


def task_hamiltonian(ws, sec, opts, name):
    decl = ws.manifold(sec.require("manifold"))
    M = _contact(decl, sec.require("manifold"))
    H = ws.function(sec.require("function"), decl)
    pts = M.sample(_samples(sec, opts), opts.seed)
    X = hamiltonian.hamiltonian_field(M, H)
    r1 = float(np.abs(hamiltonian.alpha_of(M, X).at(pts) - H.at(pts)).max())
    dH = exterior_derivative(H.as_form())
    rhs = M.reeb_field.apply(H) * M.alpha - dH
    r2 = float(np.abs(restricted_values(interior_product(X, M.dalpha) - rhs, M.manifold, pts)).max())
    lines = [f"manifold: {decl.name}", f"function: {H.label}", f"alpha(X_H) - H: {fmt(r1)}",
             f"i_X dalpha - (dH(R) alpha - dH): {fmt(r2)}"]
    res = max(r1, r2)
    E = _expected_field(sec, decl)
    if E is not None:
        dev = float(np.abs(X.at(pts) - E.at(pts)).max())
        lines.append(f"closed_form_deviation: {fmt(dev)}")
        res = max(res, dev)
    for p, v in zip(pts[:3], X.at(pts[:3])):
        lines.append(f"point {fmt_vec(p)} X_H {fmt_vec(v)}")
    return r1 < 1e-9 and res < _tol(sec, opts.tol), res, lines, {}


def task_bracket(ws, sec, opts, name):
    decl = ws.manifold(sec.require("manifold"))
    M = _contact(decl, sec.require("manifold"))
    f = ws.function(sec.require("f"), decl)
    g = ws.function(sec.require("g"), decl)
    mode = sec.value("mode", "char2")
    if mode not in hamiltonian.MODES + ("all",):
        raise sec.get("mode").error(f"mode must be one of {hamiltonian.MODES + ('all',)}")
    pts = M.sample(_samples(sec, opts), opts.seed)
    base = hamiltonian.jacobi_bracket(M, f, g, "char2" if mode == "all" else mode).at(pts)
    lines = [f"manifold: {decl.name}", f"f: {f.label}", f"g: {g.label}", f"mode: {mode}"]
    res = 0.0
    if mode == "all":
        for m in ("lie", "char1"):
            d = float(np.abs(hamiltonian.jacobi_bracket(M, f, g, m).at(pts) - base).max())
            lines.append(f"{m}_vs_char2: {fmt(d)}")
            res = max(res, d)
    e = sec.get("expect")
    if e is not None:
        E = ws.function(e, decl)
        d = float(np.abs(base - E.at(pts)).max())
        lines.append(f"deviation_from_expected: {fmt(d)}")
        res = max(res, d)
    lines.append(f"range: {fmt(base.min())} {fmt(base.max())}")
    return res < _tol(sec, 1e-7), res, lines, {}


def task_bracket_laws(ws, sec, opts, name):
    decl = ws.manifold(sec.require("manifold"))
    M = _contact(decl, sec.require("manifold"))
    fe = sec.require("functions")
    fs = [ws.function(fe, decl, t) for t in split_list(fe.value)]
    if len(fs) < 3:
        raise fe.error("bracket-laws needs at least three functions")
    pts = M.sample(_samples(sec, opts), opts.seed)
    rep = hamiltonian.check_bracket_laws(M, fs, pts, np.random.default_rng(opts.seed))
    lines = [f"manifold: {decl.name}", f"functions: {', '.join(f.label for f in fs)}"]
    passed = True
    for k in sorted(rep.residuals):
        ok = rep.residuals[k] < BRACKET_LAW_TOLERANCES[k]
        passed &= ok
        lines.append(f"{k}: {fmt(rep.residuals[k])} (tol {fmt(BRACKET_LAW_TOLERANCES[k])}) {'ok' if ok else 'FAIL'}")
    return passed, max(rep.residuals.values()), lines, {}


def _system(ws, sec, decl):
    if decl.system is not None and sec.get("integrals") is None:
        return decl.system
    M = _contact(decl, sec.require("manifold"))
    ie = sec.require("integrals")
    integrals = [ws.function(ie, decl, t) for t in split_list(ie.value)]
    dyn = sec.get("dynamics")
    X = M.reeb_field if dyn is None else ws.vector_field(dyn, decl)
    mode = sec.value("mode", "reeb")
    try:
        return integrability.IntegrableSystemSpec(M, X, integrals, mode)
    except (ContactLabError, ValueError) as exc:
        raise ie.error(str(exc)) from None


def task_check_integrable(ws, sec, opts, name):
    decl = ws.manifold(sec.require("manifold"))
    spec = _system(ws, sec, decl)
    n = parse_number(sec.get("samples"), int) if sec.get("samples") else 200
    rep = integrability.check_integrable(spec, samples=n, seed=opts.seed, tol=_tol(sec, 1e-7))
    lines = [f"manifold: {decl.name}", f"samples: {n}"]
    for k, v in rep.residuals.items():
        lines.append(f"{k}: {fmt(v)}")
    lines.append(f"independence_fraction: {rep.independence_fraction:.4f}")
    for p, r in rep.failures:
        lines.append(f"independence_failure {fmt_vec(p)} ratio {fmt(r)}")
    span = integrability.span_diagnostics(spec, samples=min(n, 50), seed=opts.seed)
    lines += [f"span_rank_min: {span.min_rank} (expected {span.expected_rank})",
              f"horizontal_rank_min: {span.min_horizontal_rank}", f"involutivity: {fmt(span.involutivity)}"]
    return rep.passed, rep.max_residual, lines, {}


def task_flow(ws, sec, opts, name):
    decl = ws.manifold(sec.require("manifold"))
    M = decl.obj
    X = ws.vector_field(sec.require("field"), decl)
    se = sec.require("start")
    z0 = parse_numbers(se)
    if len(z0) != M.chart.dim:
        raise se.error(f"start needs {M.chart.dim} coordinates")
    t_end = parse_number(sec.require("t_end"))
    h = parse_number(sec.require("h"))
    cons = {}
    ce = sec.get("conserved")
    if ce is not None:
        for t in split_list(ce.value):
            cons[t] = ws.function(ce, decl, t)
    trace = flows.integrate(M, X, z0, t_end, h, cons)
    drift = flows.conservation_report(trace, cons)
    spec = M.manifold if isinstance(M, StrictContactManifold) else M.manifold
    cdrift = float(np.abs(spec.constraint_values(trace.states)).max()) if spec.is_embedded else 0.0
    out = sec.value("output", f"{name}.csv")
    lines = [f"manifold: {decl.name}", f"field: {sec.value('field')}", f"start: {fmt_vec(z0)}",
             f"t_end: {fmt(t_end)}", f"h: {fmt(h)}", f"steps: {len(trace.times) - 1}",
             f"end: {fmt_vec(trace.states[-1])}", f"constraint_drift: {fmt(cdrift)}"]
    for k, v in drift.items():
        lines.append(f"drift {k}: {fmt(v)}")
    lines.append(f"trace: {out}")
    res = max([cdrift, *drift.values()])
    E = sec.get("expect_end")
    if E is not None:
        target = parse_numbers(E)
        dev = float(np.abs(trace.states[-1] - np.array(target)).max())
        lines.append(f"end_deviation: {fmt(dev)}")
        res = max(res, dev)
    return res < _tol(sec, 1e-6), res, lines, {out: trace.to_csv()}


def task_cone_check(ws, sec, opts, name):
    ne = sec.require("normals")
    normals = parse_vectors(ne)
    try:
        C = ConeSpec(normals)
        rep = is_good(C)
    except (ContactLabError, ValueError) as exc:
        raise ne.error(str(exc)) from None
    expect = sec.value("expect")
    if expect is not None and expect not in ("good", "bad"):
        raise sec.get("expect").error("expect must be good or bad")
    lines = [f"normals: {'; '.join(' '.join(str(c) for c in v) for v in C.normals)}",
             f"minimal: {str(C.is_minimal).lower()}", f"good: {str(rep.good).lower()}"]
    for f in rep.faces:
        lines.append(f"face J={f.label()} dim={f.dimension} invariants={f.invariants} "
                     f"zbasis={str(f.zbasis).lower()} witness=({', '.join(str(w) for w in f.witness)})")
    if rep.witness is not None:
        lines.append(f"witness_face: J={rep.witness.label()} invariants={rep.witness.invariants}")
    passed = rep.good == (expect == "good") if expect else rep.good
    return passed, 0.0, lines, {}


def task_lens(ws, sec, opts, name):
    p, q = parse_number(sec.require("p"), int), parse_number(sec.require("q"), int)
    try:
        L = lens_space_info(p, q)
    except ContactLabError as exc:
        return False, float("nan"), [f"error: {exc}"], {}
    lines = [f"p: {L.p}", f"q: {L.q}", f"normalized: L({L.normalized[0]},{L.normalized[1]})",
             f"aliases: {', '.join(L.aliases) if L.aliases else 'none'}"]
    expect = sec.value("expect")
    passed = expect in L.aliases if expect else True
    return passed, 0.0, lines, {}


def task_moment_map(ws, sec, opts, name):
    decl = ws.manifold(sec.require("manifold"))
    M = _contact(decl, sec.require("manifold"))
    ge = sec.require("generators")
    gens = []
    for t in split_list(ge.value):
        if t not in ws.fields:
            raise ge.error(f"unknown field {t!r}")
        gens.append(ws.fields[t])
    spec = TorusActionSpec(M, gens)
    pts = M.sample(_samples(sec, opts), opts.seed)
    chk = spec.check(pts)
    psi = alpha_moment_map(spec, pts)
    lines = [f"manifold: {decl.name}", f"generators: {', '.join(split_list(ge.value))}",
             f"commutation_residual: {fmt(chk['commute'])}", f"invariance_residual: {fmt(chk['invariance'])}"]
    res = max(chk["commute"], chk["invariance"])
    exp = [e for e in sec.all("expect") if e.arg]
    for e in exp:
        j = parse_number(e, int, e.arg)
        E = ws.function(e, decl)
        d = float(np.abs(psi[:, j] - E.at(pts)).max())
        lines.append(f"component {j} deviation: {fmt(d)}")
        res = max(res, d)
    passed = chk["passed"]
    ne = sec.get("normalize")
    if ne is not None and _bool(ne):
        nspec = normalize_contact_form(spec, pts)
        d = float(np.abs(np.linalg.norm(alpha_moment_map(nspec, pts), axis=1) - 1.0).max())
        lines.append(f"normalized_norm_deviation: {fmt(d)}")
        res = max(res, d)
    ce = sec.get("cone")
    if ce is not None:
        C = ConeSpec(parse_vectors(ce))
        count = parse_number(sec.get("count"), int) if sec.get("count") else 2000
        mc = moment_cone_sample(spec, count, opts.seed, C)
        lines += [f"cone_samples: {count}", f"contained: {str(mc.contained).lower()}",
                  f"covered: {str(mc.covered).lower()}", f"min_inequality: {fmt(mc.min_inequality)}",
                  "facet_distance: " + " ".join(fmt(d) for d in mc.facet_distance)]
        passed &= mc.contained and mc.covered
    return passed and res < _tol(sec, 1e-9), res, lines, {}


def task_lerman(ws, sec, opts, name):
    ne = sec.require("normals")
    normals, samples = parse_vectors(ne), _samples(sec, opts)
    try:
        C = ConeSpec(normals)
        rep = lerman_pipeline(C, samples=samples, seed=opts.seed)
    except (ContactLabError, ValueError) as exc:
        return False, float("nan"), [f"error: {type(exc).__name__}: {exc}"], {}
    lines = [f"normals: {'; '.join(' '.join(str(c) for c in v) for v in C.normals)}",
             f"tau: {rep.tau}", f"rank: {rep.rank}",
             f"kernel_basis: {rep.kernel_basis}", f"dim_N: {rep.dim_N}",
             f"discrete_invariants: {rep.discrete_invariants}",
             f"sigma: {[[str(v) for v in row] for row in rep.sigma]}",
             f"samples: {rep.samples}", f"membership: {str(rep.membership_ok).lower()}",
             f"in_cone_fraction: {rep.in_cone_fraction:.4f}", f"freeness: {str(rep.freeness_ok).lower()}",
             f"support_patterns: {[tuple(j + 1 for j in p) for p in rep.support_patterns]}",
             f"max_image_error: {fmt(rep.max_image_error)}", f"sigma_independence: {fmt(rep.sigma_independence)}"]
    passed = rep.passed
    ke = sec.get("kernel")
    if ke is not None:
        want = parse_vectors(ke) if ke.value != "none" else []
        ok = want == rep.kernel_basis
        lines.append(f"kernel_matches_expected: {str(ok).lower()}")
        passed &= ok
    res = max(rep.max_image_error, rep.sigma_independence)
    return passed and res < _tol(sec, 1e-9), res, lines, {}


def emit_plane_field_grid(M: StrictContactManifold, region, resolution: int):
    """Spanning vectors of ``ker alpha`` on a regular grid of a 3-dimensional chart.

    ``region`` is ``(lo, hi)`` per output column; columns follow ``x, y, z``
    when the chart uses exactly those names, else the chart order. Points where
    the contact condition fails get NaN vectors. Returns ``(csv_text, flagged)``.
    """
    chart = M.chart
    if chart.dim != 3 or M.manifold.is_embedded:
        raise ValueError("plane grids need an intrinsic 3-dimensional chart")
    names = chart.coord_names
    order = [names.index(c) for c in ("x", "y", "z")] if set(names) == {"x", "y", "z"} else [0, 1, 2]
    axes = []
    for lo, hi in region:
        axes.append(np.array([(lo + hi) / 2.0]) if resolution == 1 else np.linspace(lo, hi, resolution))
    grid = np.array(np.meshgrid(*axes, indexing="ij")).reshape(3, -1).T  # output order
    pts = np.empty_like(grid)
    pts[:, order] = grid
    a = M.alpha.coefficient_array(pts)
    vol = np.abs(restricted_values(contact.contact_volume(M.manifold, M.alpha), M.manifold, pts)[:, 0])
    rows, flagged = [], 0
    for p, ai, v in zip(grid, a, vol):
        norm2 = float(ai @ ai)
        if not (v > contact.CONTACT_THRESHOLD) or norm2 == 0.0:
            flagged += 1
            rows.append(list(p) + [float("nan")] * 6)
            continue
        basis = []
        for i in np.argsort(np.abs(ai), kind="stable")[:2]:
            e = np.zeros(3)
            e[i] = 1.0
            u = e - (ai[i] / norm2) * ai
            for b in basis:
                u = u - (u @ b) * b
            basis.append(u / np.linalg.norm(u))
        u1, u2 = (b[order] for b in basis)
        rows.append(list(p) + list(u1) + list(u2))
    cols = [names[i] for i in order]
    header = cols + [f"u1{c}" for c in cols] + [f"u2{c}" for c in cols]
    text = ",".join(header) + "\n" + "".join(",".join(f"{v:.17g}" for v in r) + "\n" for r in rows)
    if flagged:
        warnings.warn(f"{flagged} grid points fail the contact condition and are marked NaN", stacklevel=2)
    return text, flagged


def task_plane_grid(ws, sec, opts, name):
    decl = ws.manifold(sec.require("manifold"))
    M = _contact(decl, sec.require("manifold"))
    re_ = sec.require("region")
    vals = parse_numbers(re_)
    if len(vals) != 6:
        raise re_.error("region needs six numbers: lo hi lo hi lo hi")
    res = parse_number(sec.require("resolution"), int)
    with warnings.catch_warnings(record=True):
        warnings.simplefilter("always")
        text, flagged = emit_plane_field_grid(M, list(zip(vals[::2], vals[1::2])), res)
    out = sec.value("output", f"{name}.csv")
    rows = text.count("\n") - 1
    lines = [f"manifold: {decl.name}", f"resolution: {res}", f"rows: {rows}", f"flagged: {flagged}",
             f"grid: {out}"]
    if flagged:
        lines.append(f"warning: {flagged} points fail the contact condition (NaN rows)")
    expect = sec.get("expect_flagged")
    passed = flagged == parse_number(expect, int) if expect else flagged == 0
    return passed, 0.0, lines, {out: text}


TASKS = {
    "verify-contact": task_verify_contact,
    "reeb": task_reeb,
    "classify-field": task_classify_field,
    "hamiltonian": task_hamiltonian,
    "bracket": task_bracket,
    "bracket-laws": task_bracket_laws,
    "check-integrable": task_check_integrable,
    "flow": task_flow,
    "cone-check": task_cone_check,
    "lens": task_lens,
    "moment-map": task_moment_map,
    "lerman": task_lerman,
    "plane-grid": task_plane_grid,
}


def run_task(ws: Workspace, sec: Section, opts: Options, name: str) -> TaskResult:
    """Run one task; library errors become a failed result rather than a crash."""
    try:
        passed, res, lines, files = TASKS[sec.name](ws, sec, opts, name)
    except SceneError:
        raise
    except (ContactLabError, ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
        return TaskResult(name, sec.name, False, float("nan"), [f"error: {type(exc).__name__}: {exc}"])
    return TaskResult(name, sec.name, bool(passed), float(res), lines, files)
