"""Scenes: a chart, an action, a Dirac structure and golden expectations."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..actions import GroupAction, InvariantBasis
from ..calculus import OneForm, Section, VectorField
from ..dirac import Descending, DiracStructure, new_dirac
from ..errors import (
    DiracRedError,
    ExprSyntaxError,
    SceneParseError,
    UnknownCoordinate,
    ValidationError,
)
from ..exprcore import Chart, RatFn, parse_expr
from ..reduction import QuotientMap, StratumChart
from .fileformat import Constraint, Document, dump_document, parse_document


@dataclass(frozen=True)
class FieldDecl:
    name: str
    role: str  # "invariant" or "vertical"
    field: VectorField
    pushforward: VectorField | None = None


@dataclass(frozen=True)
class StratumDecl:
    chart: StratumChart
    expected: tuple = ()
    auxiliary: Section | None = None
    auxiliary_witness: tuple = ()  # (1-based index into expected, coefficient)
    upstairs_locus: tuple = ()

    @property
    def name(self):
        return self.chart.name


@dataclass(frozen=True)
class BracketDecl:
    stratum: str
    pair: tuple
    equals: tuple | None = None
    against: tuple = ()
    witness: tuple | None = None


@dataclass(frozen=True)
class RelationDecl:
    name: str
    lhs: tuple
    rhs: tuple
    points: tuple
    value: tuple | None = None


@dataclass(frozen=True)
class HamiltonianDecl:
    f: RatFn
    admissible: bool
    xf: VectorField | None = None
    gauge: tuple = ()
    stratum: str | None = None
    reduced: Section | None = None


@dataclass(eq=False)
class Scene:
    name: str
    description: str
    chart: Chart
    action: GroupAction
    invariants: InvariantBasis
    quotient: QuotientMap
    dirac: DiracStructure
    descending: tuple
    fields: tuple
    strata: tuple
    samples: tuple
    brackets: tuple = ()
    relations: tuple = ()
    hamiltonians: tuple = ()
    expect: dict = field(default_factory=dict)
    document: Document | None = None

    @property
    def target(self) -> Chart:
        return self.quotient.target

    @property
    def declared_invariant_fields(self):
        return [f.field for f in self.fields if f.role == "invariant"]

    def stratum(self, name: str) -> StratumDecl:
        for s in self.strata:
            if s.name == name:
                return s
        known = ", ".join(s.name for s in self.strata) or "none"
        raise KeyError(f"scene {self.name} has no stratum {name!r} (known: {known})")

    def dumps(self) -> str:
        return dump_document(self.document)

    def __eq__(self, other):
        if not isinstance(other, Scene):
            return NotImplemented
        return self.document == other.document

    def __hash__(self):
        return hash(self.name)


# -- construction ------------------------------------------------------------------------


class _Builder:
    def __init__(self, doc: Document):
        self.doc = doc

    def fail(self, section, index, key, message):
        line, col = self.doc.where(section, index, key)
        raise SceneParseError(f"[{section}] {key}: {message}", line, col)

    def get(self, section, index, key, kinds, required=True, default=None):
        recs = self.doc.records(section)
        rec = recs[index] if index < len(recs) else {}
        if key not in rec:
            if required:
                line, col = self.doc.where(section, index, next(iter(rec), key))
                raise SceneParseError(f"[{section}] is missing required entry {key!r}", line, col)
            return default
        v = rec[key]
        if not isinstance(v, kinds):
            self.fail(section, index, key, f"expected {_kind_names(kinds)}, got {type(v).__name__}")
        return v

    def expr(self, text, chart, section, index, key):
        if not isinstance(text, str):
            self.fail(section, index, key, f"expected a quoted expression, got {text!r}")
        try:
            return parse_expr(text, chart)
        except ExprSyntaxError as exc:
            line, col = self.doc.where(section, index, key)
            raise SceneParseError(f"[{section}] {key}: {exc}", line, col) from exc
        except UnknownCoordinate as exc:
            self.fail(section, index, key, f"{exc} in {text!r} (chart {chart.name})")

    def exprs(self, values, chart, section, index, key, length=None):
        if not isinstance(values, (list, tuple)):
            self.fail(section, index, key, "expected a list of expressions")
        if length is not None and len(values) != length:
            self.fail(section, index, key, f"expected {length} entries, got {len(values)}")
        return [self.expr(v, chart, section, index, key) for v in values]

    def point(self, values, dim, section, index, key):
        if not isinstance(values, (list, tuple)) or len(values) != dim:
            self.fail(section, index, key, f"expected a point with {dim} coordinates")
        try:
            return tuple(Fraction(str(v)) for v in values)
        except (ValueError, ZeroDivisionError):
            self.fail(section, index, key, f"not a rational point: {values!r}")

    def section_value(self, pair, chart, section, index, key):
        if not (isinstance(pair, tuple) and len(pair) == 2):
            self.fail(section, index, key, "expected a pair (X list, alpha list)")
        x = self.exprs(pair[0], chart, section, index, key, chart.dim)
        a = self.exprs(pair[1], chart, section, index, key, chart.dim)
        return Section(VectorField(chart, x), OneForm(chart, a))


def _kind_names(kinds):
    kinds = kinds if isinstance(kinds, tuple) else (kinds,)
    names = {str: "a string", int: "an integer", list: "a list", tuple: "a tuple", Constraint: "a constraint"}
    return " or ".join(names.get(k, k.__name__) for k in kinds)


def _validated(invariant, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except SceneParseError:
        raise
    except (DiracRedError, ValueError) as exc:
        raise ValidationError(f"{invariant}: {exc}", invariant=type(exc).__name__) from exc


def _flag(value, b, section, index, key):
    if value not in ("true", "false"):
        b.fail(section, index, key, 'expected "true" or "false"')
    return value == "true"


def _opposite(op):
    return {"<": ">", "<=": ">=", "=": "=", "!=": "!=", ">": ">", ">=": ">="}[op]


def build_scene(doc: Document) -> Scene:
    b = _Builder(doc)
    meta = doc.first("scene")
    name = meta.get("name", "scene")
    description = meta.get("description", "")

    chart = Chart(b.get("chart", 0, "name", str), b.get("chart", 0, "coords", list))
    n = chart.dim

    kind = b.get("action", 0, "kind", str)
    raw_gens = b.get("action", 0, "generators", list, required=False, default=[])
    gens = [b.exprs(g, chart, "action", 0, "generators", n) for g in raw_gens]
    action = _validated("action", GroupAction, chart, kind, gens)

    target = Chart(b.get("invariants", 0, "target", str, required=False, default="Mbar"),
                   b.get("invariants", 0, "names", list))
    basis_fns = b.exprs(b.get("invariants", 0, "basis", list), chart, "invariants", 0, "basis", target.dim)
    basis = _validated("invariant basis", InvariantBasis, action, basis_fns, list(target.coords))
    quotient = QuotientMap(basis, target)

    samples = tuple(
        b.point(p, n, "samples", 0, "points")
        for p in b.get("samples", 0, "points", list, required=False, default=[])
    )

    dgens = []
    for i, rec in enumerate(doc.records("dirac")):
        x = b.exprs(b.get("dirac", i, "X", list), chart, "dirac", i, "X", n)
        a = b.exprs(b.get("dirac", i, "alpha", list), chart, "dirac", i, "alpha", n)
        dgens.append(Section(VectorField(chart, x), OneForm(chart, a)))
    if not dgens:
        raise ValidationError("[dirac] lists no generators", invariant="RankDeficient")
    dirac = _validated("dirac structure", new_dirac, dgens, samples, chart)

    fields = []
    for i, rec in enumerate(doc.records("fields")):
        fname = b.get("fields", i, "name", str, required=False, default=f"X{i + 1}")
        role = b.get("fields", i, "role", str, required=False, default="invariant")
        if role not in ("invariant", "vertical"):
            b.fail("fields", i, "role", f"unknown role {role!r}")
        x = VectorField(chart, b.exprs(b.get("fields", i, "X", list), chart, "fields", i, "X", n))
        push = b.get("fields", i, "pushforward", list, required=False)
        pf = None if push is None else VectorField(target, b.exprs(push, target, "fields", i, "pushforward", target.dim))
        fields.append(FieldDecl(fname, role, x, pf))

    descending = []
    for i, rec in enumerate(doc.records("descending")):
        dname = b.get("descending", i, "name", str, required=False, default=f"s{i + 1}")
        x = b.exprs(b.get("descending", i, "X", list), chart, "descending", i, "X", n)
        a = b.exprs(b.get("descending", i, "alpha", list), chart, "descending", i, "alpha", n)
        pres = []
        for pair in b.get("descending", i, "presentation", list, required=False, default=[]):
            if not (isinstance(pair, tuple) and len(pair) == 2):
                b.fail("descending", i, "presentation", "expected (g, f) pairs")
            pres.append(tuple(b.expr(v, chart, "descending", i, "presentation") for v in pair))
        descending.append(Descending(Section(VectorField(chart, x), OneForm(chart, a)), tuple(pres), dname))

    strata = [_build_stratum(b, i, chart, target) for i in range(len(doc.records("strata")))]
    names = [s.name for s in strata]
    if len(set(names)) != len(names):
        raise ValidationError(f"duplicate stratum names {names}", invariant="chart consistency")

    brackets = []
    for i, rec in enumerate(doc.records("bracket")):
        sname = b.get("bracket", i, "stratum", str)
        if sname not in names:
            b.fail("bracket", i, "stratum", f"unknown stratum {sname!r}")
        st = strata[names.index(sname)]
        pchart = st.chart.params
        pair = tuple(b.get("bracket", i, "pair", list))
        if len(pair) != 2 or not all(isinstance(k, int) and 1 <= k <= len(st.expected) for k in pair):
            b.fail("bracket", i, "pair", f"expected two indices into the {len(st.expected)} expected generators")
        eq = b.get("bracket", i, "equals", list, required=False)
        equals = None if eq is None else tuple(b.exprs(eq, pchart, "bracket", i, "equals", len(st.expected)))
        against = tuple(b.get("bracket", i, "against", list, required=False, default=[]))
        for ref in against:
            if not (ref == "aux" and st.auxiliary is not None) and not (isinstance(ref, int) and 1 <= ref <= len(st.expected)):
                b.fail("bracket", i, "against", f"bad generator reference {ref!r}")
        wt = b.get("bracket", i, "witness", list, required=False)
        witness = None if wt is None else tuple(b.exprs(wt, pchart, "bracket", i, "witness", len(against)))
        if equals is None and witness is None:
            b.fail("bracket", i, "pair", "a bracket record needs 'equals' or 'against' with 'witness'")
        brackets.append(BracketDecl(sname, pair, equals, against, witness))

    relations = []
    for i, rec in enumerate(doc.records("relation")):
        rname = b.get("relation", i, "name", str, required=False, default=f"relation {i + 1}")
        sides = []
        for key in ("lhs", "rhs"):
            side = []
            for pair in b.get("relation", i, key, list):
                if not (isinstance(pair, tuple) and len(pair) == 2):
                    b.fail("relation", i, key, "expected (g, f) pairs")
                side.append(tuple(b.expr(v, chart, "relation", i, key) for v in pair))
            sides.append(tuple(side))
        pts = tuple(b.point(p, n, "relation", i, "points") for p in b.get("relation", i, "points", list))
        val = b.get("relation", i, "value", list, required=False)
        value = None if val is None else b.point(val, n, "relation", i, "value")
        relations.append(RelationDecl(rname, sides[0], sides[1], pts, value))

    hams = []
    for i, rec in enumerate(doc.records("hamiltonian")):
        f = b.expr(b.get("hamiltonian", i, "f", str), chart, "hamiltonian", i, "f")
        adm = _flag(b.get("hamiltonian", i, "admissible", str, required=False, default="true"), b, "hamiltonian", i, "admissible")
        xs = b.get("hamiltonian", i, "X", list, required=False)
        xf = None if xs is None else VectorField(chart, b.exprs(xs, chart, "hamiltonian", i, "X", n))
        gauge = tuple(
            VectorField(chart, b.exprs(g, chart, "hamiltonian", i, "gauge", n))
            for g in b.get("hamiltonian", i, "gauge", list, required=False, default=[])
        )
        sname = b.get("hamiltonian", i, "stratum", str, required=False)
        reduced = None
        if sname is not None:
            if sname not in names:
                b.fail("hamiltonian", i, "stratum", f"unknown stratum {sname!r}")
            red = b.get("hamiltonian", i, "reduced", tuple, required=False)
            if red is not None:
                reduced = b.section_value(red, strata[names.index(sname)].chart.params, "hamiltonian", i, "reduced")
        hams.append(HamiltonianDecl(f, adm, xf, gauge, sname, reduced))

    expect = dict(doc.first("expect"))
    return Scene(
        name, description, chart, action, basis, quotient, dirac,
        tuple(descending), tuple(fields), tuple(strata), samples,
        tuple(brackets), tuple(relations), tuple(hams), expect, doc,
    )


def _build_stratum(b: _Builder, i: int, chart: Chart, target: Chart) -> StratumDecl:
    sec = "strata"
    name = b.get(sec, i, "name", str)
    params = b.get(sec, i, "params", list)
    emb_text = b.get(sec, i, "embedding", list)
    if len(emb_text) != target.dim:
        b.fail(sec, i, "embedding", f"expected {target.dim} entries, one per target coordinate")
    # an identity embedding reuses the target chart itself
    if list(params) == list(target.coords) and list(emb_text) == list(target.coords):
        pchart = target
    else:
        pchart = Chart(name, params)
    emb = b.exprs(emb_text, pchart, sec, i, "embedding")
    constraints = []
    for c in b.get(sec, i, "constraints", list, required=False, default=[]):
        if not isinstance(c, Constraint) or c.rhs != 0:
            b.fail(sec, i, "constraints", 'constraints have the form "expr" op 0')
        g = b.expr(c.expr, pchart, sec, i, "constraints")
        if c.op in ("<", "<="):
            g = -g
        constraints.append((g, _opposite(c.op)))
    locus = b.exprs(b.get(sec, i, "locus", list, required=False, default=[]), target, sec, i, "locus")
    upstairs = [b.point(p, chart.dim, sec, i, "upstairs") for p in b.get(sec, i, "upstairs", list, required=False, default=[])]
    st = _validated(
        f"stratum {name}", StratumChart, name, pchart, target,
        dict(zip(target.coords, emb)), constraints, locus, upstairs,
    )
    expected = tuple(b.section_value(e, pchart, sec, i, "expected") for e in b.get(sec, i, "expected", list, required=False, default=[]))
    aux_v = b.get(sec, i, "auxiliary", tuple, required=False)
    aux = None if aux_v is None else b.section_value(aux_v, pchart, sec, i, "auxiliary")
    wit = []
    for entry in b.get(sec, i, "auxiliary_witness", list, required=False, default=[]):
        if not (isinstance(entry, tuple) and len(entry) == 2 and isinstance(entry[0], int)
                and 1 <= entry[0] <= len(expected)):
            b.fail(sec, i, "auxiliary_witness", "expected (index, coefficient) pairs")
        wit.append((entry[0], b.expr(entry[1], pchart, sec, i, "auxiliary_witness")))
    uloc = tuple(b.exprs(b.get(sec, i, "upstairs_locus", list, required=False, default=[]), chart, sec, i, "upstairs_locus"))
    return StratumDecl(st, expected, aux, tuple(wit), uloc)


def loads(text: str) -> Scene:
    """Parse and build a scene from file text (construction certificates run)."""
    return build_scene(parse_document(text))
