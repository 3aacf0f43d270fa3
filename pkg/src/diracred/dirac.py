"""Dirac structures, integrability, symmetry and descending sections."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg
from .actions import GroupAction, is_descending, is_invariant
from .calculus import OneForm, Section, VectorField, courant_bracket, lie_bracket, lie_derivative_oneform, pairing
from .distributions import Distribution, eval_at, membership_generic
from .errors import NotIsotropic, RankDeficient
from .exprcore import Chart, same_chart


class DiracStructure:
    """n sections of TM + T*M, pairwise isotropic and of generic rank n."""

    def __init__(self, chart: Chart, generators, certificates=(), warnings=(), dropped=()):
        self.chart = chart
        self.generators = tuple(generators)
        self.certificates = tuple(certificates)
        self.warnings = tuple(warnings)
        # indices of over-complete input generators removed at construction
        self.dropped = tuple(dropped)

    @property
    def distribution(self) -> Distribution:
        return Distribution.pontryagin(self.chart, self.generators)

    def __len__(self):
        return len(self.generators)

    def __repr__(self):
        return f"DiracStructure({self.chart.name}: {', '.join(str(g) for g in self.generators)})"


def new_dirac(generators, samples=(), chart: Chart | None = None) -> DiracStructure:
    """Validate a presentation of a Dirac structure.

    An over-complete presentation is cut down to a maximal independent subset
    of its generators (first ones kept).  Raises NotIsotropic or
    RankDeficient.
    """
    generators = list(generators)
    if chart is None:
        if not generators:
            raise ValueError("cannot infer the chart of an empty generator list")
        chart = generators[0].chart
    for g in generators:
        same_chart(chart, g.chart)
    n = chart.dim
    vectors = [g.vector() for g in generators]
    keep = linalg.independent_rows_generic(vectors, chart, 2 * n)
    if len(keep) < n:
        raise RankDeficient(f"generators have generic rank {len(keep)}, expected {n}")
    dropped = [i for i in range(len(generators)) if i not in keep]
    # isotropy is checked on the full presentation: every listed section must lie in D
    for i in range(len(generators)):
        for j in range(i, len(generators)):
            r = pairing(generators[i], generators[j])
            if not r.is_zero():
                raise NotIsotropic(
                    f"generators #{i} {generators[i]} and #{j} {generators[j]} pair to {r}",
                    pair=(i, j),
                    residual=r,
                )
    gens = [generators[i] for i in keep]
    certificates = ["isotropic", f"generic rank {n}"]
    d = Distribution.pontryagin(chart, gens)
    for p in samples:
        r = eval_at(d, p).rank
        if r != n:
            raise RankDeficient(f"rank {r} at sample {_fmt(p)}, expected {n}", point=tuple(p))
    if samples:
        certificates.append(f"rank {n} at {len(samples)} sample(s)")
    warnings = []
    locus = linalg.minors_gcd([g.vector() for g in gens], chart, n)
    if not locus.is_constant:
        warnings.append(f"generator frame degenerates on {locus} = 0")
    return DiracStructure(chart, gens, certificates, warnings, dropped)


def _fmt(p):
    return "(" + ", ".join(str(Fraction(v)) for v in p) + ")"


# -- integrability and symmetry ---------------------------------------------------


@dataclass
class BracketCheck:
    """Membership results keyed by generator index pairs."""

    results: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(bool(w) for w in self.results.values())

    @property
    def failures(self):
        return {k: v for k, v in self.results.items() if not v}

    def __bool__(self):
        return self.ok


def check_integrable(d: DiracStructure) -> BracketCheck:
    """Courant brackets of all generator pairs must lie in D.

    On isotropic pairs [s, s] = 0 and [t, s] = -[s, t], so i < j suffices.
    """
    dist = d.distribution
    out = BracketCheck()
    gens = d.generators
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            br = courant_bracket(gens[i], gens[j])
            out.results[(i, j)] = membership_generic(br, dist)
    return out


def check_dirac_action(d: DiracStructure, a: GroupAction) -> BracketCheck:
    """(L_xi X, L_xi alpha) must lie in D for every generator and every xi."""
    dist = d.distribution
    out = BracketCheck()
    for i, s in enumerate(d.generators):
        for k, xi in enumerate(a.liegen):
            moved = Section(lie_bracket(xi, s.x), lie_derivative_oneform(xi, s.alpha))
            out.results[(i, k)] = membership_generic(moved, dist)
    return out


# -- descending sections ---------------------------------------------------------------


@dataclass
class Descending:
    """A candidate descending section with an optional one-form presentation.

    ``presentation`` is a list of (g, f) pairs with alpha = sum g df.
    """

    section: Section
    presentation: tuple = ()
    name: str = ""

    def __post_init__(self):
        from .calculus import _coerce

        chart = self.section.chart
        self.presentation = tuple((_coerce(chart, g), _coerce(chart, f)) for g, f in self.presentation)


@dataclass
class CandidateReport:
    name: str
    member: object
    annihilates: bool
    form_invariant: bool
    descends: object

    @property
    def ok(self) -> bool:
        return bool(self.member) and self.annihilates and self.form_invariant and bool(self.descends)

    def failed(self):
        out = []
        if not self.member:
            out.append("membership")
        if not self.annihilates:
            out.append("annihilates vertical")
        if not self.form_invariant:
            out.append("invariant one-form")
        if not self.descends:
            out.append("descending field")
        return out


@dataclass
class DescendingSet:
    items: list
    reports: list

    @property
    def sections(self):
        return [it.section for it in self.items]

    def __len__(self):
        return len(self.items)


def verify_descending(candidates, d: DiracStructure, a: GroupAction, samples=()) -> DescendingSet:
    dist = d.distribution
    items, reports = [], []
    for k, cand in enumerate(candidates):
        if isinstance(cand, Section):
            cand = Descending(cand, (), f"s{k + 1}")
        s = cand.section
        member = membership_generic(s, dist)
        annihilates = all(s.alpha(xi).is_zero() for xi in a.liegen)
        form_invariant = bool(is_invariant(s.alpha, a))
        descends = is_descending(s.x, a, samples)
        rep = CandidateReport(cand.name or f"s{k + 1}", member, annihilates, form_invariant, descends)
        reports.append(rep)
        if rep.ok:
            items.append(cand)
    return DescendingSet(items, reports)


# -- spanning hypothesis ------------------------------------------------------------------


@dataclass(frozen=True)
class ProbeSample:
    point: tuple
    descending_rank: int
    intersection_rank: int

    @property
    def equal(self) -> bool:
        return self.descending_rank == self.intersection_rank


@dataclass
class ProbeReport:
    samples: list

    @property
    def ok(self) -> bool:
        return all(s.equal for s in self.samples)

    def __bool__(self):
        return self.ok


def spanning_hypothesis_probe(d: DiracStructure, t: Distribution, vog: Distribution, ds, samples) -> ProbeReport:
    """Compare the span of the descending sections with D meet (T + V°_G) pointwise.

    ``t`` is the tangent distribution T and ``vog`` the invariant
    codistribution V°_G spanned by the differentials of the invariants.
    """
    same_chart(d.chart, t.chart, vog.chart)
    if t.kind != "tangent" or vog.kind != "cotangent":
        raise ValueError("expected a tangent distribution and a cotangent codistribution")
    sections = ds.sections if isinstance(ds, DescendingSet) else list(ds)
    dsec = Distribution.pontryagin(d.chart, sections)
    dd = d.distribution
    both = t + vog
    out = []
    for p in samples:
        p = tuple(Fraction(v) for v in p)
        meet = eval_at(dd, p).intersect(eval_at(both, p))
        out.append(ProbeSample(p, eval_at(dsec, p).rank, meet.rank))
    return ProbeReport(out)


# -- gauge distributions -----------------------------------------------------------------


def _kernel_combinations(d: DiracStructure, part: str):
    chart = d.chart
    gens = d.generators
    if part == "alpha":
        rows = [[g.alpha.components[i] for g in gens] for i in range(chart.dim)]
    else:
        rows = [[g.x.components[i] for g in gens] for i in range(chart.dim)]
    return linalg.kernel_generic(rows, chart, len(gens))


def _combine_fields(coeffs, fields, chart, cls):
    total = cls.zero(chart)
    for c, f in zip(coeffs, fields):
        if not c.is_zero():
            total = total + f * c
    return total


def gauge_distribution(d: DiracStructure) -> Distribution:
    """G0: fields X with (X, 0) a section of D (computed generically)."""
    fields = [g.x for g in d.generators]
    out = [_combine_fields(c, fields, d.chart, VectorField) for c in _kernel_combinations(d, "alpha")]
    return Distribution.tangent(d.chart, [x for x in out if not x.is_zero()], generic=True)


def g1_distribution(d: DiracStructure) -> Distribution:
    """G1: projection of D to TM."""
    return Distribution.tangent(d.chart, [g.x for g in d.generators if not g.x.is_zero()])


def p0_codistribution(d: DiracStructure) -> Distribution:
    """P0: forms alpha with (0, alpha) a section of D."""
    forms = [g.alpha for g in d.generators]
    out = [_combine_fields(c, forms, d.chart, OneForm) for c in _kernel_combinations(d, "x")]
    return Distribution.cotangent(d.chart, [a for a in out if not a.is_zero()], generic=True)


def p1_codistribution(d: DiracStructure) -> Distribution:
    """P1: projection of D to T*M."""
    return Distribution.cotangent(d.chart, [g.alpha for g in d.generators if not g.alpha.is_zero()])


__all__ = [
    "BracketCheck",
    "CandidateReport",
    "Descending",
    "DescendingSet",
    "DiracStructure",
    "ProbeReport",
    "ProbeSample",
    "check_dirac_action",
    "check_integrable",
    "g1_distribution",
    "gauge_distribution",
    "new_dirac",
    "p0_codistribution",
    "p1_codistribution",
    "spanning_hypothesis_probe",
    "verify_descending",
]
