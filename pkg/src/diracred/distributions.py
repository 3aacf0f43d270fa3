"""Finitely generated generalized distributions in TM, T*M and TM + T*M.

Every distribution stores its generators as Pontryagin sections, so all
pointwise computations happen in the 2n-dimensional fiber.  Tangent kinds
carry zero one-forms and cotangent kinds zero fields.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg
from .calculus import OneForm, Section, VectorField
from .errors import DenominatorVanishes, InternalInconsistency, NotASubbundle
from .exprcore import Chart, RatFn, same_chart

KINDS = ("tangent", "cotangent", "pontryagin")


class Distribution:
    """span of ``generators`` over the functions on ``chart``."""

    __slots__ = ("chart", "kind", "generators", "generic")

    def __init__(self, chart: Chart, kind: str, generators=(), generic: bool = False):
        if kind not in KINDS:
            raise ValueError(f"unknown distribution kind {kind!r}")
        gens = []
        for g in generators:
            same_chart(chart, g.chart)
            if kind == "tangent" and not g.alpha.is_zero():
                raise ValueError(f"tangent generator {g} has a nonzero one-form part")
            if kind == "cotangent" and not g.x.is_zero():
                raise ValueError(f"cotangent generator {g} has a nonzero vector-field part")
            gens.append(g)
        self.chart = chart
        self.kind = kind
        self.generators = tuple(gens)
        # True when computed over the fraction field: valid off a proper subvariety
        self.generic = generic

    @classmethod
    def tangent(cls, chart, fields, **kw):
        return cls(chart, "tangent", [Section.tangent(x) for x in fields], **kw)

    @classmethod
    def cotangent(cls, chart, forms, **kw):
        return cls(chart, "cotangent", [Section.cotangent(a) for a in forms], **kw)

    @classmethod
    def pontryagin(cls, chart, sections, **kw):
        return cls(chart, "pontryagin", sections, **kw)

    @property
    def fiber_dim(self) -> int:
        return 2 * self.chart.dim

    @property
    def fields(self):
        return [g.x for g in self.generators]

    @property
    def forms(self):
        return [g.alpha for g in self.generators]

    def __add__(self, other: Distribution) -> Distribution:
        same_chart(self.chart, other.chart)
        kind = self.kind if self.kind == other.kind else "pontryagin"
        return Distribution(self.chart, kind, self.generators + other.generators)

    def __len__(self):
        return len(self.generators)

    def generic_rank(self) -> int:
        return linalg.rank_generic([g.vector() for g in self.generators], self.chart, self.fiber_dim)

    def denominator_locus(self) -> RatFn:
        """Product of the distinct generator denominators (1 if polynomial)."""
        ring = self.chart.ring
        den = ring.one
        for g in self.generators:
            for c in g.vector():
                if c.den != 1:
                    den = den.lcm(c.den)
        return RatFn(self.chart, den)

    def __repr__(self):
        gens = ", ".join(str(g) for g in self.generators)
        tag = " generic" if self.generic else ""
        return f"Distribution[{self.kind}{tag}]{{{gens}}}"


@dataclass(frozen=True)
class PointSubspace:
    """A subspace of the fiber at ``point`` with a row-reduced basis."""

    point: tuple
    basis: tuple
    dim: int

    @classmethod
    def spanned(cls, point, vectors, dim) -> PointSubspace:
        rows, _ = linalg.rref_q(vectors, dim) if vectors else ([], ())
        return cls(tuple(point), tuple(tuple(r) for r in rows), dim)

    @property
    def rank(self) -> int:
        return len(self.basis)

    def contains(self, vec) -> bool:
        return linalg.span_contains_q(list(self.basis), [list(vec)])

    def __le__(self, other: PointSubspace) -> bool:
        return all(other.contains(b) for b in self.basis)

    def same_span(self, other: PointSubspace) -> bool:
        return self.basis == other.basis  # reduced row echelon form is unique

    def intersect(self, other: PointSubspace) -> PointSubspace:
        # v = sum a_i b_i = sum c_j e_j; solve over the stacked basis
        m, k = self.rank, other.rank
        if not m or not k:
            return PointSubspace(self.point, (), self.dim)
        cols = [list(b) for b in self.basis] + [[-v for v in e] for e in other.basis]
        rows = [[cols[j][i] for j in range(m + k)] for i in range(self.dim)]
        vecs = []
        for sol in linalg.kernel_q(rows, m + k):
            vecs.append([sum((sol[i] * self.basis[i][t] for i in range(m)), Fraction(0)) for t in range(self.dim)])
        return PointSubspace.spanned(self.point, vecs, self.dim)

    def orthogonal(self) -> PointSubspace:
        """Pairing-orthogonal complement in the Pontryagin fiber."""
        n = self.dim // 2
        rows = [list(b[n:]) + list(b[:n]) for b in self.basis]
        return PointSubspace.spanned(self.point, linalg.kernel_q(rows, self.dim), self.dim)

    def __add__(self, other: PointSubspace) -> PointSubspace:
        return PointSubspace.spanned(self.point, list(self.basis) + list(other.basis), self.dim)


def _evaluate_generator(d: Distribution, i: int, p):
    try:
        return list(d.generators[i].evaluate(p))
    except ZeroDivisionError as exc:
        raise DenominatorVanishes(
            f"generator #{i} {d.generators[i]} has a vanishing denominator at {_fmt(p)}",
            generator=i,
            point=tuple(p),
        ) from exc


def _fmt(p):
    return "(" + ", ".join(str(Fraction(v)) for v in p) + ")"


def eval_at(d: Distribution, p) -> PointSubspace:
    """Row-reduced basis of span{sigma_i(p)}."""
    p = tuple(Fraction(v) for v in p)
    vecs = [_evaluate_generator(d, i, p) for i in range(len(d.generators))]
    return PointSubspace.spanned(p, vecs, d.fiber_dim)


def pointwise_orthogonal_at(d: Distribution, p) -> PointSubspace:
    """Kernel of the pairing against d(p); tangent kinds give TM + annihilator."""
    return eval_at(d, p).orthogonal()


def generic_orthogonal(d: Distribution) -> Distribution:
    """Orthogonal over the fraction field, with polynomial generators.

    Tangent input yields the cotangent annihilator and vice versa; Pontryagin
    input yields the Pontryagin orthogonal.  The result is flagged generic.
    """
    chart = d.chart
    n = chart.dim
    if d.kind == "tangent":
        rows = [list(x.components) for x in d.fields]
        ker = linalg.kernel_generic(rows, chart, n)
        return Distribution.cotangent(chart, [OneForm(chart, v) for v in ker], generic=True)
    if d.kind == "cotangent":
        rows = [list(a.components) for a in d.forms]
        ker = linalg.kernel_generic(rows, chart, n)
        return Distribution.tangent(chart, [VectorField(chart, v) for v in ker], generic=True)
    rows = [list(g.alpha.components) + list(g.x.components) for g in d.generators]
    ker = linalg.kernel_generic(rows, chart, 2 * n)
    return Distribution.pontryagin(chart, [Section.from_vector(chart, v) for v in ker], generic=True)


@dataclass(frozen=True)
class Witness:
    """Coefficients c_i with sum c_i sigma_i equal to the tested section."""

    coefficients: tuple

    def __bool__(self):
        return True

    def __str__(self):
        return "[" + ", ".join(str(c) for c in self.coefficients) + "]"


@dataclass(frozen=True)
class NotMember:
    """The reduced system has an equation 0 = residual with residual != 0."""

    residual: RatFn
    row: int

    def __bool__(self):
        return False

    def __str__(self):
        return f"not a member (reduced equation {self.row}: 0 = {self.residual})"


def membership_generic(s: Section, d: Distribution):
    """Solve sum c_i sigma_i = s over Q(x); free coefficients are zero."""
    same_chart(s.chart, d.chart)
    cols = [g.vector() for g in d.generators]
    coeffs, bad = linalg.solve_generic(cols, s.vector(), d.chart)
    if coeffs is None:
        return NotMember(residual=bad[1], row=bad[0])
    return Witness(tuple(coeffs))


def combine(coefficients, generators) -> Section:
    chart = generators[0].chart if generators else None
    total = Section.zero(chart)
    for c, g in zip(coefficients, generators):
        if not c.is_zero():
            total = total + g * c
    return total


@dataclass
class IntersectionReport:
    """Verdicts for the four equivalent conditions on d1-perp meet d2-perp."""

    conditions: dict
    ranks: list = field(default_factory=list)
    generic_rank: int = 0

    @property
    def holds(self) -> bool:
        return all(self.conditions.values())


def intersection_report(d1: Distribution, d2: Distribution, samples) -> IntersectionReport:
    chart = same_chart(d1.chart, d2.chart)
    samples = [tuple(Fraction(v) for v in p) for p in samples]
    if not samples:
        raise ValueError("intersection_report needs at least one sample point")
    for d, label in ((d1, "first"), (d2, "second")):
        ranks = {eval_at(d, p).rank for p in samples}
        if len(ranks) > 1:
            raise NotASubbundle(f"the {label} distribution has ranks {sorted(ranks)} across samples")

    both = Distribution.pontryagin(chart, d1.generators + d2.generators)
    smooth_perp = generic_orthogonal(both)
    smooth_perp_perp = generic_orthogonal(smooth_perp)
    g_rank = both.fiber_dim - both.generic_rank()

    c1 = c2 = c3 = True
    ranks = []
    for p in samples:
        meet = pointwise_orthogonal_at(d1, p).intersect(pointwise_orthogonal_at(d2, p))
        ranks.append(meet.rank)
        c1 &= meet.rank == g_rank
        c2 &= eval_at(smooth_perp, p).same_span(meet)
        c3 &= eval_at(smooth_perp_perp, p).same_span(eval_at(both, p))
    c4 = len(set(ranks)) == 1
    conditions = {
        "intersection_smooth": c1,
        "orthogonal_of_sum": c2,
        "double_orthogonal": c3,
        "constant_rank": c4,
    }
    if len(set(conditions.values())) > 1:
        raise InternalInconsistency(f"mixed verdicts on subbundle inputs: {conditions}")
    return IntersectionReport(conditions, ranks, g_rank)


__all__ = [
    "Distribution",
    "IntersectionReport",
    "NotMember",
    "PointSubspace",
    "Witness",
    "combine",
    "eval_at",
    "generic_orthogonal",
    "intersection_report",
    "membership_generic",
    "pointwise_orthogonal_at",
]
