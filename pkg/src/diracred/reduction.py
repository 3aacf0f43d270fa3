"""Pushing descending data to the orbit space and restricting it to strata."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement

from . import linalg
from .actions import InvariantBasis, is_descending, is_invariant
from .calculus import OneForm, Section, VectorField, courant_bracket, exterior_derivative_fn, pairing
from .dirac import Descending
from .distributions import Distribution, eval_at, membership_generic
from .errors import (
    NotDescending,
    NotExpressibleAtBound,
    NotInvariant,
    NotTangentToStratum,
    PresentationMismatch,
    RankDeficientOnStratum,
)
from .exprcore import Chart, RatFn, same_chart, substitute, to_fraction

# -- re-expression in invariants ----------------------------------------------------------


@dataclass(frozen=True)
class NotExpressible:
    """No polynomial in the invariants up to ``bound`` reproduces the input."""

    bound: int

    def __bool__(self):
        return False


def _monomials(k, bound):
    """Exponent vectors in k symbols with total degree <= bound, ascending degree."""
    out = []
    for deg in range(bound + 1):
        block = []
        for combo in combinations_with_replacement(range(k), deg):
            e = [0] * k
            for i in combo:
                e[i] += 1
            block.append(tuple(e))
        out.extend(sorted(block, reverse=True))
    return out


def _homogeneous_degree(p):
    degs = {sum(m) for m in p.itermonoms()}
    return degs.pop() if len(degs) == 1 else None


def reexpress(p: RatFn, basis: InvariantBasis, bound: int, target: Chart):
    """Polynomial q on ``target`` with q(f_1, ..., f_k) = p, or NotExpressible."""
    if bound < 0:
        raise ValueError("degree bound must be non-negative")
    same_chart(p.chart, basis.chart)
    if target.dim != len(basis):
        raise ValueError(f"target chart has {target.dim} coordinates for {len(basis)} invariants")
    if not p.is_poly:
        return NotExpressible(bound)
    if p.is_zero():
        return target.zero()
    fns = [f.num for f in basis.fns]
    degs = [_homogeneous_degree(f) for f in fns]
    monos = _monomials(len(fns), bound)
    if all(d is not None and d > 0 for d in degs):
        # products of homogeneous invariants are homogeneous: keep matching degrees only
        wanted = {sum(m) for m in p.num.itermonoms()}
        monos = [m for m in monos if sum(e * d for e, d in zip(m, degs)) in wanted]
    ring = basis.chart.ring
    cache = {}

    def product(m):
        if m not in cache:
            acc = ring.one
            for f, e in zip(fns, m):
                if e:
                    acc = acc * f**e
            cache[m] = acc
        return cache[m]

    cols = [product(m) for m in monos]
    keys = sorted({mono for c in cols for mono in c.itermonoms()} | set(p.num.itermonoms()))
    index = {mono: i for i, mono in enumerate(keys)}
    columns = []
    for c in cols:
        v = [Fraction(0)] * len(keys)
        for mono, coef in c.terms():
            v[index[mono]] = to_fraction(coef)
        columns.append(v)
    rhs = [Fraction(0)] * len(keys)
    for mono, coef in p.num.terms():
        rhs[index[mono]] = to_fraction(coef)
    if not columns:
        return NotExpressible(bound)
    sol = linalg.solve_q(columns, rhs)
    if sol is None:
        return NotExpressible(bound)
    tring = target.ring
    q = tring.zero
    for m, c in zip(monos, sol):
        if c:
            term = tring(c)
            for g, e in zip(tring.gens, m):
                if e:
                    term = term * g**e
            q += term
    return RatFn(target, q)


# -- the orbit map --------------------------------------------------------------------------


class QuotientMap:
    """pi: source -> target, one target coordinate per invariant."""

    def __init__(self, basis: InvariantBasis, target: Chart):
        if target.dim != len(basis):
            raise ValueError(f"target chart {target.name} needs {len(basis)} coordinates")
        self.basis = basis
        self.source = basis.chart
        self.target = target
        self.bindings = dict(zip(target.coords, basis.fns))

    def pull(self, fbar: RatFn) -> RatFn:
        """fbar o pi on the source chart."""
        return substitute(fbar, self.bindings)

    def __repr__(self):
        pairs = ", ".join(f"{c}={f}" for c, f in self.bindings.items())
        return f"QuotientMap({self.source.name} -> {self.target.name}: {pairs})"


def _reexpress_or_raise(p, q: QuotientMap, bound, what):
    r = reexpress(p, q.basis, bound, q.target)
    if isinstance(r, NotExpressible):
        raise NotExpressibleAtBound(
            f"{what} = {p} is not a polynomial in the invariants of degree <= {bound}; "
            "try a larger --bound"
        )
    return r


def pushforward_function(f: RatFn, q: QuotientMap, bound: int = 4) -> RatFn:
    cert = is_invariant(f, q.basis.action)
    if not cert:
        raise NotInvariant(f"{f} is not invariant: residual {cert.residuals[0][1]}")
    fbar = _reexpress_or_raise(f, q, bound, "function")
    if q.pull(fbar) != f:
        raise NotExpressibleAtBound(f"re-expression of {f} failed the substitution check")
    return fbar


def pushforward_vf(x: VectorField, q: QuotientMap, bound: int = 4, samples=()) -> VectorField:
    """Xbar with Xbar(fbar_i) o pi = X(f_i) for every target coordinate."""
    same_chart(x.chart, q.source)
    cert = is_descending(x, q.basis.action, samples)
    if not cert:
        raise NotDescending(f"{x} does not descend: bracket with generator #{cert.residuals[0][0]} leaves V")
    comps = []
    for name, f in zip(q.target.coords, q.basis.fns):
        xf = x(f)
        comps.append(_reexpress_or_raise(xf, q, bound, f"X({name})"))
    xbar = VectorField(q.target, comps)
    for comp, f in zip(comps, q.basis.fns):
        if q.pull(comp) != x(f):
            raise NotExpressibleAtBound("pushforward failed its defining identity")
    return xbar


def assemble_presentation(presentation, chart) -> OneForm:
    total = OneForm.zero(chart)
    for g, f in presentation:
        total = total + exterior_derivative_fn(f) * g
    return total


def pushforward_oneform(alpha: OneForm, presentation, q: QuotientMap, bound: int = 4) -> OneForm:
    """sum gbar_j d fbar_j for a presentation alpha = sum g_j d f_j."""
    same_chart(alpha.chart, q.source)
    assembled = assemble_presentation(presentation, q.source)
    if assembled != alpha:
        raise PresentationMismatch(f"presentation assembles to {assembled}, not {alpha}")
    total = OneForm.zero(q.target)
    for g, f in presentation:
        gbar = pushforward_function(g, q, bound)
        fbar = pushforward_function(f, q, bound)
        total = total + exterior_derivative_fn(fbar) * gbar
    return total


def pushforward_section(item: Descending, q: QuotientMap, bound: int = 4, samples=()) -> Section:
    s = item.section
    xbar = pushforward_vf(s.x, q, bound, samples)
    if s.alpha.is_zero():
        abar = OneForm.zero(q.target)
    elif item.presentation:
        abar = pushforward_oneform(s.alpha, item.presentation, q, bound)
    else:
        raise PresentationMismatch(f"section {item.name or s} has a nonzero one-form but no presentation")
    return Section(xbar, abar)


# -- strata --------------------------------------------------------------------------------------

_OPS = {
    ">": lambda v: v > 0,
    ">=": lambda v: v >= 0,
    "=": lambda v: v == 0,
    "!=": lambda v: v != 0,
}


@dataclass
class StratumChart:
    """A stratum of the orbit space parametrized by ``params``.

    ``embedding`` maps each target coordinate to a function of the params;
    ``constraints`` are (function on params, op) pairs delimiting the chart
    domain; ``locus`` lists target functions vanishing on the stratum.
    """

    name: str
    params: Chart
    target: Chart
    embedding: dict
    constraints: list = field(default_factory=list)
    locus: list = field(default_factory=list)
    upstairs: list = field(default_factory=list)

    def __post_init__(self):
        missing = [c for c in self.target.coords if c not in self.embedding]
        if missing:
            raise ValueError(f"stratum {self.name} embedding misses {missing}")
        for c, e in self.embedding.items():
            same_chart(e.chart, self.params)
        for h in self.locus:
            same_chart(h.chart, self.target)
            r = substitute(h, self.embedding)
            if not r.is_zero():
                raise ValueError(f"stratum {self.name}: locus equation {h} is {r} on the embedding")
        for g, op in self.constraints:
            if op not in _OPS:
                raise ValueError(f"unknown constraint relation {op!r}")

    def satisfies(self, p) -> bool:
        for g, op in self.constraints:
            try:
                v = g.evaluate(p)
            except ZeroDivisionError:
                return False
            if not _OPS[op](v):
                return False
        return True

    def embed(self, f: RatFn) -> RatFn:
        """Pull a target function back to the params chart."""
        return substitute(f, self.embedding)

    def jacobian(self):
        return [[self.embedding[c].diff(p) for p in self.params.coords] for c in self.target.coords]

    def is_identity(self) -> bool:
        return self.params == self.target and all(
            self.embedding[c] == RatFn.coordinate(self.params, c) for c in self.target.coords
        )

    def denominators(self):
        return [RatFn(self.params, e.den) for e in self.embedding.values() if not e.is_poly]


def restrict_to_stratum(s: Section, st: StratumChart) -> Section:
    """Section on params whose pushforward through the embedding matches s."""
    same_chart(s.chart, st.target)
    if st.is_identity():
        return Section(VectorField(st.params, s.x.components), OneForm(st.params, s.alpha.components))
    for h in st.locus:
        r = st.embed(s.x(h))
        if not r.is_zero():
            raise NotTangentToStratum(f"{s.x} is not tangent to {st.name}: X({h}) = {r} on the stratum", residual=r)
    jac = st.jacobian()
    xe = [st.embed(c) for c in s.x.components]
    cols = [[jac[i][j] for i in range(len(jac))] for j in range(st.params.dim)]
    sol, bad = linalg.solve_generic(cols, xe, st.params)
    if sol is None:
        raise NotTangentToStratum(f"{s.x} is not tangent to {st.name}: residual {bad[1]}", residual=bad[1])
    ae = [st.embed(c) for c in s.alpha.components]
    alpha = []
    for j in range(st.params.dim):
        total = st.params.zero()
        for i in range(len(jac)):
            if not jac[i][j].is_zero() and not ae[i].is_zero():
                total = total + jac[i][j] * ae[i]
        alpha.append(total)
    return Section(VectorField(st.params, sol), OneForm(st.params, alpha))


# -- reduced Dirac structures ----------------------------------------------------------------------


def normalize_section(s: Section) -> Section:
    """Scale by a rational constant so the first nonzero coefficient has leading coefficient 1."""
    for c in s.vector():
        if not c.is_zero():
            lc = c.num.LC
            if lc == 1:
                return s
            return s * Fraction(int(lc.denominator), int(lc.numerator))
    return s


def module_contains(gens, sections, chart) -> list:
    """Membership results of each section in span(gens)."""
    d = Distribution.pontryagin(chart, gens)
    return [membership_generic(s, d) for s in sections]


def module_equal(a, b, chart) -> bool:
    return all(module_contains(b, a, chart)) and all(module_contains(a, b, chart))


@dataclass
class ReducedDirac:
    stratum: StratumChart
    generators: list
    provenance: list
    rank: int
    samples: list = field(default_factory=list)
    integrable: object = None

    @property
    def chart(self) -> Chart:
        return self.stratum.params

    @property
    def distribution(self) -> Distribution:
        return Distribution.pontryagin(self.chart, self.generators)

    def contains(self, s: Section):
        return membership_generic(s, self.distribution)

    def span_str(self) -> str:
        return "span{" + ", ".join(str(g) for g in self.generators) + "}"


def param_samples(st: StratumChart, count: int, seed: int = 0):
    from .sampling import random_points

    return random_points(st.params.dim, count, seed, avoid=st.denominators(), accept=st.satisfies)


def reduced_dirac(ds, q: QuotientMap, st: StratumChart, bound: int = 4, samples=None,
                  check_brackets: bool = False, sample_count: int = 5, seed: int = 0) -> ReducedDirac:
    """Restrict pushforwards of the descending sections to a stratum and validate.

    Zero sections are dropped and the rest normalized; the list is not pruned
    to a frame.  ``check_brackets`` adds the closedness check (meant for
    integrable upstairs structures).
    """
    items = ds.items if hasattr(ds, "items") else list(ds)
    if not items:
        raise ValueError("reduction needs at least one descending section")
    gens, prov = [], []
    for k, item in enumerate(items):
        if isinstance(item, Section):
            item = Descending(item, (), f"s{k + 1}")
        down = restrict_to_stratum(pushforward_section(item, q, bound), st)
        if down.is_zero():
            continue
        gens.append(normalize_section(down))
        prov.append(item.name or f"s{k + 1}")
    chart = st.params
    n = chart.dim
    for i in range(len(gens)):
        for j in range(i, len(gens)):
            r = pairing(gens[i], gens[j])
            if not r.is_zero():
                raise RankDeficientOnStratum(
                    f"reduced generators {prov[i]} and {prov[j]} pair to {r} on {st.name}"
                )
    dist = Distribution.pontryagin(chart, gens)
    rank = dist.generic_rank()
    if rank != n:
        raise RankDeficientOnStratum(f"reduced structure on {st.name} has generic rank {rank}, expected {n}")
    if samples is None:
        samples = param_samples(st, sample_count, seed)
    for p in samples:
        r = eval_at(dist, p).rank
        if r != n:
            raise RankDeficientOnStratum(f"rank {r} at {p} on {st.name}, expected {n}")
    out = ReducedDirac(st, gens, prov, rank, list(samples))
    if check_brackets:
        results = {}
        for i in range(len(gens)):
            for j in range(i + 1, len(gens)):
                results[(i, j)] = membership_generic(courant_bracket(gens[i], gens[j]), dist)
        out.integrable = results
    return out
