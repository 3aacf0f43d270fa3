"""Linear actions of circles, tori and SO(3) on a chart.

A group element acts by x -> M(theta) x where M is a product of exponentials
exp(theta A) = I + sin(theta) A + (1 - cos(theta)) A^2, valid for generator
matrices with A^3 = -A (infinitesimal rotations).  SO(3) uses z-x-z Euler
angles, M = exp(alpha Lz) exp(beta Lx) exp(gamma Lz), with generators given
in the order (Lx, Ly, Lz).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .calculus import OneForm, Section, VectorField, exterior_derivative_fn, lie_bracket, lie_derivative_oneform
from .distributions import Distribution, eval_at, membership_generic
from .errors import GeneratorMismatch, InternalInconsistency, NotInvariant, UnsupportedAction
from .exprcore import Chart, RatFn, TrigFraction, TrigPoly, Weight, substitute, trig_integrate

GROUP_KINDS = ("circle", "torus", "so3", "trivial")

# -- small exact matrix helpers ---------------------------------------------------


def _matmul(a, b):
    n, k, m = len(a), len(b), len(b[0]) if b else 0
    return [[sum((a[i][t] * b[t][j] for t in range(k)), Fraction(0)) for j in range(m)] for i in range(n)]


def _identity(n):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def linear_matrix(x: VectorField):
    """Matrix A with X = A x, or UnsupportedAction if X is not linear."""
    chart = x.chart
    coords = chart.coords
    a = []
    for comp in x.components:
        row = []
        for c in coords:
            d = comp.diff(c)
            if not d.is_constant:
                raise UnsupportedAction(f"generator {x} is not a linear vector field")
            row.append(d.constant_value())
        rebuilt = sum((RatFn.coordinate(chart, c) * v for c, v in zip(coords, row) if v), chart.zero())
        if rebuilt != comp:
            raise UnsupportedAction(f"generator {x} is not a linear vector field")
        a.append(row)
    return a


def _trig_exp(a, angles, angle):
    """exp(theta A) as a TrigPoly matrix, requiring A^3 = -A."""
    n = len(a)
    a2 = _matmul(a, a)
    a3 = _matmul(a2, a)
    if any(a3[i][j] != -a[i][j] for i in range(n) for j in range(n)):
        raise UnsupportedAction("only generators with A^3 = -A (rotations) have exact trigonometric flows")
    s = TrigPoly.sin(angles, angle)
    one_minus_c = TrigPoly.constant(angles, 1) - TrigPoly.cos(angles, angle)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            row.append(TrigPoly.constant(angles, int(i == j)) + s.scale(a[i][j]) + one_minus_c.scale(a2[i][j]))
        out.append(row)
    return out


def _trig_matmul(a, b, angles):
    n = len(a)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = TrigPoly(angles)
            for t in range(n):
                if not a[i][t].is_zero() and not b[t][j].is_zero():
                    acc = acc + a[i][t] * b[t][j]
            row.append(acc)
        out.append(row)
    return out


def _neg(a):
    return [[-v for v in row] for row in a]


# -- the action ---------------------------------------------------------------------


class GroupAction:
    """Compact connected group acting linearly on ``chart``."""

    def __init__(self, chart: Chart, kind: str, generators=()):
        if kind not in GROUP_KINDS:
            raise ValueError(f"unknown group kind {kind!r}")
        generators = [g if isinstance(g, VectorField) else VectorField(chart, g) for g in generators]
        expected = {"circle": 1, "so3": 3, "trivial": 0}.get(kind)
        if expected is not None and len(generators) != expected:
            raise GeneratorMismatch(f"a {kind} action needs {expected} generator(s), got {len(generators)}")
        if kind == "torus" and not generators:
            raise GeneratorMismatch("a torus action needs at least one generator")
        self.chart = chart
        self.kind = kind
        self.liegen = tuple(generators)
        self.matrices = [linear_matrix(g) for g in generators]
        self._build()
        self._validate()

    # construction of the action map and weight
    def _build(self):
        n = self.chart.dim
        if self.kind == "trivial":
            self.angles = ()
            self.weight = Weight.trivial()
            self.matrix = None
            self.inverse = None
            return
        if self.kind == "circle":
            self.angles = ("t",)
            self.weight = Weight.circle("t")
            factors = [(self.matrices[0], "t")]
        elif self.kind == "torus":
            self.angles = tuple(f"t{i + 1}" for i in range(len(self.matrices)))
            self.weight = Weight.torus(self.angles)
            for i, a in enumerate(self.matrices):
                for b in self.matrices[i + 1:]:
                    if _matmul(a, b) != _matmul(b, a):
                        raise UnsupportedAction("torus generators must commute")
            factors = list(zip(self.matrices, self.angles))
        else:
            self.angles = ("alpha", "beta", "gamma")
            self.weight = Weight.so3(self.angles)
            lx, _, lz = self.matrices
            factors = [(lz, "alpha"), (lx, "beta"), (lz, "gamma")]
        mats = [_trig_exp(a, self.angles, t) for a, t in factors]
        invs = [_trig_exp(_neg(a), self.angles, t) for a, t in reversed(factors)]
        m = mats[0]
        for f in mats[1:]:
            m = _trig_matmul(m, f, self.angles)
        inv = invs[0]
        for f in invs[1:]:
            inv = _trig_matmul(inv, f, self.angles)
        self.matrix = m
        self.inverse = inv
        ident = [[TrigPoly.constant(self.angles, int(i == j)) for j in range(n)] for i in range(n)]
        if _trig_matmul(m, inv, self.angles) != ident:
            raise InternalInconsistency("action matrix and its inverse do not multiply to the identity")
        chart = self.chart
        xs = [TrigPoly.constant(self.angles, RatFn.coordinate(chart, c)) for c in chart.coords]
        self.bindings = {}
        for i, c in enumerate(chart.coords):
            acc = TrigPoly(self.angles, chart=chart)
            for j in range(n):
                if not m[i][j].is_zero():
                    acc = acc + m[i][j] * xs[j]
            self.bindings[c] = acc

    def _validate(self):
        """Identity at zero angles; angle derivatives reproduce the generators."""
        if self.kind == "trivial":
            return
        chart = self.chart
        for c in chart.coords:
            if self.bindings[c].at_zero() != RatFn.coordinate(chart, c):
                raise GeneratorMismatch(f"action map is not the identity at zero angles in {c}")
        if self.kind == "so3":
            lx, ly, lz = self.liegen
            checks = [("alpha", lz), ("beta", lx), ("gamma", lz)]
            br = lie_bracket(lz, lx)
            if not (br == ly or br == -ly):
                raise GeneratorMismatch("SO(3) generators must satisfy [Lz, Lx] = +-Ly")
        else:
            checks = list(zip(self.angles, self.liegen))
        for angle, field in checks:
            derived = VectorField(chart, [self.bindings[c].diff(angle).at_zero() for c in chart.coords])
            if derived != field:
                raise GeneratorMismatch(
                    f"derivative of the action in {angle} at the identity is {derived}, not {field}"
                )

    def fundamental_fields(self):
        return list(self.liegen)

    def __repr__(self):
        return f"GroupAction({self.kind} on {self.chart.name}: {[str(g) for g in self.liegen]})"

    # pullbacks by the group element with angle parameters
    def pull_function(self, f: RatFn):
        if self.kind == "trivial":
            return f
        return substitute(f, self.bindings)

    def matrix_float(self, angle_values):
        return np.array([[e.evaluate_float(angle_values) for e in row] for row in self.matrix])


def fundamental_fields(a: GroupAction):
    return a.fundamental_fields()


def vertical_distribution(a: GroupAction) -> Distribution:
    return Distribution.tangent(a.chart, a.liegen)


# -- invariance -----------------------------------------------------------------------


@dataclass(frozen=True)
class Certificate:
    """Outcome of a check plus (label, residual) pairs when it fails."""

    ok: bool
    residuals: tuple = ()

    def __bool__(self):
        return self.ok


def is_invariant(obj, a: GroupAction) -> Certificate:
    """All Lie derivatives along the fundamental fields vanish identically."""
    residuals = []
    for i, xi in enumerate(a.liegen):
        if isinstance(obj, RatFn):
            r = xi(obj)
        elif isinstance(obj, VectorField):
            r = lie_bracket(xi, obj)
        elif isinstance(obj, OneForm):
            r = lie_derivative_oneform(xi, obj)
        else:
            raise TypeError(f"cannot test invariance of {type(obj).__name__}")
        if not r.is_zero():
            residuals.append((i, r))
    return Certificate(not residuals, tuple(residuals))


def is_descending(x: VectorField, a: GroupAction, samples=()) -> Certificate:
    """[X, xi] lies in the vertical distribution for every generator xi.

    Checked over the fraction field and, in addition, pointwise at samples.
    """
    vert = vertical_distribution(a)
    residuals = []
    for i, xi in enumerate(a.liegen):
        b = lie_bracket(x, xi)
        if b.is_zero():
            continue
        if not membership_generic(Section.tangent(b), vert):
            residuals.append((i, b))
            continue
        for p in samples:
            try:
                vp = eval_at(vert, p)
                bp = Section.tangent(b).evaluate(p)
            except ZeroDivisionError:
                continue
            if not vp.contains(bp):
                residuals.append((i, b, tuple(p)))
                break
    return Certificate(not residuals, tuple(residuals))


# -- averaging ------------------------------------------------------------------------------


def _split(value, chart):
    """Composed value as (TrigPoly numerator or RatFn, RatFn denominator)."""
    if isinstance(value, TrigFraction):
        return value.num, value.den
    if isinstance(value, RatFn):
        return RatFn(chart, value.num, _reduced=True), RatFn(chart, value.den, _reduced=True)
    return value, chart.one()


def _integrate(value, a: GroupAction):
    if isinstance(value, RatFn):
        return value
    return trig_integrate(value, a.weight)


def average(obj, a: GroupAction, certify: bool = False):
    """Exact Haar average of a function, vector field or one-form.

    Vector fields transform as M^{-1} X(M x), one-forms as M^T alpha(M x).
    Rational inputs need denominators invariant under the action.
    """
    if a.kind == "trivial":
        return obj
    chart = a.chart
    if isinstance(obj, RatFn):
        num, den = _split(a.pull_function(obj), chart)
        result = _integrate(num, a) / den
    elif isinstance(obj, (VectorField, OneForm)):
        parts = [_split(a.pull_function(c), chart) for c in obj.components]
        n = chart.dim
        out = []
        for i in range(n):
            groups = {}
            for j in range(n):
                m = a.inverse[i][j] if isinstance(obj, VectorField) else a.matrix[j][i]
                num, den = parts[j]
                if m.is_zero() or (isinstance(num, RatFn) and num.is_zero()):
                    continue
                term = m * num
                groups[den] = groups[den] + term if den in groups else term
            total = chart.zero()
            for den, num in groups.items():
                total = total + _integrate(num, a) / den
            out.append(total)
        result = type(obj)(chart, out)
    else:
        raise TypeError(f"cannot average {type(obj).__name__}")
    if certify and not is_invariant(result, a):
        raise InternalInconsistency(f"average {result} failed the invariance check")
    return result


def _gauss_nodes(order, lo, hi):
    x, w = np.polynomial.legendre.leggauss(order)
    mid, half = (hi + lo) / 2, (hi - lo) / 2
    return mid + half * x, half * w


def _rotation_batch(a_mat, t):
    """exp(t A) for A^3 = -A, batched over the angle array ``t``."""
    a = np.array([[float(v) for v in row] for row in a_mat])
    n = a.shape[0]
    s, c = np.sin(t)[:, None, None], np.cos(t)[:, None, None]
    return np.eye(n) + s * a + (1 - c) * (a @ a)


def _poly_batch(p, pts):
    out = np.zeros(pts.shape[0])
    for mono, coef in p.terms():
        term = np.full(pts.shape[0], float(coef))
        for k, e in enumerate(mono):
            if e:
                term = term * pts[:, k] ** e
        out += term
    return out


def _ratfn_batch(f: RatFn, pts):
    num = _poly_batch(f.num, pts)
    return num if f.is_poly else num / _poly_batch(f.den, pts)


def average_quadrature(obj, a: GroupAction, point, order: int = 12, panels: int = 4):
    """Float average by tensor Gauss-Legendre quadrature over the angles.

    Each angle interval is split into ``panels`` equal pieces carrying an
    ``order``-node rule.  Group elements are built numerically from the
    closed-form exponential of each generator matrix, independently of the
    symbolic action map, so this is a check on :func:`average`.
    """
    if a.kind == "trivial":
        return _eval_obj(obj, point)
    domains = [(0.0, math.pi) if d == "half" else (0.0, 2 * math.pi) for d in a.weight.domains]
    grids = []
    for lo, hi in domains:
        step = (hi - lo) / panels
        parts = [_gauss_nodes(order, lo + k * step, lo + (k + 1) * step) for k in range(panels)]
        grids.append((np.concatenate([x for x, _ in parts]), np.concatenate([w for _, w in parts])))
    mesh = np.meshgrid(*[g[0] for g in grids], indexing="ij")
    wmesh = np.meshgrid(*[g[1] for g in grids], indexing="ij")
    angles = [m.ravel() for m in mesh]
    w = np.prod([m.ravel() for m in wmesh], axis=0)
    if a.kind == "so3":
        lx, _, lz = a.matrices
        factors = [(lz, angles[0]), (lx, angles[1]), (lz, angles[2])]
        w = w * np.sin(angles[1]) / (8 * math.pi**2)
    else:
        factors = list(zip(a.matrices, angles))
        w = w / (2 * math.pi) ** len(angles)
    m = None
    for mat, t in factors:
        r = _rotation_batch(mat, t)
        m = r if m is None else m @ r
    p = np.array([float(v) for v in point])
    q = m @ p
    if isinstance(obj, RatFn):
        return float(w @ _ratfn_batch(obj, q))
    vals = np.stack([_ratfn_batch(c, q) for c in obj.components], axis=1)
    if isinstance(obj, VectorField):
        v = np.linalg.solve(m, vals[:, :, None])[:, :, 0]
    else:
        v = np.einsum("kji,kj->ki", m, vals)
    return w @ v


def _eval_obj(obj, point):
    if isinstance(obj, RatFn):
        return obj.evaluate_float(point)
    return np.array(obj.evaluate_float(point))


# -- invariant functions and codistributions --------------------------------------------


class InvariantBasis:
    """Invariant polynomials (f_1, ..., f_k), verified at construction."""

    def __init__(self, action: GroupAction, fns, names=None):
        fns = list(fns)
        for i, f in enumerate(fns):
            if not f.is_poly:
                raise ValueError(f"basis element {f} is not a polynomial")
            cert = is_invariant(f, action)
            if not cert:
                raise NotInvariant(
                    f"basis element #{i} {f} is not invariant: "
                    + "; ".join(f"xi_{j}(f) = {r}" for j, r in cert.residuals)
                )
        self.action = action
        self.fns = tuple(fns)
        self.names = tuple(names) if names is not None else tuple(f"f{i + 1}" for i in range(len(fns)))
        if len(self.names) != len(self.fns):
            raise ValueError("one name per basis element is required")

    @property
    def chart(self) -> Chart:
        return self.action.chart

    def __len__(self):
        return len(self.fns)

    def __iter__(self):
        return iter(self.fns)


def invariant_codistribution(b: InvariantBasis) -> Distribution:
    forms = [exterior_derivative_fn(f) for f in b.fns]
    for i, df in enumerate(forms):
        for j, xi in enumerate(b.action.liegen):
            r = df(xi)
            if not r.is_zero():
                raise NotInvariant(f"d f{i + 1} does not annihilate generator #{j}: residual {r}")
    return Distribution.cotangent(b.chart, forms)


def _checked_fields(a: GroupAction, declared):
    for i, x in enumerate(declared):
        cert = is_invariant(x, a)
        if not cert:
            raise NotInvariant(f"declared field #{i} {x} is not invariant: {cert.residuals[0][1]}")
    return list(declared)


def descending_tangent(a: GroupAction, declared) -> Distribution:
    """Span of the declared invariant fields together with the fundamental fields."""
    return Distribution.tangent(a.chart, _checked_fields(a, declared) + list(a.liegen))


def invariant_tangent(a: GroupAction, declared) -> Distribution:
    """Span of the declared invariant fields alone."""
    return Distribution.tangent(a.chart, _checked_fields(a, declared))


def orbit_rank(a: GroupAction, point) -> int:
    return eval_at(vertical_distribution(a), point).rank


__all__ = [
    "Certificate",
    "GroupAction",
    "InvariantBasis",
    "average",
    "average_quadrature",
    "descending_tangent",
    "fundamental_fields",
    "invariant_codistribution",
    "invariant_tangent",
    "is_descending",
    "is_invariant",
    "linear_matrix",
    "orbit_rank",
    "vertical_distribution",
]
