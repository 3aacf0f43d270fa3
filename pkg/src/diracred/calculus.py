"""Vector fields, one-forms and the Pontryagin-bundle brackets on a chart."""
from __future__ import annotations

from fractions import Fraction

from .errors import ChartMismatch
from .exprcore import Chart, RatFn, parse_expr, same_chart


def _coerce(chart, c):
    if isinstance(c, RatFn):
        same_chart(chart, c.chart)
        return c
    if isinstance(c, str):
        return parse_expr(c, chart)
    return RatFn.constant(chart, c)


def _term_str(c: RatFn, symbol: str) -> str:
    if c == 1:
        return symbol
    if c == -1:
        return f"-{symbol}"
    s = str(c)
    if c.is_constant:
        return f"{s}*{symbol}"
    body = s[1:] if s.startswith("-") else s
    if "+" in body or " - " in body or "/" in body:
        return f"({s})*{symbol}"
    return f"{s}*{symbol}"


def _join(terms) -> str:
    if not terms:
        return "0"
    out = terms[0]
    for t in terms[1:]:
        out += f" - {t[1:]}" if t.startswith("-") else f" + {t}"
    return out


class _Components:
    """Shared behaviour of coordinate-indexed component tuples."""

    __slots__ = ("chart", "components")
    _prefix = ""

    def __init__(self, chart: Chart, components):
        comps = tuple(_coerce(chart, c) for c in components)
        if len(comps) != chart.dim:
            raise ValueError(
                f"{type(self).__name__} on {chart.name} needs {chart.dim} components, got {len(comps)}"
            )
        self.chart = chart
        self.components = comps

    @classmethod
    def zero(cls, chart):
        return cls(chart, [chart.zero()] * chart.dim)

    @classmethod
    def basis(cls, chart, coord):
        i = chart.index(coord)
        return cls(chart, [chart.one() if j == i else chart.zero() for j in range(chart.dim)])

    def _same(self, other):
        if type(other) is not type(self):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        same_chart(self.chart, other.chart)
        return other

    def __add__(self, other):
        o = self._same(other)
        return type(self)(self.chart, [a + b for a, b in zip(self.components, o.components)])

    def __sub__(self, other):
        o = self._same(other)
        return type(self)(self.chart, [a - b for a, b in zip(self.components, o.components)])

    def __neg__(self):
        return type(self)(self.chart, [-a for a in self.components])

    def __mul__(self, f):
        """Scale by a function or a rational constant."""
        if isinstance(f, _Components):
            return NotImplemented
        f = _coerce(self.chart, f)
        return type(self)(self.chart, [f * a for a in self.components])

    __rmul__ = __mul__

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self.chart == other.chart and self.components == other.components

    def __hash__(self):
        return hash((type(self).__name__, self.chart, self.components))

    def __getitem__(self, coord):
        if isinstance(coord, int):
            return self.components[coord]
        return self.components[self.chart.index(coord)]

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def evaluate(self, point) -> tuple:
        return tuple(c.evaluate(point) for c in self.components)

    def evaluate_float(self, point) -> tuple:
        return tuple(c.evaluate_float(point) for c in self.components)

    def __str__(self):
        return _join([
            _term_str(c, f"{self._prefix}{name}")
            for name, c in zip(self.chart.coords, self.components)
            if not c.is_zero()
        ])

    def __repr__(self):
        return f"{type(self).__name__}({self})"


class VectorField(_Components):
    """Coefficients of the coordinate fields d/dx_i."""

    __slots__ = ()
    _prefix = "∂"

    def __call__(self, f: RatFn) -> RatFn:
        """Directional derivative X(f)."""
        same_chart(self.chart, f.chart)
        total = self.chart.zero()
        for name, c in zip(self.chart.coords, self.components):
            if not c.is_zero():
                total = total + c * f.diff(name)
        return total


class OneForm(_Components):
    """Coefficients of the differentials dx_i."""

    __slots__ = ()
    _prefix = "d"

    def __call__(self, x: VectorField) -> RatFn:
        """Contraction alpha(X)."""
        same_chart(self.chart, x.chart)
        total = self.chart.zero()
        for a, v in zip(self.components, x.components):
            if not a.is_zero() and not v.is_zero():
                total = total + a * v
        return total


class TwoForm:
    """Antisymmetric coefficients w_ij of dx_i ^ dx_j, stored for i < j."""

    __slots__ = ("chart", "entries")

    def __init__(self, chart: Chart, entries):
        self.chart = chart
        self.entries = {}
        for (i, j), c in entries.items():
            c = _coerce(chart, c)
            if i == j:
                if not c.is_zero():
                    raise ValueError("diagonal entries of a two-form must vanish")
                continue
            if i > j:
                i, j, c = j, i, -c
            if not c.is_zero():
                self.entries[(i, j)] = self.entries.get((i, j), chart.zero()) + c

    def __getitem__(self, ij) -> RatFn:
        i, j = ij
        if i == j:
            return self.chart.zero()
        if i < j:
            return self.entries.get((i, j), self.chart.zero())
        return -self.entries.get((j, i), self.chart.zero())

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.entries.values())

    def __eq__(self, other):
        if not isinstance(other, TwoForm):
            return NotImplemented
        return self.chart == other.chart and self.entries == other.entries

    def __hash__(self):
        return hash((self.chart, frozenset(self.entries.items())))

    def __str__(self):
        coords = self.chart.coords
        return _join([
            _term_str(self.entries[(i, j)], f"d{coords[i]}∧d{coords[j]}")
            for (i, j) in sorted(self.entries)
        ])

    def __repr__(self):
        return f"TwoForm({self})"


class Section:
    """A pair (X, alpha) in TM + T*M."""

    __slots__ = ("x", "alpha")

    def __init__(self, x: VectorField, alpha: OneForm):
        same_chart(x.chart, alpha.chart)
        self.x = x
        self.alpha = alpha

    @property
    def chart(self) -> Chart:
        return self.x.chart

    @classmethod
    def parse(cls, chart, x, alpha) -> Section:
        """Build from two lists of expression strings (or RatFn)."""
        return cls(VectorField(chart, x), OneForm(chart, alpha))

    @classmethod
    def zero(cls, chart) -> Section:
        return cls(VectorField.zero(chart), OneForm.zero(chart))

    @classmethod
    def tangent(cls, x: VectorField) -> Section:
        return cls(x, OneForm.zero(x.chart))

    @classmethod
    def cotangent(cls, alpha: OneForm) -> Section:
        return cls(VectorField.zero(alpha.chart), alpha)

    @classmethod
    def from_vector(cls, chart, vec) -> Section:
        n = chart.dim
        return cls(VectorField(chart, vec[:n]), OneForm(chart, vec[n:]))

    def vector(self) -> list:
        """The 2n coefficient functions (field part first)."""
        return list(self.x.components) + list(self.alpha.components)

    def __add__(self, other):
        return Section(self.x + other.x, self.alpha + other.alpha)

    def __sub__(self, other):
        return Section(self.x - other.x, self.alpha - other.alpha)

    def __neg__(self):
        return Section(-self.x, -self.alpha)

    def __mul__(self, f):
        if isinstance(f, Section):
            return NotImplemented
        return Section(self.x * f, self.alpha * f)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Section):
            return NotImplemented
        return self.x == other.x and self.alpha == other.alpha

    def __hash__(self):
        return hash((self.x, self.alpha))

    def is_zero(self) -> bool:
        return self.x.is_zero() and self.alpha.is_zero()

    def evaluate(self, point) -> tuple:
        return self.x.evaluate(point) + self.alpha.evaluate(point)

    def __str__(self):
        return f"({self.x}, {self.alpha})"

    def __repr__(self):
        return f"Section{self}"


# -- operations ---------------------------------------------------------------


def _check(*objs):
    charts = [o.chart for o in objs]
    try:
        return same_chart(*charts)
    except ChartMismatch:
        raise ChartMismatch(f"operands live on different charts: {charts}") from None


def pairing(s1: Section, s2: Section) -> RatFn:
    """Symmetric pairing beta(u) + alpha(v)."""
    _check(s1, s2)
    return s2.alpha(s1.x) + s1.alpha(s2.x)


def pairing_at(v1, v2) -> Fraction:
    """The same pairing on numeric fiber vectors of length 2n."""
    n = len(v1) // 2
    return sum((v2[n + i] * v1[i] + v1[n + i] * v2[i] for i in range(n)), Fraction(0))


def lie_bracket(x: VectorField, y: VectorField) -> VectorField:
    chart = _check(x, y)
    return VectorField(chart, [x(b) - y(a) for a, b in zip(x.components, y.components)])


def exterior_derivative_fn(f: RatFn) -> OneForm:
    return OneForm(f.chart, [f.diff(c) for c in f.chart.coords])


def exterior_derivative_form(a: OneForm) -> TwoForm:
    chart = a.chart
    coords = chart.coords
    entries = {}
    for i in range(chart.dim):
        for j in range(i + 1, chart.dim):
            entries[(i, j)] = a.components[j].diff(coords[i]) - a.components[i].diff(coords[j])
    return TwoForm(chart, entries)


def interior_product(y: VectorField, w: TwoForm) -> OneForm:
    chart = _check(y, w)
    out = []
    for j in range(chart.dim):
        total = chart.zero()
        for i, yi in enumerate(y.components):
            if not yi.is_zero():
                wij = w[i, j]
                if not wij.is_zero():
                    total = total + yi * wij
        out.append(total)
    return OneForm(chart, out)


def lie_derivative_oneform(x: VectorField, a: OneForm) -> OneForm:
    """Cartan's formula: i_X da + d(a(X))."""
    _check(x, a)
    return interior_product(x, exterior_derivative_form(a)) + exterior_derivative_fn(a(x))


def courant_bracket(s1: Section, s2: Section) -> Section:
    """([X, Y], L_X beta - i_Y d alpha)."""
    _check(s1, s2)
    x = lie_bracket(s1.x, s2.x)
    alpha = lie_derivative_oneform(s1.x, s2.alpha) - interior_product(
        s2.x, exterior_derivative_form(s1.alpha)
    )
    return Section(x, alpha)


def skew_bracket(s1: Section, s2: Section) -> Section:
    c = courant_bracket(s1, s2)
    correction = exterior_derivative_fn(pairing(s1, s2)) * Fraction(1, 2)
    return Section(c.x, c.alpha - correction)
