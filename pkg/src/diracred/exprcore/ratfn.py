"""Charts and exact rational functions over Q.

Polynomials are sympy sparse ring elements (gmpy2-backed rationals) in a
graded-lexicographic ring whose generators follow the chart's coordinate
order.  A :class:`RatFn` keeps ``num/den`` with ``gcd(num, den) = 1`` and a
monic denominator, so structural equality is mathematical equality.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from numbers import Rational

from sympy.polys.domains import QQ
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyRing

from ..errors import (
    ChartMismatch,
    DivisionByZeroPolynomial,
    UnknownCoordinate,
    ZeroDenominatorAfterSubstitution,
)


@lru_cache(maxsize=None)
def _ring(coords: tuple[str, ...]) -> PolyRing:
    # symbol names are mangled so user coordinate names never clash with sympy
    return PolyRing([f"_c{i}" for i in range(len(coords))], QQ, grlex)


def to_qq(value):
    """Convert an int/Fraction/mpq/string to a sympy QQ element."""
    if isinstance(value, str):
        value = Fraction(value)
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    if isinstance(value, int):
        return QQ(value)
    if isinstance(value, Rational):
        return QQ(int(value.numerator), int(value.denominator))
    return QQ.convert(value)


def to_fraction(value) -> Fraction:
    return Fraction(int(value.numerator), int(value.denominator))


def format_rational(q) -> str:
    n, d = int(q.numerator), int(q.denominator)
    return str(n) if d == 1 else f"{n}/{d}"


_SCALARS = (int, Rational)


class Chart:
    """A named coordinate system ``(name, coords)``."""

    __slots__ = ("name", "coords", "_index")

    def __init__(self, name: str, coords):
        coords = tuple(coords)
        if not name:
            raise ValueError("chart name must be nonempty")
        if not coords:
            raise ValueError(f"chart {name!r} needs at least one coordinate")
        if any(not c for c in coords):
            raise ValueError("coordinate names must be nonempty")
        if len(set(coords)) != len(coords):
            raise ValueError(f"duplicate coordinate names in chart {name!r}")
        self.name = name
        self.coords = coords
        self._index = {c: i for i, c in enumerate(coords)}

    @property
    def dim(self) -> int:
        return len(self.coords)

    @property
    def ring(self) -> PolyRing:
        return _ring(self.coords)

    def index(self, coord: str) -> int:
        try:
            return self._index[coord]
        except KeyError:
            raise UnknownCoordinate(
                f"unknown coordinate {coord!r} for chart {self.name}{list(self.coords)}"
            ) from None

    def __eq__(self, other):
        if not isinstance(other, Chart):
            return NotImplemented
        return self.name == other.name and self.coords == other.coords

    def __hash__(self):
        return hash((self.name, self.coords))

    def __repr__(self):
        return f"Chart({self.name!r}, {list(self.coords)!r})"

    # convenience constructors
    def coord(self, name: str) -> RatFn:
        return RatFn.coordinate(self, name)

    def const(self, value) -> RatFn:
        return RatFn.constant(self, value)

    def zero(self) -> RatFn:
        return RatFn(self, self.ring.zero, self.ring.one, _reduced=True)

    def one(self) -> RatFn:
        return RatFn(self, self.ring.one, self.ring.one, _reduced=True)


def same_chart(*charts: Chart) -> Chart:
    first = charts[0]
    for c in charts[1:]:
        if c != first:
            raise ChartMismatch(f"chart {c!r} does not match {first!r}")
    return first


def _normalize(num, den):
    if not den:
        raise DivisionByZeroPolynomial("denominator is the zero polynomial")
    if not num:
        return num.ring.zero, num.ring.one
    if den.is_ground:
        c = den.LC
        return (num * (1 / c) if c != 1 else num), den.ring.one
    num, den = num.cancel(den)
    c = den.LC
    if c != 1:
        inv = 1 / c
        num, den = num * inv, den * inv
    return num, den


class RatFn:
    """Reduced quotient of two polynomials on a chart."""

    __slots__ = ("chart", "num", "den", "_hash")

    def __init__(self, chart: Chart, num, den=None, *, _reduced=False):
        ring = chart.ring
        if den is None:
            den = ring.one
        if num.ring is not ring or den.ring is not ring:
            num, den = ring(num), ring(den)
        if not _reduced:
            num, den = _normalize(num, den)
        self.chart = chart
        self.num = num
        self.den = den
        self._hash = None

    # -- construction -----------------------------------------------------
    @classmethod
    def constant(cls, chart: Chart, value) -> RatFn:
        return cls(chart, chart.ring(to_qq(value)), _reduced=True)

    @classmethod
    def coordinate(cls, chart: Chart, name: str) -> RatFn:
        return cls(chart, chart.ring.gens[chart.index(name)], _reduced=True)

    def _lift(self, other) -> RatFn:
        if isinstance(other, RatFn):
            same_chart(self.chart, other.chart)
            return other
        return RatFn.constant(self.chart, other)

    @staticmethod
    def _foreign(other) -> bool:
        return not isinstance(other, (RatFn, _SCALARS, str)) and type(other).__name__ != "mpq"

    # -- predicates --------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.num

    def __bool__(self):
        return bool(self.num)

    @property
    def is_poly(self) -> bool:
        return self.den == 1

    @property
    def is_constant(self) -> bool:
        return self.num.is_ground and self.den.is_ground

    def constant_value(self) -> Fraction:
        if not self.is_constant:
            raise ValueError(f"{self} is not constant")
        return to_fraction(self.num.LC) if self.num else Fraction(0)

    def degree(self) -> int:
        """Total degree of the numerator (-1 for zero)."""
        if not self.num:
            return -1
        return max(sum(m) for m in self.num.itermonoms())

    # -- arithmetic ----------------------------------------------------------
    def __add__(self, other):
        if self._foreign(other):
            return NotImplemented
        o = self._lift(other)
        if self.den == o.den:
            return RatFn(self.chart, self.num + o.num, self.den, _reduced=self.den == 1)
        return RatFn(self.chart, self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFn(self.chart, -self.num, self.den, _reduced=True)

    def __sub__(self, other):
        if self._foreign(other):
            return NotImplemented
        return self + (-self._lift(other))

    def __rsub__(self, other):
        if self._foreign(other):
            return NotImplemented
        return self._lift(other) - self

    def __mul__(self, other):
        if self._foreign(other):
            return NotImplemented
        if not isinstance(other, RatFn):
            c = to_qq(other)
            if not c:
                return self.chart.zero()
            return RatFn(self.chart, self.num * c, self.den, _reduced=True)
        o = self._lift(other)
        if self.den == 1 and o.den == 1:
            return RatFn(self.chart, self.num * o.num, _reduced=True)
        return RatFn(self.chart, self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if self._foreign(other):
            return NotImplemented
        o = self._lift(other)
        if not o.num:
            raise DivisionByZeroPolynomial(f"division of {self} by zero")
        return RatFn(self.chart, self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise TypeError("exponent must be an integer")
        if k >= 0:
            return RatFn(self.chart, self.num**k, self.den**k, _reduced=True) if k else self.chart.one()
        if not self.num:
            raise DivisionByZeroPolynomial("zero raised to a negative power")
        return RatFn(self.chart, self.den ** (-k), self.num ** (-k))

    # -- comparison --------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, RatFn):
            return self.chart == other.chart and self.num == other.num and self.den == other.den
        if isinstance(other, (int, Fraction)):
            return self.is_constant and self.constant_value() == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.chart, tuple(sorted(self.num.items())), tuple(sorted(self.den.items()))))
        return self._hash

    # -- calculus -------------------------------------------------------------
    def diff(self, coord: str) -> RatFn:
        """Partial derivative by the quotient rule."""
        x = self.chart.ring.gens[self.chart.index(coord)]
        dn = self.num.diff(x)
        if self.den == 1:
            return RatFn(self.chart, dn, _reduced=True)
        dd = self.den.diff(x)
        return RatFn(self.chart, dn * self.den - self.num * dd, self.den**2)

    # -- evaluation -----------------------------------------------------------
    def evaluate(self, point) -> Fraction:
        """Exact value at a rational point; raises ZeroDivisionError on a pole."""
        vals = [to_qq(v) for v in point]
        if len(vals) != self.chart.dim:
            raise ValueError(f"point has {len(vals)} coordinates, chart has {self.chart.dim}")
        d = _eval_poly(self.den, vals)
        if not d:
            raise ZeroDivisionError(f"denominator {self.den_str()} vanishes at {list(map(str, point))}")
        return to_fraction(_eval_poly(self.num, vals) / d)

    def evaluate_float(self, point) -> float:
        d = _eval_poly_float(self.den, point)
        return _eval_poly_float(self.num, point) / d

    # -- printing ---------------------------------------------------------------
    def num_str(self) -> str:
        return poly_to_str(self.num, self.chart.coords)

    def den_str(self) -> str:
        return poly_to_str(self.den, self.chart.coords)

    def __str__(self):
        if self.den == 1:
            return self.num_str()
        n = self.num_str()
        if len(self.num) > 1:
            n = f"({n})"
        d = self.den_str()
        if len(self.den) > 1 or "*" in d:
            d = f"({d})"
        return f"{n}/{d}"

    def __repr__(self):
        return f"RatFn({self.chart.name}: {self})"

    # -- substitution ---------------------------------------------------------
    def substitute(self, bindings):
        """See :func:`substitute`."""
        return substitute(self, bindings)


def _eval_poly(p, vals):
    total = QQ.zero
    for monom, c in p.terms():
        term = c
        for v, e in zip(vals, monom):
            if e:
                term *= v**e
        total += term
    return total


def _eval_poly_float(p, point):
    total = 0.0
    for monom, c in p.terms():
        term = float(c)
        for v, e in zip(point, monom):
            if e:
                term *= v**e
        total += term
    return total


def poly_to_str(p, coords) -> str:
    """Render a polynomial in the expression grammar, grlex-descending."""
    if not p:
        return "0"
    pieces = []
    for monom, c in p.terms():  # terms() follows the ring order, leading first
        factors = []
        for name, e in zip(coords, monom):
            if e == 1:
                factors.append(name)
            elif e > 1:
                factors.append(f"{name}^{e}")
        neg = c < 0
        a = -c if neg else c
        if factors:
            body = "*".join(factors)
            if a != 1:
                body = f"{format_rational(a)}*{body}"
        else:
            body = format_rational(a)
        pieces.append((neg, body))
    out = ("-" if pieces[0][0] else "") + pieces[0][1]
    for neg, body in pieces[1:]:
        out += (" - " if neg else " + ") + body
    return out


def substitute(f: RatFn, bindings):
    """Compose ``f`` with the coordinate bindings.

    ``bindings`` maps every coordinate of ``f.chart`` to a :class:`RatFn`
    (all on one target chart) or to a :class:`~diracred.exprcore.trig.TrigPoly`.
    Trigonometric bindings produce a TrigPoly and require that the composed
    denominator be free of angles.
    """
    from .trig import TrigPoly, compose_poly  # local: trig imports this module

    chart = f.chart
    missing = [c for c in chart.coords if c not in bindings]
    if missing:
        raise UnknownCoordinate(f"no binding for coordinate(s) {missing} of chart {chart.name}")
    extra = [c for c in bindings if c not in chart.coords]
    if extra:
        raise ChartMismatch(f"bindings name coordinates {extra} outside chart {chart.name}")
    values = [bindings[c] for c in chart.coords]
    if any(isinstance(v, TrigPoly) for v in values):
        return compose_poly(f, values)
    targets = {v.chart for v in values if isinstance(v, RatFn)}
    if len(targets) != 1:
        raise ChartMismatch("substitution values must live on a single chart")
    target = targets.pop()
    values = [v if isinstance(v, RatFn) else RatFn.constant(target, v) for v in values]
    num, den = _compose_ratfn(f.num, f.den, values, target)
    if not den:
        raise ZeroDenominatorAfterSubstitution(
            f"denominator {f.den_str()} composes to the zero polynomial"
        )
    return RatFn(target, num, den)


def _compose_ratfn(num, den, values, target):
    """Compose num/den with rational values, clearing all value denominators."""
    n = len(values)
    # common exponent per variable so the cleared factors cancel between num and den
    top = [0] * n
    for p in (num, den):
        for monom in p.itermonoms():
            for i, e in enumerate(monom):
                if e > top[i]:
                    top[i] = e
    ring = target.ring
    pnum = [v.num for v in values]
    pden = [v.den for v in values]
    cache = {}

    def power(i, k, which):
        key = (i, k, which)
        if key not in cache:
            base = pnum[i] if which == 0 else pden[i]
            cache[key] = base**k
        return cache[key]

    def compose(p):
        total = ring.zero
        for monom, c in p.terms():
            term = ring(c)
            for i, e in enumerate(monom):
                if top[i] == 0:
                    continue
                if e:
                    term = term * power(i, e, 0)
                if top[i] - e:
                    term = term * power(i, top[i] - e, 1)
            total += term
        return total

    return compose(num), compose(den)


def partial_derivative(f: RatFn, coord: str) -> RatFn:
    return f.diff(coord)
