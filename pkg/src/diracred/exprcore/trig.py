"""Trigonometric polynomials in group angles, kept in the Fourier basis.

A term key holds one signed integer per angle: ``k >= 0`` stands for
``cos(k*theta)`` (``k = 0`` is the constant 1) and ``-k`` for ``sin(k*theta)``.
Coefficients are sympy polynomials of a chart ring, or plain QQ scalars when
``chart`` is None.  Products are rewritten with the product-to-sum identities,
so the representation is unique and integration is coefficient extraction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product

from sympy.polys.domains import QQ

from ..errors import (
    ChartMismatch,
    IrrationalIntegral,
    ZeroDenominatorAfterSubstitution,
    NonNormalizedWeight,
    NonPolynomialIntegrand,
)
from .ratfn import RatFn, format_rational, poly_to_str, to_fraction, to_qq

_HALF = QQ(1, 2)


@lru_cache(maxsize=None)
def _mul_angle(a: int, b: int):
    """Product of two single-angle basis elements as [(code, factor)]."""
    if a == 0:
        return ((b, QQ.one),)
    if b == 0:
        return ((a, QQ.one),)
    if a > 0 and b > 0:  # cos*cos
        return _combine(((abs(a - b), _HALF), (a + b, _HALF)))
    if a < 0 and b < 0:  # sin*sin
        p, q = -a, -b
        return _combine(((abs(p - q), _HALF), (p + q, -_HALF)))
    # sin(q)*cos(p) = 1/2 (sin(q+p) + sin(q-p))
    q, p = (-a, b) if a < 0 else (-b, a)
    terms = [(-(q + p), _HALF)]
    if q > p:
        terms.append((-(q - p), _HALF))
    elif q < p:
        terms.append((-(p - q), -_HALF))
    return _combine(terms)


def _combine(terms):
    acc = {}
    for code, f in terms:
        acc[code] = acc.get(code, QQ.zero) + f
    return tuple((c, f) for c, f in acc.items() if f)


@lru_cache(maxsize=None)
def _mul_key(k1, k2):
    parts = [_mul_angle(a, b) for a, b in zip(k1, k2)]
    out = []
    for combo in product(*parts):
        f = QQ.one
        for _, g in combo:
            f *= g
        out.append((tuple(c for c, _ in combo), f))
    return tuple(out)


class TrigPoly:
    """Finite sum of coefficient * prod_i basis_i(theta_i).

    With ``chart`` set, coefficients are polynomials of ``chart.ring``;
    otherwise they are QQ scalars.
    """

    __slots__ = ("angles", "chart", "terms")

    def __init__(self, angles, terms=None, chart=None):
        self.angles = tuple(angles)
        self.chart = chart
        self.terms = {k: c for k, c in (terms or {}).items() if c}

    @property
    def ring(self):
        return self.chart.ring if self.chart is not None else None

    # -- construction ---------------------------------------------------------
    def _zero_coeff(self):
        return self.chart.ring.zero if self.chart is not None else QQ.zero

    def _coerce(self, c):
        if isinstance(c, RatFn):
            if not c.is_poly:
                raise NonPolynomialIntegrand(f"{c} is not a polynomial coefficient")
            if self.chart is not None and c.chart != self.chart:
                raise ChartMismatch(f"coefficient chart {c.chart!r} differs from {self.chart!r}")
            return c.num
        if self.chart is not None:
            return c if hasattr(c, "ring") else self.chart.ring(to_qq(c))
        return to_qq(c)

    @classmethod
    def constant(cls, angles, value, chart=None):
        if isinstance(value, RatFn) and chart is None:
            chart = value.chart
        t = cls(angles, chart=chart)
        return cls(t.angles, {(0,) * len(t.angles): t._coerce(value)}, chart)

    @classmethod
    def cos(cls, angles, angle, k=1, chart=None):
        return cls._basis(angles, angle, k, chart)

    @classmethod
    def sin(cls, angles, angle, k=1, chart=None):
        return cls._basis(angles, angle, -k, chart)

    @classmethod
    def _basis(cls, angles, angle, code, chart):
        angles = tuple(angles)
        key = [0] * len(angles)
        key[angles.index(angle)] = code
        one = chart.ring.one if chart is not None else QQ.one
        return cls(angles, {tuple(key): one}, chart)

    def with_chart(self, chart) -> TrigPoly:
        """Lift scalar coefficients into the polynomial ring of ``chart``."""
        if self.chart == chart:
            return self
        if self.chart is not None:
            raise ChartMismatch(f"coefficients live on {self.chart!r}, not {chart!r}")
        ring = chart.ring
        return TrigPoly(self.angles, {k: ring(c) for k, c in self.terms.items()}, chart)

    # -- arithmetic ----------------------------------------------------------
    def _check(self, other):
        if self.angles != other.angles:
            raise ChartMismatch(f"angle lists differ: {self.angles} vs {other.angles}")
        if self.chart == other.chart:
            return self, other
        if self.chart is None:
            return self.with_chart(other.chart), other
        if other.chart is None:
            return self, other.with_chart(self.chart)
        raise ChartMismatch(f"coefficient charts differ: {self.chart!r} vs {other.chart!r}")

    def _lift(self, other):
        if isinstance(other, TrigPoly):
            return other
        chart = self.chart
        if isinstance(other, RatFn):
            chart = chart or other.chart
        return TrigPoly.constant(self.angles, other, chart)

    def __add__(self, other):
        a, b = self._check(self._lift(other))
        terms = dict(a.terms)
        zero = a._zero_coeff()
        for k, c in b.terms.items():
            terms[k] = terms.get(k, zero) + c
        return TrigPoly(a.angles, terms, a.chart)

    __radd__ = __add__

    def __neg__(self):
        return TrigPoly(self.angles, {k: -c for k, c in self.terms.items()}, self.chart)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def scale(self, c) -> TrigPoly:
        """Multiply by a scalar or a polynomial RatFn."""
        if isinstance(c, RatFn):
            base = self if self.chart is not None else self.with_chart(c.chart)
            return base * TrigPoly.constant(self.angles, c)
        c = to_qq(c)
        return TrigPoly(self.angles, {k: v * c for k, v in self.terms.items()}, self.chart)

    def __mul__(self, other):
        if not isinstance(other, TrigPoly):
            if isinstance(other, RatFn):
                return self.scale(other)
            return self.scale(other)
        a, b = self._check(other)
        zero = a._zero_coeff()
        terms = {}
        for k1, c1 in a.terms.items():
            for k2, c2 in b.terms.items():
                c12 = c1 * c2
                for key, f in _mul_key(k1, k2):
                    terms[key] = terms.get(key, zero) + c12 * f
        return TrigPoly(a.angles, terms, a.chart)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers of trigonometric polynomials are not supported")
        result = TrigPoly.constant(self.angles, 1, self.chart)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if not isinstance(other, (TrigPoly, RatFn, int, Fraction)):
            return NotImplemented
        a, b = self._check(self._lift(other))
        return a.terms == b.terms

    def __hash__(self):
        return hash((self.angles, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def is_angle_free(self) -> bool:
        return all(not any(k) for k in self.terms)

    def constant_term(self):
        return self.terms.get((0,) * len(self.angles), self._zero_coeff())

    def to_ratfn(self) -> RatFn:
        """Convert an angle-free TrigPoly with chart coefficients to a RatFn."""
        if not self.is_angle_free() or self.chart is None:
            raise ValueError("only angle-free polynomial-coefficient values convert to RatFn")
        return RatFn(self.chart, self.constant_term(), _reduced=True)

    # -- calculus ---------------------------------------------------------------
    def diff(self, angle) -> TrigPoly:
        i = self.angles.index(angle)
        zero = self._zero_coeff()
        terms = {}
        for key, c in self.terms.items():
            code = key[i]
            if code == 0:
                continue
            k = abs(code)
            new = list(key)
            if code > 0:  # d cos(k t) = -k sin(k t)
                new[i] = -k
                f = -k
            else:  # d sin(k t) = k cos(k t)
                new[i] = k
                f = k
            new = tuple(new)
            terms[new] = terms.get(new, zero) + c * QQ(f)
        return TrigPoly(self.angles, terms, self.chart)

    def at_zero(self):
        """Coefficient value with every angle set to zero."""
        total = self._zero_coeff()
        for key, c in self.terms.items():
            if all(code >= 0 for code in key):
                total += c
        if self.chart is not None:
            return RatFn(self.chart, total, _reduced=True)
        return to_fraction(total)

    def evaluate_float(self, angle_values, point=None):
        """Float value at the given angles (and chart point for coefficients)."""
        total = 0.0
        for key, c in self.terms.items():
            if self.chart is not None:
                t = RatFn(self.chart, c, _reduced=True).evaluate_float(point)
            else:
                t = float(c)
            for code, th in zip(key, angle_values):
                if code > 0:
                    t *= math.cos(code * th)
                elif code < 0:
                    t *= math.sin(-code * th)
            total += t
        return total

    # -- printing ---------------------------------------------------------------
    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for key in sorted(self.terms):
            c = self.terms[key]
            factors = []
            for name, code in zip(self.angles, key):
                if code > 0:
                    factors.append(f"cos({'' if code == 1 else f'{code}*'}{name})")
                elif code < 0:
                    factors.append(f"sin({'' if code == -1 else f'{-code}*'}{name})")
            if self.chart is None:
                cs = format_rational(c)
            else:
                cs = f"({poly_to_str(c, self.chart.coords)})"
            parts.append("*".join([cs] + factors))
        return " + ".join(parts)

    def __repr__(self):
        return f"TrigPoly({self})"


def compose_poly(f: RatFn, values):
    """Substitute TrigPoly values into ``f``.

    Returns a TrigPoly, or a RatFn when the result is angle-free.  A
    denominator must compose to an angle-free polynomial; the result is then a
    :class:`TrigFraction`.
    """
    tps = [v for v in values if isinstance(v, TrigPoly)]
    angles = tps[0].angles
    chart = next((v.chart for v in tps if v.chart is not None), None)
    if chart is None:
        chart = next((v.chart for v in values if isinstance(v, RatFn)), None)
    lifted = []
    for v in values:
        if not isinstance(v, TrigPoly):
            v = TrigPoly.constant(angles, v, chart)
        lifted.append(v.with_chart(chart) if chart is not None else v)
    num = _compose(f.num, lifted, angles, chart)
    if f.den == 1:
        return _settle(num)
    den = _compose(f.den, lifted, angles, chart)
    if not den.is_angle_free():
        raise NonPolynomialIntegrand(
            f"denominator {f.den_str()} is not invariant under the substitution"
        )
    if den.is_zero():
        raise ZeroDenominatorAfterSubstitution(f"denominator {f.den_str()} composes to zero")
    d = den.to_ratfn() if chart is not None else den.constant_term()
    if num.is_angle_free() and chart is not None:
        return num.to_ratfn() / d
    return TrigFraction(num, d)


def _settle(tp):
    if tp.chart is not None and tp.is_angle_free():
        return tp.to_ratfn()
    return tp


def _compose(p, values, angles, chart):
    powers = {}

    def power(i, e):
        if (i, e) not in powers:
            powers[(i, e)] = values[i] ** e
        return powers[(i, e)]

    total = TrigPoly(angles, chart=chart)
    for monom, c in p.terms():
        term = TrigPoly.constant(angles, c, chart) if chart is None else TrigPoly(
            angles, {(0,) * len(angles): chart.ring(c)}, chart)
        for i, e in enumerate(monom):
            if e:
                term = term * power(i, e)
        total = total + term
    return total


@dataclass(frozen=True)
class TrigFraction:
    """A TrigPoly divided by an angle-free polynomial."""

    num: TrigPoly
    den: object


@dataclass(frozen=True)
class Weight:
    """Haar density ``density * pi**pi_power`` over per-angle domains.

    ``domains[i]`` is ``"full"`` for [0, 2*pi) or ``"half"`` for [0, pi].
    """

    density: TrigPoly
    pi_power: int
    domains: tuple

    @classmethod
    def circle(cls, angle="t"):
        return cls(TrigPoly.constant((angle,), QQ(1, 2)), -1, ("full",))

    @classmethod
    def torus(cls, angles):
        angles = tuple(angles)
        k = len(angles)
        return cls(TrigPoly.constant(angles, QQ(1, 2**k)), -k, ("full",) * k)

    @classmethod
    def so3(cls, angles=("alpha", "beta", "gamma")):
        # z-x-z Euler angles: sin(beta) / (8 pi^2)
        angles = tuple(angles)
        return cls(TrigPoly.sin(angles, angles[1]).scale(QQ(1, 8)), -2, ("full", "half", "full"))

    @classmethod
    def trivial(cls):
        return cls(TrigPoly.constant((), 1), 0, ())


def _basis_integral(code, domain):
    """Integral of one basis element as (rational, power of pi)."""
    if domain == "full":
        return (QQ(2), 1) if code == 0 else (QQ.zero, 0)
    if domain == "half":
        if code == 0:
            return QQ.one, 1
        if code > 0:
            return QQ.zero, 0
        k = -code
        return (QQ(2, k), 0) if k % 2 else (QQ.zero, 0)
    raise ValueError(f"unknown integration domain {domain!r}")


def _integrate_raw(f: TrigPoly, domains, pi_power, zero):
    by_power = {}
    for key, c in f.terms.items():
        value, e = QQ.one, pi_power
        for code, dom in zip(key, domains):
            v, p = _basis_integral(code, dom)
            if not v:
                break
            value *= v
            e += p
        else:
            by_power[e] = by_power.get(e, zero) + c * value
    return {e: c for e, c in by_power.items() if c}


def weight_total(weight: Weight):
    totals = _integrate_raw(weight.density, weight.domains, weight.pi_power, QQ.zero)
    return totals


def trig_integrate(f: TrigPoly, weight: Weight):
    """Exact integral of ``f * weight`` over the weight's angle domains.

    Returns a RatFn for chart coefficients, otherwise a Fraction.  Raises NonNormalizedWeight when
    the weight does not integrate to 1, and IrrationalIntegral when powers of
    pi fail to cancel.
    """
    if f.angles != weight.density.angles:
        raise ChartMismatch(f"angles {f.angles} do not match weight angles {weight.density.angles}")
    totals = weight_total(weight)
    if totals != {0: QQ.one}:
        shown = {e: format_rational(c) for e, c in totals.items()}
        raise NonNormalizedWeight(f"weight integrates to {shown} (as coefficients of pi powers), not 1")
    integrand = f * weight.density
    zero = f._zero_coeff()
    parts = _integrate_raw(integrand, weight.domains, weight.pi_power, zero)
    bad = {e: c for e, c in parts.items() if e != 0}
    if bad:
        raise IrrationalIntegral(f"integral has pi-power terms {sorted(bad)}")
    value = parts.get(0, zero)
    if f.chart is not None:
        return RatFn(f.chart, value, _reduced=True)
    return to_fraction(value)
