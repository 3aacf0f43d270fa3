"""Exact linear algebra over Q and over the rational-function field Q(x).

Fraction-field systems are cleared to polynomial rows and reduced with
sympy's fraction-free ``rref_den`` (Bareiss-style elimination), so
intermediate entries stay polynomial.  Pointwise systems use the same
machinery over QQ.
"""
from __future__ import annotations

from fractions import Fraction

from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from .exprcore import RatFn, to_fraction, to_qq

# -- over Q -------------------------------------------------------------------


def _qq_matrix(rows, ncols):
    data = [[to_qq(v) for v in row] for row in rows]
    return DomainMatrix(data, (len(data), ncols), QQ)


def rref_q(rows, ncols=None):
    """Reduced row echelon form over Q: (nonzero rows as Fractions, pivots)."""
    rows = [list(r) for r in rows]
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    if not rows or ncols == 0:
        return [], ()
    R, pivots = _qq_matrix(rows, ncols).rref()
    out = [[to_fraction(v) for v in R.to_list()[i]] for i in range(len(pivots))]
    return out, tuple(pivots)


def rank_q(rows, ncols=None) -> int:
    return len(rref_q(rows, ncols)[1])


def kernel_q(rows, ncols):
    """Basis of {v : rows @ v = 0} over Q."""
    if ncols == 0:
        return []
    if not rows:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    R, pivots = rref_q(rows, ncols)
    free = [j for j in range(ncols) if j not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -R[i][f]
        basis.append(v)
    return basis


def solve_q(columns, target):
    """Solve sum c_i columns[i] = target over Q; None if inconsistent."""
    n = len(target)
    m = len(columns)
    aug = [[columns[j][i] for j in range(m)] + [target[i]] for i in range(n)]
    R, pivots = rref_q(aug, m + 1)
    if m in pivots:
        return None
    c = [Fraction(0)] * m
    for i, p in enumerate(pivots):
        c[p] = R[i][m]
    return c


def span_contains_q(basis, vectors) -> bool:
    r = rank_q(basis) if basis else 0
    dim = len(vectors[0]) if vectors else 0
    if not vectors:
        return True
    return rank_q(list(basis) + list(vectors), dim) == r


def same_span_q(a, b, dim) -> bool:
    ra = rank_q(a, dim) if a else 0
    rb = rank_q(b, dim) if b else 0
    if ra != rb:
        return False
    return (rank_q(list(a) + list(b), dim) if a or b else 0) == ra


# -- over Q(x) ------------------------------------------------------------------


def _clear_row(row, ring):
    """Multiply a row of RatFn by the lcm of its denominators."""
    den = ring.one
    for f in row:
        if f.den != 1:
            den = den.lcm(f.den)
    return [f.num * den.exquo(f.den) if f.den != den else f.num for f in row]


def poly_matrix(rows, chart, ncols):
    ring = chart.ring
    K = ring.to_domain()
    data = [_clear_row(row, ring) for row in rows]
    return DomainMatrix(data, (len(data), ncols), K)


def rref_generic(rows, chart, ncols):
    """Fraction-free RREF over Q(x): (matrix rows as polys, den, pivots)."""
    if not rows or ncols == 0:
        return [], chart.ring.one, ()
    R, den, pivots = poly_matrix(rows, chart, ncols).rref_den()
    return R.to_list(), den, tuple(pivots)


def rank_generic(rows, chart, ncols) -> int:
    return len(rref_generic(rows, chart, ncols)[2])


def independent_rows_generic(rows, chart, ncols):
    """Indices of a maximal independent subset, greedy in the given order."""
    if not rows:
        return []
    cols = [[rows[i][j] for i in range(len(rows))] for j in range(ncols)]
    return list(rref_generic(cols, chart, len(rows))[2])


def _primitive(vec, ring):
    g = ring.zero
    for p in vec:
        if p:
            g = p if not g else g.gcd(p)
    if not g or g == 1:
        return vec
    return [p.exquo(g) for p in vec]


def kernel_generic(rows, chart, ncols):
    """Polynomial vectors spanning {v : rows @ v = 0} over Q(x).

    Each vector is made primitive (content removed) with a monic-leading
    first nonzero entry.
    """
    ring = chart.ring
    if ncols == 0:
        return []
    if not rows:
        return [[RatFn.constant(chart, int(i == j)) for j in range(ncols)] for i in range(ncols)]
    R, den, pivots = rref_generic(rows, chart, ncols)
    free = [j for j in range(ncols) if j not in pivots]
    out = []
    for f in free:
        v = [ring.zero] * ncols
        v[f] = den
        for i, p in enumerate(pivots):
            v[p] = -R[i][f]
        v = _primitive(v, ring)
        lead = next(p for p in v if p)
        if lead.LC != 1:
            inv = 1 / lead.LC
            v = [p * inv for p in v]
        out.append([RatFn(chart, p, _reduced=True) for p in v])
    return out


def solve_generic(columns, target, chart):
    """Solve sum c_i columns[i] = target over Q(x).

    Returns ``(coefficients, None)`` with free variables set to zero, or
    ``(None, (row_index, residual))`` naming an inconsistent equation of the
    reduced system.
    """
    n = len(target)
    m = len(columns)
    if m == 0:
        for i, t in enumerate(target):
            if not t.is_zero():
                return None, (i, t)
        return [], None
    aug = [[columns[j][i] for j in range(m)] + [target[i]] for i in range(n)]
    R, den, pivots = rref_generic(aug, chart, m + 1)
    if m in pivots:
        i = pivots.index(m)
        return None, (i, RatFn(chart, R[i][m], den))
    c = [chart.zero()] * m
    for i, p in enumerate(pivots):
        c[p] = RatFn(chart, R[i][m], den)
    return c, None


def det_generic(rows, chart):
    n = len(rows)
    if n == 0:
        return chart.one()
    return RatFn(chart, poly_matrix(rows, chart, n).det())


def minors_gcd(rows, chart, size):
    """gcd of the ``size`` x ``size`` minors of a polynomial matrix.

    Stops as soon as the gcd becomes a nonzero constant.
    """
    from itertools import combinations

    ring = chart.ring
    g = ring.zero
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    for rsel in combinations(range(nrows), size):
        for csel in combinations(range(ncols), size):
            sub = [[rows[i][j] for j in csel] for i in rsel]
            d = poly_matrix(sub, chart, size).det()
            if not d:
                continue
            g = d if not g else g.gcd(d)
            if g.is_ground:
                return RatFn.constant(chart, 1)
    return RatFn(chart, g) if g else chart.zero()
