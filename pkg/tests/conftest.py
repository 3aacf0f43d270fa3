import random
from fractions import Fraction

import pytest
from hypothesis import settings
from hypothesis import strategies as st

from diracred.calculus import OneForm, VectorField
from diracred.exprcore import Chart, RatFn

settings.register_profile("repo", max_examples=60, deadline=None)
settings.load_profile("repo")

XY = Chart("M", ("x", "y"))
XYZ = Chart("M", ("x", "y", "z"))


@pytest.fixture
def xyz():
    return XYZ


@pytest.fixture
def xy():
    return XY


def random_poly(rng, chart, degree=2, terms=3, span=4):
    ring = chart.ring
    p = ring.zero
    for _ in range(terms):
        mono = ring.one
        exps = [0] * chart.dim
        for _ in range(rng.randint(0, degree)):
            exps[rng.randrange(chart.dim)] += 1
        for g, e in zip(ring.gens, exps):
            mono = mono * g**e
        p += mono * rng.randint(-span, span)
    return RatFn(chart, p)


def random_field(rng, chart, degree=2):
    return VectorField(chart, [random_poly(rng, chart, degree) for _ in chart.coords])


def random_form(rng, chart, degree=2):
    return OneForm(chart, [random_poly(rng, chart, degree) for _ in chart.coords])


def random_point(rng, dim):
    return tuple(Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(dim))


@st.composite
def polys(draw, chart=XYZ, degree=3):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_poly(random.Random(seed), chart, degree)


@st.composite
def ratfns(draw, chart=XYZ):
    num = draw(polys(chart))
    den = draw(polys(chart, 2))
    if den.is_zero():
        den = chart.one()
    return num / den


# -- brute-force Gaussian elimination over Fractions (test oracle) -------------


def gauss_rank(rows):
    m = [list(map(Fraction, r)) for r in rows]
    rank, col = 0, 0
    ncols = len(m[0]) if m else 0
    while rank < len(m) and col < ncols:
        piv = next((i for i in range(rank, len(m)) if m[i][col] != 0), None)
        if piv is None:
            col += 1
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(len(m)):
            if i != rank and m[i][col] != 0:
                f = m[i][col] / m[rank][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
        rank += 1
        col += 1
    return rank


def gauss_kernel(rows, ncols):
    """Nullspace basis by elimination on the transpose-free system."""
    m = [list(map(Fraction, r)) for r in rows]
    pivots, r = [], 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        m[r] = [a / m[r][col] for a in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col] != 0:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
    basis = []
    for free in (c for c in range(ncols) if c not in pivots):
        v = [Fraction(0)] * ncols
        v[free] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -m[i][free]
        basis.append(v)
    return basis


def pair_vec(u, v):
    n = len(u) // 2
    return sum(u[i] * v[n + i] + u[n + i] * v[i] for i in range(n))


def orthogonal_oracle(vectors, dim2):
    """Pointwise orthogonal w.r.t. the Pontryagin pairing, as a basis."""
    n = dim2 // 2
    # <u, v> = 0 for all u in vectors  <=>  (u_alpha, u_x) . v = 0
    rows = [list(u[n:]) + list(u[:n]) for u in vectors]
    if not rows:
        return [[Fraction(int(i == j)) for j in range(dim2)] for i in range(dim2)]
    return gauss_kernel(rows, dim2)
