import random

from hypothesis import given
from hypothesis import strategies as st

from conftest import XY, gauss_kernel, gauss_rank, random_point, random_poly
from diracred import linalg

small = st.fractions(min_value=-5, max_value=5, max_denominator=3)


def matrices(max_rows=5, max_cols=5):
    return st.integers(1, max_cols).flatmap(
        lambda c: st.lists(st.lists(small, min_size=c, max_size=c), min_size=1, max_size=max_rows).map(
            lambda rows: (rows, c)
        )
    )


@given(matrices())
def test_rank_matches_oracle(mc):
    rows, c = mc
    assert linalg.rank_q(rows, c) == gauss_rank(rows)


@given(matrices())
def test_kernel_is_kernel_of_full_dimension(mc):
    rows, c = mc
    ker = linalg.kernel_q(rows, c)
    assert len(ker) == c - gauss_rank(rows)
    for v in ker:
        assert all(sum(a * b for a, b in zip(r, v)) == 0 for r in rows)
    assert len(ker) == len(gauss_kernel(rows, c))
    if ker:
        assert gauss_rank(ker) == len(ker)


@given(matrices(), st.lists(small, min_size=5, max_size=5))
def test_solve_q(mc, coeffs):
    rows, c = mc
    cols = [list(r) for r in rows]  # treat rows as columns of the system
    target = [sum(k * col[i] for k, col in zip(coeffs, cols)) for i in range(c)]
    sol = linalg.solve_q(cols, target)
    assert sol is not None
    assert [sum(k * col[i] for k, col in zip(sol, cols)) for i in range(c)] == target


def test_solve_q_inconsistent():
    assert linalg.solve_q([[1, 0]], [0, 1]) is None


def test_same_span_and_containment():
    a = [[1, 2, 0], [0, 1, 1]]
    b = [[1, 3, 1], [1, 1, -1]]
    assert linalg.same_span_q(a, b, 3)
    assert linalg.span_contains_q(a, [[2, 5, 1]])
    assert not linalg.span_contains_q(a, [[0, 0, 1]])


def _random_generic(rng, nrows, ncols, rank):
    # product of random polynomial factors: generic rank <= rank
    left = [[random_poly(rng, XY, 1) for _ in range(rank)] for _ in range(nrows)]
    right = [[random_poly(rng, XY, 1) for _ in range(ncols)] for _ in range(rank)]
    return [
        [sum((left[i][k] * right[k][j] for k in range(rank)), XY.zero()) for j in range(ncols)]
        for i in range(nrows)
    ]


def test_generic_rank_and_kernel_against_pointwise_oracle():
    rng = random.Random(3)
    for trial in range(25):
        nrows, ncols = rng.randint(1, 4), rng.randint(1, 4)
        rows = _random_generic(rng, nrows, ncols, rng.randint(1, min(nrows, ncols)))
        r = linalg.rank_generic(rows, XY, ncols)
        pts = [random_point(rng, 2) for _ in range(6)]
        # generic rank bounds every pointwise rank and is attained at random points
        ranks = [gauss_rank([[f.evaluate(p) for f in row] for row in rows]) for p in pts]
        assert max(ranks) == r
        ker = linalg.kernel_generic(rows, XY, ncols)
        assert len(ker) == ncols - r
        for v in ker:
            for row in rows:
                assert sum((a * b for a, b in zip(row, v)), XY.zero()).is_zero()


def test_solve_generic_reports_residual():
    x, y = XY.coord("x"), XY.coord("y")
    sol, bad = linalg.solve_generic([[x, y]], [y, x * y], XY)
    assert sol is None and not bad[1].is_zero()
    sol, bad = linalg.solve_generic([[x, y]], [x * x / y, x], XY)
    assert bad is None and sol[0] == x / y
