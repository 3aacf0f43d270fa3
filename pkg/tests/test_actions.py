import random
from fractions import Fraction

import numpy as np
import pytest

from conftest import XYZ, random_field, random_form, random_point, random_poly
from diracred.actions import (
    GroupAction,
    InvariantBasis,
    average,
    average_quadrature,
    descending_tangent,
    fundamental_fields,
    invariant_codistribution,
    invariant_tangent,
    is_descending,
    is_invariant,
    vertical_distribution,
)
from diracred.calculus import OneForm, Section, VectorField, exterior_derivative_fn, lie_bracket
from diracred.distributions import eval_at, membership_generic
from diracred.errors import GeneratorMismatch, NotInvariant, UnsupportedAction
from diracred.exprcore import Chart, parse_expr

SIX = Chart("R3xR3", ("x1", "y1", "z1", "x2", "y2", "z2"))


def P(t, chart=XYZ):
    return parse_expr(t, chart)


def V(*c, chart=XYZ):
    return VectorField(chart, list(c) + ["0"] * (chart.dim - len(c)))


@pytest.fixture(scope="module")
def circle():
    return GroupAction(XYZ, "circle", [["-y", "x", "0"]])


@pytest.fixture(scope="module")
def so3():
    return GroupAction(
        SIX,
        "so3",
        [
            ["0", "-z1", "y1", "0", "-z2", "y2"],
            ["z1", "0", "-x1", "z2", "0", "-x2"],
            ["-y1", "x1", "0", "-y2", "x2", "0"],
        ],
    )


def test_fundamental_fields(circle, so3):
    (xi,) = fundamental_fields(circle)
    assert xi == V("-y", "x")
    # same line as y d/dx - x d/dy
    assert xi == -V("y", "-x")
    x5 = VectorField(SIX, ["-y1", "x1", "0", "-y2", "x2", "0"])
    assert x5 in fundamental_fields(so3)
    assert fundamental_fields(GroupAction(XYZ, "trivial")) == []


def test_action_map_matches_generators(circle):
    # d/dt of the action map at t = 0 reproduces the generator
    for c in XYZ.coords:
        b = circle.bindings[c]
        assert b.at_zero() == P(c)
    assert VectorField(XYZ, [circle.bindings[c].diff("t").at_zero() for c in XYZ.coords]) == V("-y", "x")


def test_vertical_distribution(circle, so3):
    vg = vertical_distribution(circle)
    assert eval_at(vg, (1, 0, 0)).rank == 1
    assert eval_at(vg, (0, 0, 5)).rank == 0
    assert eval_at(vertical_distribution(so3), (0, 0, 1, 0, 0, 1)).rank == 2
    assert eval_at(vertical_distribution(so3), (0, 0, 1, 1, 0, 0)).rank == 3
    assert len(vertical_distribution(GroupAction(XYZ, "trivial"))) == 0


def test_is_invariant(circle):
    assert is_invariant(V("0", "0", "1"), circle)
    cert = is_invariant(P("x"), circle)
    assert not cert and cert.residuals[0][1] == P("-y")
    assert is_invariant(OneForm(XYZ, ["x", "y", "0"]), circle)


def test_is_descending(circle, so3):
    assert is_descending(V("x", "y"), circle)
    assert is_descending(V("y", "-x"), circle)
    assert not is_descending(V("1"), circle)
    for xi in so3.liegen:
        assert is_descending(xi, so3)
        for eta in so3.liegen:
            assert membership_generic(Section.tangent(lie_bracket(xi, eta)), vertical_distribution(so3))


def test_average_examples(circle):
    assert average(V("1"), circle).is_zero()
    assert average(V("x", "y"), circle) == V("x", "y")
    assert average(P("x^2"), circle) == P("(x^2 + y^2)/2")
    assert average(OneForm(XYZ, ["1", "0", "0"]), circle).is_zero()


def test_average_rational_input_with_invariant_denominator(circle):
    assert average(P("x^2/(x^2 + y^2 + 1)"), circle) == P("(x^2 + y^2)/(2*(x^2 + y^2 + 1))")


def test_average_idempotent_linear_invariant(circle):
    rng = random.Random(6)
    for _ in range(100):
        u, v = random_field(rng, XYZ, 3), random_field(rng, XYZ, 3)
        a, b = Fraction(rng.randint(-4, 4), rng.randint(1, 3)), Fraction(rng.randint(-4, 4), 1)
        au = average(u, circle)
        assert average(au, circle) == au
        assert is_invariant(au, circle)
        assert average(u * a + v * b, circle) == au * a + average(v, circle) * b


def test_average_forms_and_functions_are_invariant(circle):
    rng = random.Random(9)
    for _ in range(20):
        f = random_poly(rng, XYZ, 3)
        a = random_form(rng, XYZ, 2)
        assert is_invariant(average(f, circle), circle)
        assert is_invariant(average(a, circle), circle)


def test_circle_average_against_quadrature(circle):
    rng = random.Random(4)
    for _ in range(10):
        x = random_field(rng, XYZ, 2)
        p = random_point(rng, 3)
        exact = np.array([float(c) for c in average(x, circle).evaluate(p)])
        assert np.max(np.abs(exact - average_quadrature(x, circle, p))) < 1e-9


def test_so3_average_against_quadrature(so3):
    rng = random.Random(12)
    objs = [random_field(rng, SIX, 2) for _ in range(3)] + [random_form(rng, SIX, 1) for _ in range(2)]
    objs += [random_poly(rng, SIX, 2)]
    for k in range(10):
        obj = objs[k % len(objs)]
        p = random_point(rng, 6)
        exact = average(obj, so3, certify=True)
        if isinstance(exact, VectorField) or isinstance(exact, OneForm):
            ev = np.array([float(c) for c in exact.evaluate(p)])
        else:
            ev = float(exact.evaluate(p))
        assert np.max(np.abs(ev - average_quadrature(obj, so3, p, order=12))) < 1e-9


def test_invariant_codistribution(circle, so3):
    b = InvariantBasis(circle, [P("x^2 + y^2"), P("z")])
    d = invariant_codistribution(b)
    assert [s.alpha for s in d.generators] == [OneForm(XYZ, ["2*x", "2*y", "0"]), OneForm(XYZ, ["0", "0", "1"])]
    fs = [parse_expr(t, SIX) for t in ("x1^2 + y1^2 + z1^2", "x2^2 + y2^2 + z2^2", "x1*x2 + y1*y2 + z1*z2")]
    d3 = invariant_codistribution(InvariantBasis(so3, fs))
    for s in d3.generators:
        for xi in so3.liegen:
            assert s.alpha(xi).is_zero()
    assert [s.alpha for s in d3.generators] == [exterior_derivative_fn(f) for f in fs]
    assert len(invariant_codistribution(InvariantBasis(circle, []))) == 0


def test_invariant_basis_rejects_non_invariant(circle):
    with pytest.raises(NotInvariant):
        InvariantBasis(circle, [P("x")])


def test_descending_tangent(circle):
    t = descending_tangent(circle, [V("0", "0", "1"), V("x", "y")])
    assert eval_at(t, (0, 0, 1)).rank == 1
    assert eval_at(t, (1, 2, 0)).rank == 3
    assert eval_at(invariant_tangent(circle, [V("0", "0", "1"), V("x", "y")]), (1, 2, 0)).rank == 2
    with pytest.raises(NotInvariant):
        descending_tangent(circle, [V("1")])
    line = Chart("L", ("x",))
    t1 = descending_tangent(GroupAction(line, "trivial"), [VectorField(line, ["1"])])
    assert eval_at(t1, (3,)).rank == 1


def test_so3_descending_tangent_full_rank_at_generic_pair(so3):
    from diracred.scenes import builtin

    scene = builtin("so3_r3r3")
    t = descending_tangent(so3, scene.declared_invariant_fields)
    assert eval_at(t, (1, 2, 3, -1, 0, 2)).rank == 6
    # parallel pairs form a 4-dimensional orbit type: common line (2) and two lengths
    assert eval_at(t, (0, 0, 1, 0, 0, 2)).rank == 4


@pytest.mark.parametrize(
    "kind, gens, err",
    [
        ("circle", [], GeneratorMismatch),
        ("circle", [["-y", "x", "0"], ["0", "-z", "y"]], GeneratorMismatch),
        ("circle", [["x", "0", "0"]], UnsupportedAction),
        ("circle", [["x^2", "0", "0"]], UnsupportedAction),
        ("torus", [["-y", "x", "0"], ["0", "-z", "y"]], UnsupportedAction),
    ],
)
def test_rejected_actions(kind, gens, err):
    with pytest.raises(err):
        GroupAction(XYZ, kind, gens)


def _expm(a, terms=60):
    out, term = np.eye(a.shape[0]), np.eye(a.shape[0])
    for k in range(1, terms):
        term = term @ a / k
        out = out + term
    return out


def test_symbolic_action_matrix_matches_numeric_exponential(so3):
    lx, _, lz = (np.array([[float(v) for v in row] for row in m]) for m in so3.matrices)
    rng = random.Random(1)
    for _ in range(5):
        al, be, ga = (rng.uniform(0, 6) for _ in range(3))
        want = _expm(al * lz) @ _expm(be * lx) @ _expm(ga * lz)
        assert np.max(np.abs(so3.matrix_float([al, be, ga]) - want)) < 1e-12
