import pytest
from hypothesis import given, settings, strategies as st

from conftest import nonzero_q, vector_fields
from lieheat.expr import T, U, U_X, X, App, Num, add, app, diff, is_zero, mul, normalize, power, sgn_
from lieheat.fields import (
    GENERIC_F,
    PointFieldError,
    VectorField,
    check_symmetry,
    commutator,
    determining_residual,
    generic_operator,
    invariance_residual,
    prolong2,
    split_by_jet_monomials,
)
from lieheat.parser import make_table, parse_equation, parse_field


def _eq(a, b, rules=()):
    return is_zero(add(a, mul(-1, b)), rules).value


def _sum3(a, b, c):
    return a + b + c


def field(text, tb=None):
    return parse_field(text, tb if tb is not None else make_table(permissive=True))


@pytest.mark.parametrize(
    "a, b, expected",
    [
        ("dt", "t*dt + 1/2*x*dx", "dt"),
        ("dx", "t*dx + du", "0"),
        ("dx", "x*du", "du"),
        ("t*dt + 1/2*x*dx", "-t^2*dt - t*x*dx + x^2*du", "-t^2*dt - t*x*dx + x^2*du"),
        ("u*du", "u^2*du", "u^2*du"),
    ],
)
def test_commutator_examples(a, b, expected):
    tb = make_table(permissive=True)
    assert commutator(field(a, tb), field(b, tb)).equals(field(expected, tb))


def test_point_field_rejects_jets():
    with pytest.raises(PointFieldError):
        VectorField(U_X, Num(0), Num(0))


@pytest.mark.parametrize(
    "q, F",
    [
        ("t*dx + du", "-u*u_x + G(u_x)"),
        ("dt", "F0(x,u,u_x)"),
        ("dx", "F0(t,u,u_x)"),
        ("du", "F0(t,x,u_x)"),
        ("2*t*dt + x*dx", "x^-2*G(x*u_x)"),
        ("2*t*dt + x*dx - 2*u*du", "u^2*G(x*u_x/u)"),
        ("u*du", "u_x^2/u + u*G(t, x)"),
    ],
)
def test_known_symmetries(q, F):
    tb = make_table(permissive=True)
    assert check_symmetry(field(q, tb), parse_equation(F, tb), tb.rule_tuple)


def test_residual_of_time_dependent_translation():
    tb = make_table(permissive=True)
    r = invariance_residual(field("alpha(t)*dx", tb), parse_equation("F0(t,u,u_x)", tb))
    assert _eq(r, mul(-1, App("alpha", (T,), (1,)), U_X))
    parts = split_by_jet_monomials(r)
    assert len(parts) == 1 and normalize(parts[0][0]) == Num(1)


def test_chart_selects_branch():
    tb = make_table(permissive=True)
    q = field("u*du", tb)
    F = parse_equation("abs(u_x)", tb)
    assert check_symmetry(q, F, tb.rule_tuple, {sgn_(U_X): Num(1)})
    assert check_symmetry(q, F, tb.rule_tuple, {sgn_(U_X): Num(-1)})
    assert not check_symmetry(field("x*du", tb), F, tb.rule_tuple, {sgn_(U_X): Num(1)})


def test_determining_residual_matches_generic_condition():
    """The generic residual equals f_t - u_x(a''x + b') + (f_u - 2a')F minus the
    right-hand side collecting F_t, F_x, F_u, F_{u_x} and the f second derivatives."""
    F = GENERIC_F
    a, b, f = app("a", (T,)), app("b", (T,)), app("f", (T, X, U))
    da, dda, db = App("a", (T,), (1,)), App("a", (T,), (2,)), App("b", (T,), (1,))
    lhs = add(diff(f, T), mul(-1, U_X, add(mul(dda, X), db)), mul(add(diff(f, U), mul(-2, da)), F))
    rhs = add(
        diff(diff(f, X), X),
        mul(2, U_X, diff(diff(f, X), U)),
        mul(power(U_X, 2), diff(diff(f, U), U)),
        mul(2, a, diff(F, T)),
        mul(add(mul(da, X), b), diff(F, X)),
        mul(f, diff(F, U)),
        mul(diff(f, X), diff(F, U_X)),
        mul(U_X, add(diff(f, U), mul(-1, da)), diff(F, U_X)),
    )
    assert _eq(determining_residual(), add(lhs, mul(-1, rhs)))


def test_generic_operator_shape():
    q = generic_operator()
    assert _eq(q.tau, mul(2, app("a", (T,))))


# ----------------------------------------------------------------- properties


@settings(max_examples=200)
@given(vector_fields(), vector_fields(), vector_fields())
def test_bracket_antisymmetry_and_jacobi(a, b, c):
    ab, ba = commutator(a, b), commutator(b, a)
    assert (ab + ba).is_zero()
    j = _sum3(
        commutator(a, commutator(b, c)),
        commutator(b, commutator(c, a)),
        commutator(c, commutator(a, b)),
    )
    assert j.is_zero()


@settings(max_examples=100)
@given(vector_fields(), vector_fields(), nonzero_q, nonzero_q)
def test_prolongation_is_linear(q1, q2, a, b):
    combo = q1.scaled(Num(a)) + q2.scaled(Num(b))
    p, p1, p2 = prolong2(combo), prolong2(q1), prolong2(q2)
    for attr in ("phi_t", "phi_x", "phi_xx"):
        expected = add(mul(a, getattr(p1, attr)), mul(b, getattr(p2, attr)))
        assert _eq(getattr(p, attr), expected)


@settings(max_examples=50)
@given(vector_fields(), vector_fields(), st.sampled_from(["u_x^2", "u*u_x", "exp(u)", "G(u_x)"]))
def test_residual_is_linear_in_the_field(q1, q2, F_text):
    tb = make_table(permissive=True)
    F = parse_equation(F_text, tb)
    r = invariance_residual(q1 + q2, F)
    assert _eq(r, add(invariance_residual(q1, F), invariance_residual(q2, F)))
