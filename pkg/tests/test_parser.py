from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conftest import exprs
from lieheat.expr import JET, T, U, U_X, X, App, Num, Sym, add, atoms, free_symbols, is_zero, mul, normalize, power, to_text
from lieheat.parser import (
    ParseError,
    make_table,
    parse_equation,
    parse_expr,
    parse_field,
    parse_rule,
    tokenize,
)


def table(**kw):
    return make_table(**kw)


def _eq(a, b, rules=()):
    return is_zero(add(a, mul(-1, b)), rules).value


@pytest.mark.parametrize(
    "text, expected",
    [
        ("1 + 2*3", Num(7)),
        ("2^3^2", Num(512)),
        ("-2^2", Num(-4)),
        ("(-2)^2", Num(4)),
        ("0.5", Num(Fraction(1, 2))),
        ("1/2 + 1/3", Num(Fraction(5, 6))),
        ("2**3", Num(8)),
        ("|-3|", Num(3)),
    ],
)
def test_precedence_and_numbers(text, expected):
    assert parse_expr(text) == expected


def test_variables_and_jets():
    e = parse_expr("t*x + u*u_x + u_xx")
    assert {s.name for s in free_symbols(e)} == {"t", "x", "u", "u_x", "u_xx"}
    assert Sym("u_xx", JET) in free_symbols(e)


def test_declared_atom_and_prime():
    tb = table(atoms=["alpha(t)"])
    e = parse_expr("alpha'(t) + alpha''(t)", tb)
    assert App("alpha", (T,), (1,)) in atoms(e)
    assert _eq(e, add(App("alpha", (T,), (1,)), App("alpha", (T,), (2,))))


def test_bare_atom_name_uses_template():
    tb = table(atoms=["G(w)"])
    assert parse_expr("G", tb).name == "G"
    e = parse_expr("G(x*u_x)", tb)
    assert isinstance(e, App) and e.args == (normalize(mul(X, U_X)),)


def test_derivative_syntax():
    tb = table(atoms=["F(t,x)"])
    e = parse_expr("D[F, 0, 2](t, x)", tb)
    assert e == App("F", (T, X), (0, 2))


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("t +", "unexpected end of input"),
        ("(t + x", "missing ')'"),
        ("t + x)", "unexpected ')'"),
        ("t $ x", "unexpected character"),
        ("1/0", "division by zero"),
        ("lam*t", "undeclared identifier 'lam'"),
        ("sin(t)", "undeclared identifier 'sin'"),
        ("exp(t, x)", "takes one argument"),
    ],
)
def test_errors_carry_message_and_span(text, fragment):
    with pytest.raises(ParseError) as info:
        parse_expr(text)
    assert fragment in str(info.value)
    if info.value.span is not None:
        assert "^" in info.value.pretty()


def test_undeclared_name_suggests_close_match():
    with pytest.raises(ParseError, match="did you mean lam"):
        parse_expr("lma*t", table(params=["lam"]))


def test_permissive_table_declares_atoms_and_params():
    tb = make_table(permissive=True)
    e = parse_expr("G(u_x) + lam*t", tb)
    assert "G" in tb.atoms and "lam" in tb.params
    assert _eq(e, parse_expr("lam*t + G(u_x)", tb))


def test_atom_arity_is_enforced():
    with pytest.raises(ParseError, match="expects 1 argument"):
        parse_expr("G(t, x)", table(atoms=["G(w)"]))


def test_parse_equation_forms():
    tb = make_table(permissive=True)
    F1 = parse_equation("u_t = u_xx + u*u_x", tb)
    F2 = parse_equation("u*u_x", tb)
    assert _eq(F1, F2)
    with pytest.raises(ParseError):
        parse_equation("u_x = u_xx", tb)


@pytest.mark.parametrize(
    "text, comps",
    [
        ("dt", ("1", "0", "0")),
        ("t*dt + 1/2*x*dx", ("t", "1/2*x", "0")),
        ("-t^2*dt - t*x*dx + x^2*du", ("-t^2", "-t*x", "x^2")),
        ("(t + x)*(dx + du)", ("0", "t + x", "t + x")),
    ],
)
def test_parse_field(text, comps):
    q = parse_field(text)
    for c, ref in zip(q.components, comps):
        assert _eq(c, parse_expr(ref))


@pytest.mark.parametrize("text", ["dt*dx", "dt + 1", "u_x*dt", "exp(dt)"])
def test_parse_field_rejects_non_fields(text):
    with pytest.raises((ParseError, ValueError)):
        parse_field(text)


def test_rewrite_rule_applies_to_higher_derivatives():
    tb = table(atoms=["g(t,x)"])
    rule = parse_rule("D[g, 1, 0](t, x) -> D[g, 0, 2](t, x)", tb)
    tb.rules.append(rule)
    e = parse_expr("D[g, 1, 0](t, x) - D[g, 0, 2](t, x)", tb)
    assert is_zero(e, tb.rule_tuple).value
    e2 = parse_expr("D[g, 1, 1](t, x) - D[g, 0, 3](t, x)", tb)
    assert is_zero(e2, tb.rule_tuple).value


def test_tokenizer_tracks_lines():
    toks = tokenize("t +\n  x")
    assert [t.span.line for t in toks if t.kind != "end"] == [1, 1, 2]


@settings(max_examples=100)
@given(exprs((T, X, U, U_X), max_leaves=7))
def test_printed_text_reparses_to_same_value(e):
    n = normalize(e)
    assert _eq(parse_expr(to_text(n), make_table(permissive=True)), n)


@given(st.integers(-50, 50), st.integers(1, 12))
def test_rational_literals(p, q):
    assert parse_expr(f"{p}/{q}") == Num(Fraction(p, q))
    assert parse_expr(f"({p})/({q})*t") == normalize(mul(Fraction(p, q), T))


@given(st.sampled_from(["t", "x", "u", "u_x"]), st.integers(-3, 4))
def test_power_literals(v, k):
    e = parse_expr(f"{v}^({k})")
    s = parse_expr(v)
    assert e == normalize(power(s, k))
