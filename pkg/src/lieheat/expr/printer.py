"""Text rendering in the same grammar the parser accepts."""

from __future__ import annotations

from fractions import Fraction

from .nodes import Add, App, Expr, Mul, Num, Pow, Sym

# precedence levels
P_ADD, P_MUL, P_NEG, P_POW, P_ATOM = 1, 2, 3, 4, 5


def _frac(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def to_text(e: Expr) -> str:
    return _render(e)[0]


def _wrap(text_prec: tuple[str, int], need: int) -> str:
    text, prec = text_prec
    return f"({text})" if prec < need else text


def _render(e: Expr) -> tuple[str, int]:
    if isinstance(e, Num):
        v = e.value
        if v < 0:
            return ("-" + _frac(-v), P_NEG if v.denominator == 1 else P_NEG)
        return (_frac(v), P_ATOM if v.denominator == 1 else P_MUL)
    if isinstance(e, Sym):
        return (e.name, P_ATOM)
    if isinstance(e, App):
        return (_render_app(e), P_ATOM)
    if isinstance(e, Pow):
        if e.exp < 0:
            inner = Pow(e.base, -e.exp) if e.exp != -1 else e.base
            return ("1/" + _wrap(_render(inner), P_POW), P_MUL)
        base = _wrap(_render(e.base), P_ATOM)
        ex = e.exp
        ex_s = _frac(ex) if ex.denominator == 1 and ex > 0 else f"({_frac(ex)})"
        return (f"{base}^{ex_s}", P_POW)
    if isinstance(e, Add):
        out = ""
        for i, t in enumerate(e.terms):
            s, p = _render(t)
            if i == 0:
                out = s if p >= P_ADD else f"({s})"
            elif s.startswith("-") and p >= P_NEG:
                out += " - " + s[1:]
            else:
                out += " + " + (s if p > P_ADD else f"({s})")
        return (out, P_ADD)
    if isinstance(e, Mul):
        return _render_mul(e)
    raise TypeError(type(e).__name__)


def _render_mul(e: Mul) -> tuple[str, int]:
    coef = Fraction(1)
    numer, denom = [], []
    for f in e.factors:
        if isinstance(f, Num):
            coef *= f.value
        elif isinstance(f, Pow) and f.exp < 0:
            denom.append(f.base if f.exp == -1 else Pow(f.base, -f.exp))
        else:
            numer.append(f)
    sign = "-" if coef < 0 else ""
    coef = abs(coef)
    parts = []
    if coef.numerator != 1 or not numer:
        parts.append(str(coef.numerator))
    parts += [_wrap(_render(f), P_MUL + 1 if isinstance(f, Mul) else P_MUL) for f in numer]
    text = "*".join(parts)
    dens = []
    if coef.denominator != 1:
        dens.append(str(coef.denominator))
    dens += [_wrap(_render(f), P_POW) for f in denom]
    if dens:
        dtext = dens[0] if len(dens) == 1 else "(" + "*".join(dens) + ")"
        text = f"{text}/{dtext}"
    if sign:
        return (sign + text, P_NEG)
    return (text, P_MUL)


def _render_app(e: App) -> str:
    args = ", ".join(_render(a)[0] for a in e.args)
    if not any(e.orders):
        return f"{e.name}({args})"
    if (
        len(e.args) == 1
        and e.args[0] == Sym("t")
        and e.orders[0] <= 3
    ):
        return f"{e.name}{chr(39) * e.orders[0]}(t)"
    orders = ", ".join(str(o) for o in e.orders)
    return f"D[{e.name}, {orders}]({args})"
