"""Partial and total derivatives on raw expression trees."""

from __future__ import annotations

from fractions import Fraction

from .nodes import (
    ONE,
    ZERO,
    Add,
    App,
    Expr,
    Mul,
    Num,
    Pow,
    Sym,
    add,
    free_symbols,
    jet,
    jet_index,
    mul,
    power,
)


class ProlongationOrderError(ValueError):
    """A total derivative would produce a jet above the permitted order."""


def diff(e: Expr, v: Sym) -> Expr:
    """Partial derivative treating every jet symbol as independent."""
    memo: dict = {}
    return _diff(e, v, memo)


def _diff(e: Expr, v: Sym, memo: dict) -> Expr:
    hit = memo.get(e)
    if hit is not None:
        return hit
    if isinstance(e, Num):
        r = ZERO
    elif isinstance(e, Sym):
        r = ONE if e == v else ZERO
    elif isinstance(e, Add):
        r = add(*(_diff(t, v, memo) for t in e.terms))
    elif isinstance(e, Mul):
        parts = []
        fs = e.factors
        for i, f in enumerate(fs):
            d = _diff(f, v, memo)
            if d == ZERO:
                continue
            parts.append(mul(*fs[:i], d, *fs[i + 1 :]))
        r = add(*parts)
    elif isinstance(e, Pow):
        d = _diff(e.base, v, memo)
        r = ZERO if d == ZERO else mul(Num(e.exp), power(e.base, e.exp - 1), d)
    elif isinstance(e, App):
        r = _diff_app(e, v, memo)
    else:
        raise TypeError(type(e).__name__)
    memo[e] = r
    return r


def _diff_app(e: App, v: Sym, memo: dict) -> Expr:
    if e.name == "sgn":
        return ZERO
    if e.is_builtin:
        w = e.args[0]
        d = _diff(w, v, memo)
        if d == ZERO:
            return ZERO
        if e.name == "exp":
            return mul(e, d)
        if e.name == "ln":
            return mul(d, power(w, -1))
        return mul(d, power(add(ONE, power(w, 2)), -1))  # arctan
    parts = []
    for i, a in enumerate(e.args):
        d = _diff(a, v, memo)
        if d == ZERO:
            continue
        orders = list(e.orders)
        orders[i] += 1
        parts.append(mul(App(e.name, e.args, tuple(orders)), d))
    return add(*parts)


def jets_in(e: Expr) -> list[Sym]:
    out = [s for s in free_symbols(e) if jet_index(s) is not None]
    out.sort(key=lambda s: (sum(jet_index(s)), s.name))
    return out


def total_diff(e: Expr, d: Sym, max_order: int = 2) -> Expr:
    """Total derivative ``D_t`` or ``D_x`` acting on a function of the jet."""
    if d.name not in ("t", "x"):
        raise ValueError(f"total derivative direction must be t or x, got {d.name}")
    terms = [diff(e, d)]
    for j in jets_in(e):
        dj = diff(e, j)
        if dj == ZERO:
            continue
        k, m = jet_index(j)
        k, m = (k + 1, m) if d.name == "t" else (k, m + 1)
        if k + m > max_order:
            raise ProlongationOrderError(
                f"D_{d.name} of {j.name} needs order {k + m} > {max_order}"
            )
        terms.append(mul(jet(k, m), dj))
    return add(*terms)


def total_diff_n(e: Expr, d: Sym, n: int, max_order: int = 2) -> Expr:
    for _ in range(n):
        e = total_diff(e, d, max_order)
    return e


def halves(x) -> Fraction:
    return Fraction(x, 2)
