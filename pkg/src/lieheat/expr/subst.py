"""Simultaneous substitution of symbols, atom applications and atom definitions."""

from __future__ import annotations

from dataclasses import dataclass

from .calculus import diff
from .nodes import Add, App, Expr, Mul, Num, Pow, Sym, add, as_expr, mul, power
from . import nf


@dataclass(frozen=True)
class Lambda:
    """An explicit definition ``name(params) = body`` for an arbitrary atom."""

    params: tuple
    body: Expr

    def apply(self, args: tuple, orders: tuple) -> Expr:
        body = self.body
        for p, k in zip(self.params, orders):
            for _ in range(k):
                body = diff(body, p)
        if tuple(args) == tuple(self.params):
            return body
        return _subst(body, {p: a for p, a in zip(self.params, args)}, {}, {}, {})


def substitute(e: Expr, bindings: dict, rules: tuple = (), normal: bool = True) -> Expr:
    """Replace symbols, atom applications or whole atoms in one pass.

    Keys may be ``Sym`` (symbol or jet variable), ``App`` (a specific atom
    application, matched after normalizing its arguments) or ``str`` (an atom
    name bound to a ``Lambda`` or to a constant expression).
    """
    syms, apps, names = {}, {}, {}
    for k, v in bindings.items():
        if isinstance(k, Sym):
            syms[k] = as_expr(v)
        elif isinstance(k, App):
            apps[nf.normalize(k, rules)] = as_expr(v)
        elif isinstance(k, str):
            names[k] = v if isinstance(v, Lambda) else as_expr(v)
        else:
            raise TypeError(f"unsupported binding key {k!r}")
    out = _subst(e, syms, apps, names, {}, rules)
    return nf.normalize(out, rules) if normal else out


def _subst(e: Expr, syms: dict, apps: dict, names: dict, memo: dict, rules: tuple = ()) -> Expr:
    hit = memo.get(e)
    if hit is not None:
        return hit
    if isinstance(e, Num):
        r = e
    elif isinstance(e, Sym):
        r = syms.get(e, e)
    elif isinstance(e, Add):
        r = add(*(_subst(t, syms, apps, names, memo, rules) for t in e.terms))
    elif isinstance(e, Mul):
        r = mul(*(_subst(f, syms, apps, names, memo, rules) for f in e.factors))
    elif isinstance(e, Pow):
        r = power(_subst(e.base, syms, apps, names, memo, rules), e.exp)
    elif isinstance(e, App):
        args = tuple(_subst(a, syms, apps, names, memo, rules) for a in e.args)
        r = App(e.name, args, e.orders)
        if apps:
            key = nf.normalize(r, rules) if not r.is_builtin or r.name == "sgn" else None
            if key is not None and key in apps:
                r = apps[key]
        if isinstance(r, App) and r.name in names:
            v = names[r.name]
            if isinstance(v, Lambda):
                r = v.apply(r.args, r.orders)
            else:
                r = v if not any(r.orders) else Num(0)
    else:
        raise TypeError(type(e).__name__)
    memo[e] = r
    return r
