"""Coefficient extraction with respect to chosen variables."""

from __future__ import annotations

from .nodes import Expr, Sym, free_symbols, power, mul
from . import nf


class NonPolynomialError(ValueError):
    """The expression is not polynomial in the requested variables."""


def poly_coefficients(e: Expr, variables, rules: tuple = ()) -> dict[tuple, Expr]:
    """Map exponent tuples over ``variables`` to normalized coefficients."""
    variables = tuple(variables)
    vset = set(variables)
    r = nf.to_rat(e, rules)
    for (gens, ex) in r.den:
        for g, _ in gens:
            if free_symbols(g) & vset:
                raise NonPolynomialError(f"denominator depends on {_names(free_symbols(g) & vset)}")
        if ex is not None and free_symbols(ex) & vset:
            raise NonPolynomialError("denominator has an exponential in a split variable")
    groups: dict[tuple, dict] = {}
    for (gens, ex), c in r.num.items():
        exps = [0] * len(variables)
        rest = []
        for g, k in gens:
            if g in vset:
                if k < 0:
                    raise NonPolynomialError(f"negative power of {g.name}")
                exps[variables.index(g)] = k
            else:
                bad = free_symbols(g) & vset
                if bad:
                    raise NonPolynomialError(
                        f"non-polynomial dependence on {_names(bad)} through {g}"
                    )
                rest.append((g, k))
        if ex is not None and free_symbols(ex) & vset:
            raise NonPolynomialError("exponential of a split variable")
        groups.setdefault(tuple(exps), {})[(tuple(rest), ex)] = c
    out = {}
    for key in sorted(groups, key=lambda k: (-sum(k), tuple(-v for v in k))):
        coef = nf.canon(groups[key], r.den)
        out[key] = nf.to_expr(coef)
    return out


def _names(syms) -> str:
    return ", ".join(sorted(s.name for s in syms))


def monomial(variables, exps) -> Expr:
    return mul(*(power(v, k) for v, k in zip(variables, exps) if k))
