"""Exact evaluation at seeded random points, independent of the polynomial engine.

Generators get random rational values and sign symbols get random signs.
Exponentials are modelled as group-ring elements ``c * X^(v, s)``. Here ``v`` collects
fractional coefficients of canonical logarithms and ``s`` is the rational value
of the remaining exponent, so ``exp`` of non-rational quantities stays exact.
Only generator canonicalization is shared with the normal form. All sums,
products and quotients of the tree are evaluated here without it.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction

from .nodes import Add, App, Expr, Mul, Num, Pow, Sym, is_sign
from . import nf


class NumericUnavailable(Exception):
    """The expression cannot be evaluated in the exact model at this point."""


class _GR:
    """Fraction of two group-ring elements. Keys are (log-vector, scalar)."""

    __slots__ = ("num", "den")

    def __init__(self, num: dict, den: dict | None = None):
        self.num = num
        self.den = den if den is not None else {((), Fraction(0)): Fraction(1)}


_UNIT_KEY = ((), Fraction(0))


class Point:
    def __init__(self, rng: random.Random, rules: tuple):
        self.rng = rng
        self.rules = rules
        self.values: dict = {}

    def value(self, g: Expr) -> Fraction:
        v = self.values.get(g)
        if v is None:
            if is_sign(g):
                v = Fraction(self.rng.choice((-1, 1)))
            else:
                n = 0
                while n == 0:
                    n = self.rng.randint(-997, 997)
                v = Fraction(n, self.rng.randint(1, 61))
            self.values[g] = v
        return v


def _as_gr(v) -> _GR:
    if isinstance(v, _GR):
        return v
    return _GR({_UNIT_KEY: Fraction(v)} if v else {})


def _gr_add(a: dict, b: dict, sign=1) -> dict:
    r = dict(a)
    for k, c in b.items():
        s = r.get(k, 0) + sign * c
        if s:
            r[k] = s
        else:
            r.pop(k, None)
    return r


def _reduce_key(vec: dict, scalar: Fraction, pt: Point):
    coef = Fraction(1)
    out = []
    for L, c in vec.items():
        base = L.args[0]
        f = math.floor(c)
        if f:
            coef *= _base_value(base, pt) ** f
        if c - f:
            out.append((L, c - f))
    out.sort(key=lambda it: nf.expr_key(it[0]))
    return coef, (tuple(out), scalar)


def _base_value(base: Expr, pt: Point) -> Fraction:
    if isinstance(base, Num):
        return base.value
    if isinstance(base, (Sym, App)) and not (isinstance(base, App) and base.name == "exp"):
        return pt.value(base)
    v = evaluate(base, pt)
    if isinstance(v, _GR):
        raise NumericUnavailable("logarithm base involves exponentials")
    return v


def _gr_mul(a: dict, b: dict, pt: Point) -> dict:
    r: dict = {}
    for (v1, s1), c1 in a.items():
        for (v2, s2), c2 in b.items():
            if not v1:
                vec = dict(v2)
            elif not v2:
                vec = dict(v1)
            else:
                vec = dict(v1)
                for L, c in v2:
                    vec[L] = vec.get(L, 0) + c
            k, key = _reduce_key(vec, s1 + s2, pt)
            s = r.get(key, 0) + c1 * c2 * k
            if s:
                r[key] = s
            else:
                r.pop(key, None)
    return r


def _simplify(g: _GR, pt: Point):
    if not g.num:
        return Fraction(0)
    if len(g.den) == 1:
        (key, c), = g.den.items()
        if key != _UNIT_KEY:
            (vec, s) = key
            inv_vec = {L: -c2 for L, c2 in vec}
            k, ikey = _reduce_key(inv_vec, -s, pt)
            num = _gr_mul(g.num, {ikey: k / c}, pt)
        else:
            num = {kk: v / c for kk, v in g.num.items()}
        if len(num) == 1 and _UNIT_KEY in num:
            return num[_UNIT_KEY]
        if not num:
            return Fraction(0)
        return _GR(num)
    return g


def _add(a, b, pt):
    if not isinstance(a, _GR) and not isinstance(b, _GR):
        return a + b
    a, b = _as_gr(a), _as_gr(b)
    if a.den == b.den:
        return _simplify(_GR(_gr_add(a.num, b.num), a.den), pt)
    num = _gr_add(_gr_mul(a.num, b.den, pt), _gr_mul(b.num, a.den, pt))
    return _simplify(_GR(num, _gr_mul(a.den, b.den, pt)), pt)


def _mul(a, b, pt):
    if not isinstance(a, _GR) and not isinstance(b, _GR):
        return a * b
    a, b = _as_gr(a), _as_gr(b)
    return _simplify(_GR(_gr_mul(a.num, b.num, pt), _gr_mul(a.den, b.den, pt)), pt)


def _inv(a, pt):
    if not isinstance(a, _GR):
        if a == 0:
            raise ZeroDivisionError
        return 1 / a
    if not a.num:
        raise ZeroDivisionError
    return _simplify(_GR(a.den, a.num), pt)


def _pow_int(a, n: int, pt):
    if n < 0:
        return _pow_int(_inv(a, pt), -n, pt)
    if not isinstance(a, _GR):
        return a**n
    out = Fraction(1)
    for _ in range(n):
        out = _mul(out, a, pt)
    return out


def _exp_value(E: nf.Rat, pt: Point):
    pure, rest = nf._pure_logs(E)
    s = evaluate(nf.to_expr(rest), pt) if not rest.is_zero() else Fraction(0)
    if isinstance(s, _GR):
        raise NumericUnavailable("nested exponential")
    k, key = _reduce_key(dict(pure), s, pt)
    if key == _UNIT_KEY:
        return k
    return _GR({key: k})


def evaluate(e: Expr, pt: Point, memo: dict | None = None):
    if memo is None:
        memo = {}
    hit = memo.get(id(e))
    if hit is not None:
        return hit[1]
    v = _eval(e, pt, memo)
    memo[id(e)] = (e, v)
    return v


def _eval(e: Expr, pt: Point, memo: dict):
    rules = pt.rules
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Sym):
        return pt.value(e)
    if isinstance(e, Add):
        acc = Fraction(0)
        for t in e.terms:
            acc = _add(acc, evaluate(t, pt, memo), pt)
        return acc
    if isinstance(e, Mul):
        acc = Fraction(1)
        for f in e.factors:
            acc = _mul(acc, evaluate(f, pt, memo), pt)
        return acc
    if isinstance(e, Pow):
        if e.exp.denominator == 1:
            return _pow_int(evaluate(e.base, pt, memo), int(e.exp), pt)
        return _exp_value(nf.rat_scale(nf.rat_ln(nf.to_rat(e.base, rules)), e.exp), pt)
    if isinstance(e, App):
        if e.name == "exp":
            return _exp_value(nf.to_rat(e.args[0], rules), pt)
        if e.name in ("ln", "sgn", "arctan"):
            return _eval_generators(nf.to_rat(e, rules), pt)
        args = tuple(nf.normalize(a, rules) for a in e.args)
        a = App(e.name, args, e.orders)
        for rule in rules:
            extra = rule.match(a)
            if extra is not None:
                from .calculus import diff

                rep = rule.replacement
                for var, d in zip(rule.args, extra):
                    for _ in range(d):
                        rep = diff(rep, var)
                return evaluate(rep, pt, memo)
        return pt.value(a)
    raise TypeError(type(e).__name__)


def _eval_poly(p: dict, pt: Point):
    acc = Fraction(0)
    for (gens, ex), c in p.items():
        term = c
        for g, k in gens:
            term = _mul(term, _pow_int(pt.value(g), k, pt), pt)
        if ex is not None:
            term = _mul(term, _exp_value(nf.to_rat(ex), pt), pt)
        acc = _add(acc, term, pt)
    return acc


def _eval_generators(r: nf.Rat, pt: Point):
    """Evaluate a canonical generator expansion (logarithm, sign or arctan)."""
    v = _eval_poly(r.num, pt)
    if not nf._is_one(r.den):
        v = _mul(v, _inv(_eval_poly(r.den, pt), pt), pt)
    return v


def is_numeric_zero(v) -> bool:
    if isinstance(v, _GR):
        return not v.num
    return v == 0


def sample_values(e: Expr, rules: tuple, seed: int, samples: int) -> list:
    """Values of ``e`` at ``samples`` seeded points (poles are resampled)."""
    out = []
    attempt = 0
    while len(out) < samples:
        if attempt > 4 * samples + 10:
            raise NumericUnavailable("too many singular sample points")
        pt = Point(random.Random(f"{seed}:{attempt}"), rules)
        attempt += 1
        try:
            out.append(evaluate(e, pt))
        except ZeroDivisionError:
            continue
    return out
