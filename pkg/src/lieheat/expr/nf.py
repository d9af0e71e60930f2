"""Canonical rational normal form.

An expression is mapped to ``Rat(num, den)``. Both parts are sparse polynomials
over *generators* (symbols and atom applications with normalized arguments).
Every monomial may carry one exponential factor ``exp(E)`` whose argument is
itself a normalized expression. Numerators are Laurent polynomials; the
denominator is either ``1`` or a polynomial with no monomial content whose
leading term is a bare monomial with coefficient one, coprime to the numerator.

Logarithms are expanded (``ln(c*x^k*P) = ln c + k ln x + ln P``), sign symbols
satisfy ``s^2 = 1`` and non-integer powers become ``exp(r ln b)``. Inside an
exponential, terms ``r ln g`` with rational ``r`` keep only the fractional part
of ``r``; the integer part is pulled out as an ordinary power of ``g``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

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
    KINDS,
    add,
    is_sign,
    mul,
)

# ---------------------------------------------------------------- ordering


_KEY_CACHE: dict = {}


def expr_key(e: Expr):
    """A total order on expressions, used for deterministic output."""
    k = _KEY_CACHE.get(e)
    if k is not None:
        return k
    if isinstance(e, Num):
        k = (0, e.value)
    elif isinstance(e, Sym):
        k = (1, KINDS.index(e.kind), e.name)
    elif isinstance(e, App):
        k = (2, e.name, e.orders, tuple(expr_key(a) for a in e.args))
    elif isinstance(e, Add):
        k = (3, tuple(expr_key(t) for t in e.terms))
    elif isinstance(e, Mul):
        k = (4, tuple(expr_key(f) for f in e.factors))
    else:
        k = (5, expr_key(e.base), e.exp)
    if len(_KEY_CACHE) > 200_000:
        _KEY_CACHE.clear()
    _KEY_CACHE[e] = k
    return k


def _mono_key(m):
    gens, ex = m
    deg = sum(k for g, k in gens if not is_sign(g))
    return (
        -deg,
        tuple((expr_key(g), -k) for g, k in gens),
        () if ex is None else expr_key(ex),
    )


def _core_key(m):
    gens, _ = m
    return (
        -sum(k for g, k in gens if not is_sign(g)),
        tuple((expr_key(g), -k) for g, k in gens if not is_sign(g)),
    )


# ----------------------------------------------------------- rewrite rules


@dataclass(frozen=True)
class RewriteRule:
    """Replace ``name`` differentiated ``orders`` times by ``replacement``.

    Higher derivatives of the pattern are rewritten by differentiating the
    replacement with respect to the template arguments ``args``.
    """

    name: str
    args: tuple
    orders: tuple
    replacement: Expr
    source: str = ""

    def match(self, a: App) -> tuple | None:
        if a.name != self.name or a.args != self.args:
            return None
        extra = tuple(o - p for o, p in zip(a.orders, self.orders))
        if any(d < 0 for d in extra):
            return None
        return extra


# --------------------------------------------------------------- monomials

Mono = tuple  # (gens: tuple[(Expr, int)], ex: Expr | None)
UNIT_MONO: Mono = ((), None)
ONE_POLY = {UNIT_MONO: Fraction(1)}


def _merge_gens(g1, g2, sign=1):
    if not g2:
        return g1
    if not g1 and sign == 1:
        return g2
    d = dict(g1)
    for g, k in g2:
        d[g] = d.get(g, 0) + sign * k
    items = []
    for g, k in d.items():
        if is_sign(g):
            k %= 2
        if k:
            items.append((g, k))
    items.sort(key=lambda it: expr_key(it[0]))
    return tuple(items)


_MONO_MUL: dict = {}


def mono_mul(m1: Mono, m2: Mono) -> tuple[Fraction, Mono]:
    if m1 is UNIT_MONO or m1 == UNIT_MONO:
        return Fraction(1), m2
    if m2 == UNIT_MONO:
        return Fraction(1), m1
    key = (m1, m2)
    hit = _MONO_MUL.get(key)
    if hit is not None:
        return hit
    g1, e1 = m1
    g2, e2 = m2
    coef = Fraction(1)
    if e1 is None:
        ex = e2
        gens = _merge_gens(g1, g2)
    elif e2 is None:
        ex = e1
        gens = _merge_gens(g1, g2)
    else:
        coef, dg, ex = _exp_sum(e1, e2)
        gens = _merge_gens(_merge_gens(g1, g2), dg)
    res = (coef, (gens, ex))
    if len(_MONO_MUL) > 400_000:
        _MONO_MUL.clear()
    _MONO_MUL[key] = res
    return res


def mono_inv(m: Mono) -> tuple[Fraction, Mono]:
    gens, ex = m
    inv = tuple((g, k if is_sign(g) else -k) for g, k in gens)
    if ex is None:
        return Fraction(1), (inv, None)
    coef, dg, ex2 = exp_split(rat_neg(to_rat(ex)))
    return coef, (_merge_gens(inv, dg), ex2)


# ------------------------------------------------------------- polynomials


def p_add(a: dict, b: dict, sign: int = 1) -> dict:
    r = dict(a)
    for m, c in b.items():
        v = r.get(m, 0) + sign * c
        if v:
            r[m] = v
        else:
            r.pop(m, None)
    return r


def p_scale(a: dict, c: Fraction) -> dict:
    if c == 0:
        return {}
    return {m: v * c for m, v in a.items()}


def p_mul(a: dict, b: dict) -> dict:
    if len(a) == 1 and UNIT_MONO in a:
        return p_scale(b, a[UNIT_MONO])
    if len(b) == 1 and UNIT_MONO in b:
        return p_scale(a, b[UNIT_MONO])
    r: dict = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            k, m = mono_mul(m1, m2)
            v = r.get(m, 0) + c1 * c2 * k
            if v:
                r[m] = v
            else:
                r.pop(m, None)
    return r


def p_mono_mul(a: dict, coef: Fraction, m: Mono) -> dict:
    r: dict = {}
    for m1, c1 in a.items():
        k, mm = mono_mul(m1, m)
        v = r.get(mm, 0) + c1 * coef * k
        if v:
            r[mm] = v
        else:
            r.pop(mm, None)
    return r


def p_pow(a: dict, n: int) -> dict:
    r = ONE_POLY
    base = a
    while n:
        if n & 1:
            r = p_mul(r, base)
        n >>= 1
        if n:
            base = p_mul(base, base)
    return r


def _is_one(p: dict) -> bool:
    return len(p) == 1 and p.get(UNIT_MONO) == 1


# --------------------------------------------------------------- Rat class


class Rat:
    __slots__ = ("num", "den")

    def __init__(self, num: dict, den: dict = ONE_POLY):
        self.num = num
        self.den = den

    def is_zero(self) -> bool:
        return not self.num

    def is_const(self) -> bool:
        return _is_one(self.den) and (not self.num or set(self.num) == {UNIT_MONO})

    def const_value(self) -> Fraction:
        return self.num.get(UNIT_MONO, Fraction(0))

    def __eq__(self, other):
        return isinstance(other, Rat) and self.num == other.num and self.den == other.den

    def __repr__(self):
        return f"Rat({to_expr(self)})"


ZERO_RAT = Rat({}, ONE_POLY)
ONE_RAT = Rat(ONE_POLY, ONE_POLY)


def rat_const(c) -> Rat:
    c = Fraction(c)
    return Rat({UNIT_MONO: c} if c else {}, ONE_POLY)


def rat_gen(g: Expr, k: int = 1) -> Rat:
    if is_sign(g):
        k %= 2
        if not k:
            return ONE_RAT
    return Rat({(((g, k),), None): Fraction(1)}, ONE_POLY)


def rat_add(a: Rat, b: Rat) -> Rat:
    if not a.num:
        return b
    if not b.num:
        return a
    if a.den == b.den:
        if _is_one(a.den):
            return Rat(p_add(a.num, b.num), ONE_POLY)
        return canon(p_add(a.num, b.num), a.den)
    if _is_one(a.den):
        return canon(p_add(p_mul(a.num, b.den), b.num), b.den)
    if _is_one(b.den):
        return canon(p_add(a.num, p_mul(b.num, a.den)), a.den)
    return canon(
        p_add(p_mul(a.num, b.den), p_mul(b.num, a.den)), p_mul(a.den, b.den)
    )


def rat_neg(a: Rat) -> Rat:
    return Rat(p_scale(a.num, Fraction(-1)), a.den)


def rat_sub(a: Rat, b: Rat) -> Rat:
    return rat_add(a, rat_neg(b))


def rat_scale(a: Rat, c) -> Rat:
    c = Fraction(c)
    if c == 0:
        return ZERO_RAT
    return Rat(p_scale(a.num, c), a.den)


def rat_mul(a: Rat, b: Rat) -> Rat:
    if not a.num or not b.num:
        return ZERO_RAT
    if _is_one(a.den) and _is_one(b.den):
        num = p_mul(a.num, b.num)
        if _needs_shift(num):
            return canon(num, ONE_POLY)
        return Rat(num, ONE_POLY)
    return canon(p_mul(a.num, b.num), p_mul(a.den, b.den))


def rat_inv(a: Rat) -> Rat:
    if not a.num:
        raise ZeroDivisionError("division by zero in normal form")
    return canon(a.den, a.num)


def rat_div(a: Rat, b: Rat) -> Rat:
    return rat_mul(a, rat_inv(b))


def rat_pow(a: Rat, n: int) -> Rat:
    if n == 0:
        return ONE_RAT
    if n < 0:
        return rat_pow(rat_inv(a), -n)
    if _is_one(a.den):
        num = p_pow(a.num, n)
        return canon(num, ONE_POLY) if _needs_shift(num) else Rat(num, ONE_POLY)
    return canon(p_pow(a.num, n), p_pow(a.den, n))


# -------------------------------------------------------- canonicalization


def _primitive(p: dict):
    """Split ``p = coef * unit * q``; q has no monomial content and a bare lead."""
    allg = set()
    for gs, _ in p:
        allg.update(g for g, _ in gs)
    content = []
    for g in allg:
        k = min(dict(gs).get(g, 0) for gs, _ in p)
        if k:
            content.append((g, k))
    content = _merge_gens((), tuple(content))
    c0, ci = mono_inv((content, None))
    q0 = p_mono_mul(p, c0, ci) if content else p
    lead = min(q0, key=lambda m: (_core_key(m), _mono_key(m)))
    lead_coef = q0[lead]
    signs = tuple((g, k) for g, k in lead[0] if is_sign(g))
    u2 = (signs, lead[1])
    k2, u2i = mono_inv(u2)
    q = p_mono_mul(q0, k2 / lead_coef, u2i)
    kk, unit = mono_mul((content, None), u2)
    return lead_coef * kk, unit, q


def _needs_shift(p: dict) -> bool:
    for (gens, ex) in p:
        if ex is not None and _big_logs(ex):
            return True
    return False


@lru_cache(maxsize=50_000)
def _big_logs(ex: Expr) -> tuple:
    """Logs of non-monomial polynomials with coefficient outside [0, 1)."""
    pure, _ = _pure_logs(to_rat(ex))
    return tuple(
        (L, c) for L, c in pure.items() if not _extractable(L.args[0]) and not (0 <= c < 1)
    )


def _shift_logs(num: dict, den: dict) -> tuple[dict, dict]:
    """Move integer powers of ``exp(c ln P)`` into ordinary powers of ``P``."""
    while True:
        target = None
        for p in (num, den):
            for (gens, ex) in p:
                if ex is not None:
                    big = _big_logs(ex)
                    if big:
                        target = big[0][0]
                        break
            if target is not None:
                break
        if target is None:
            return num, den
        P = to_rat(target.args[0]).num
        Lr = rat_gen(target)
        parts = []
        for p in (num, den):
            rows = []
            for (gens, ex), c in p.items():
                f = 0
                if ex is not None:
                    pure, _ = _pure_logs(to_rat(ex))
                    f = math.floor(pure.get(target, 0))
                rows.append(((gens, ex), c, f))
            parts.append(rows)
        fmins = [min((r[2] for r in rows), default=0) for rows in parts]
        out = []
        for rows, fmin in zip(parts, fmins):
            acc: dict = {}
            for (gens, ex), c, f in rows:
                if f:
                    ex_r = rat_sub(to_rat(ex), rat_scale(Lr, f))
                    k2, dg, ex2 = exp_split(ex_r)
                    term = {(_merge_gens(gens, dg), ex2): c * k2}
                else:
                    term = {(gens, ex): c}
                if f - fmin:
                    term = p_mul(term, p_pow(P, f - fmin))
                acc = p_add(acc, term)
            out.append(acc)
        num, den = out
        d = fmins[0] - fmins[1]
        if d > 0:
            num = p_mul(num, p_pow(P, d))
        elif d < 0:
            den = p_mul(den, p_pow(P, -d))


def canon(num: dict, den: dict) -> Rat:
    if not den:
        raise ZeroDivisionError("division by zero in normal form")
    if not num:
        return ZERO_RAT
    if _needs_shift(num) or _needs_shift(den):
        num, den = _shift_logs(num, den)
    if len(den) == 1:
        (m, c), = den.items()
        k, mi = mono_inv(m)
        num = p_mono_mul(num, k / c, mi)
        if _needs_shift(num):
            return canon(num, ONE_POLY)
        return Rat(num, ONE_POLY)
    coef, unit, q = _primitive(den)
    k, ui = mono_inv(unit)
    num = p_mono_mul(num, k / coef, ui)
    den = q
    if len(num) >= 1:
        num, den = _cancel(num, den)
    return Rat(num, den)


# ------------------------------------------------------------ sympy bridge


def _cancel(num: dict, den: dict) -> tuple[dict, dict]:
    from sympy import QQ
    from sympy.polys.rings import ring

    gens: dict = {}
    exs: dict = {}
    for p in (num, den):
        for gs, ex in p:
            for g, _ in gs:
                gens.setdefault(g, len(gens))
            if ex is not None:
                exs.setdefault(ex, None)
    order = list(gens)
    ex_list = list(exs)
    n = len(order) + len(ex_list)
    if n == 0:
        return num, den
    ex_index = {ex: len(order) + i for i, ex in enumerate(ex_list)}
    shift = [0] * len(order)
    for gs, _ in num:
        for g, k in gs:
            i = gens[g]
            shift[i] = min(shift[i], k)

    def encode(p, sh):
        out = {}
        for (gs, ex), c in p.items():
            e = [0] * n
            for g, k in gs:
                e[gens[g]] = k
            for i, s in enumerate(sh):
                e[i] -= s
            if ex is not None:
                e[ex_index[ex]] = 1
            out[tuple(e)] = QQ(c.numerator, c.denominator)
        return out

    R, *_ = ring(",".join(f"z{i}" for i in range(n)), QQ)
    f = R.from_dict(encode(num, shift))
    g = R.from_dict(encode(den, [0] * len(order)))
    h = f.gcd(g)
    if h.is_ground:
        return num, den
    f2 = f.exquo(h)
    g2 = g.exquo(h)

    def decode(poly, sh):
        out: dict = {}
        for e, c in poly.items():
            gs = tuple((order[i], e[i] + sh[i]) for i in range(len(order)) if e[i] + sh[i])
            term = {(_merge_gens((), gs), None): Fraction(int(c.numerator), int(c.denominator))}
            for j, ex in enumerate(ex_list):
                a = e[len(order) + j]
                if a:
                    k, dg, ex2 = exp_split(rat_scale(to_rat(ex), a))
                    term = p_mul(term, {(dg, ex2): k})
            out = p_add(out, term)
        return out

    num2 = decode(f2, shift)
    den2 = decode(g2, [0] * len(order))
    coef, unit, q = _primitive(den2)
    k, ui = mono_inv(unit)
    return p_mono_mul(num2, k / coef, ui), q


# ------------------------------------------------------ exp, ln and sign


def _extractable(base: Expr) -> bool:
    return isinstance(base, (Num, Sym)) or (isinstance(base, App) and base.name != "exp")


def _pure_logs(E: Rat) -> tuple[dict, Rat]:
    """Split ``E`` into ``sum c_i ln(g_i)`` with rational ``c_i`` plus a remainder."""
    pure: dict = {}
    if not _is_one(E.den):
        return pure, E
    rest: dict = {}
    for m, c in E.num.items():
        gens, ex = m
        if ex is None and len(gens) == 1 and gens[0][1] == 1:
            g = gens[0][0]
            if isinstance(g, App) and g.name == "ln":
                pure[g] = c
                continue
        rest[m] = c
    return pure, Rat(rest, ONE_POLY)


def exp_split(E: Rat) -> tuple[Fraction, tuple, Expr | None]:
    """exp(E) = coef * prod(g^k) * exp(ex) with fractional log coefficients."""
    pure, rest = _pure_logs(E)
    coef = Fraction(1)
    dg: dict = {}
    keep = rest
    for L, c in pure.items():
        base = L.args[0]
        frac = c
        if _extractable(base):
            f = math.floor(c)
            frac = c - f
            if f:
                if isinstance(base, Num):
                    coef *= base.value ** f
                else:
                    dg[base] = dg.get(base, 0) + f
        if frac:
            keep = rat_add(keep, Rat({(((L, 1),), None): frac}, ONE_POLY))
    gens = _merge_gens((), tuple(dg.items()))
    ex = None if keep.is_zero() else to_expr(keep)
    return coef, gens, ex


def rat_exp(E: Rat) -> Rat:
    coef, gens, ex = exp_split(E)
    num = {(gens, ex): coef}
    if any(k < 0 for _, k in gens) or (ex is not None and _needs_shift(num)):
        return canon(num, ONE_POLY)
    return Rat(num, ONE_POLY)


@lru_cache(maxsize=4096)
def _factor_int(n: int) -> tuple:
    from sympy import factorint

    return tuple(sorted(factorint(n).items()))


def ln_const(c: Fraction) -> Rat:
    if c == 0:
        raise ValueError("logarithm of zero")
    out = ZERO_RAT
    if c < 0:
        out = rat_gen(App("ln", (Num(-1),)))
        c = -c
    for p, e in _factor_int(c.numerator):
        out = rat_add(out, rat_scale(rat_gen(App("ln", (Num(p),))), e))
    for p, e in _factor_int(c.denominator):
        out = rat_add(out, rat_scale(rat_gen(App("ln", (Num(p),))), -e))
    return out


def _ln_mono(coef: Fraction, m: Mono) -> Rat:
    out = ln_const(coef) if coef != 1 else ZERO_RAT
    gens, ex = m
    signs = {g: k for g, k in gens if is_sign(g)}
    absorbed = {
        App("sgn", (g,)) for g, k in gens
        if not is_sign(g) and signs.get(App("sgn", (g,))) and (k + 1) % 2 == 0
    }
    for g, k in gens:
        if g in absorbed:
            continue
        out = rat_add(out, rat_scale(rat_gen(App("ln", (g,))), k))
        if is_sign(g):
            continue
        sg = App("sgn", (g,))
        s = signs.get(sg, 0)
        if k % 2 == 0 or (s and (k + s) % 2 == 0):
            # g^k sgn(g)^s is |g|^k here: ln|g|^k = k ln g + k ln sgn(g), so that
            # (g^2)^(1/2) = |g| and (|g|^3)^(1/3) = |g|
            out = rat_add(out, rat_scale(rat_gen(App("ln", (sg,))), k))
    if ex is not None:
        out = rat_add(out, to_rat(ex))
    return out


def _ln_poly(p: dict) -> Rat:
    if len(p) == 1:
        (m, c), = p.items()
        return _ln_mono(c, m)
    coef, unit, q = _primitive(p)
    out = _ln_mono(coef, unit)
    return rat_add(out, rat_gen(App("ln", (to_expr(Rat(q, ONE_POLY)),))))


def rat_ln(W: Rat) -> Rat:
    if W.is_zero():
        raise ValueError("logarithm of zero")
    out = _ln_poly(W.num)
    if not _is_one(W.den):
        out = rat_sub(out, _ln_poly(W.den))
    return out


def _sgn_mono(coef: Fraction, m: Mono) -> Rat:
    out = rat_const(1 if coef > 0 else -1)
    for g, k in m[0]:
        if k % 2:
            s = g if is_sign(g) else App("sgn", (g,))
            out = rat_mul(out, rat_gen(s))
    return out


def _sgn_poly(p: dict) -> Rat:
    if len(p) == 1:
        (m, c), = p.items()
        return _sgn_mono(c, m)
    coef, unit, q = _primitive(p)
    out = _sgn_mono(coef, unit)
    return rat_mul(out, rat_gen(App("sgn", (to_expr(Rat(q, ONE_POLY)),))))


def rat_sgn(W: Rat) -> Rat:
    if W.is_zero():
        return ZERO_RAT
    out = _sgn_poly(W.num)
    if not _is_one(W.den):
        out = rat_mul(out, _sgn_poly(W.den))
    return out


# ----------------------------------------------------------- conversion

_RAT_CACHE: dict = {}


def to_rat(e: Expr, rules: tuple = ()) -> Rat:
    key = (e, rules)
    hit = _RAT_CACHE.get(key)
    if hit is not None:
        return hit
    r = _to_rat(e, rules)
    if len(_RAT_CACHE) > 300_000:
        _RAT_CACHE.clear()
    _RAT_CACHE[key] = r
    return r


def _to_rat(e: Expr, rules: tuple) -> Rat:
    if isinstance(e, Num):
        return rat_const(e.value)
    if isinstance(e, Sym):
        return rat_gen(e)
    if isinstance(e, Add):
        out = ZERO_RAT
        for t in e.terms:
            out = rat_add(out, to_rat(t, rules))
        return out
    if isinstance(e, Mul):
        out = ONE_RAT
        for f in e.factors:
            out = rat_mul(out, to_rat(f, rules))
            if out.is_zero():
                return out
        return out
    if isinstance(e, Pow):
        b = to_rat(e.base, rules)
        if e.exp.denominator == 1:
            return rat_pow(b, int(e.exp))
        if b.is_zero():
            if e.exp > 0:
                return ZERO_RAT
            raise ZeroDivisionError("negative power of zero")
        return rat_exp(rat_scale(rat_ln(b), e.exp))
    if isinstance(e, App):
        if e.name == "exp":
            return rat_exp(to_rat(e.args[0], rules))
        if e.name == "ln":
            return rat_ln(to_rat(e.args[0], rules))
        if e.name == "sgn":
            return rat_sgn(to_rat(e.args[0], rules))
        args = tuple(to_expr(to_rat(a, rules)) for a in e.args)
        if e.name == "arctan":
            a = to_rat(args[0])
            if a.is_zero():
                return ZERO_RAT
            return rat_gen(App("arctan", args))
        a = App(e.name, args, e.orders)
        for rule in rules:
            extra = rule.match(a)
            if extra is not None:
                from .calculus import diff

                rep = rule.replacement
                for var, d in zip(rule.args, extra):
                    for _ in range(d):
                        rep = diff(rep, var)
                return to_rat(rep, rules)
        return rat_gen(a)
    raise TypeError(f"unknown node {type(e).__name__}")


_EXPR_CACHE: dict = {}


def _mono_factors(gens, ex) -> list:
    factors = [g if k == 1 else Pow(g, k) for g, k in gens]
    if ex is not None:
        pure, rest = _pure_logs(to_rat(ex))
        for L in sorted(pure, key=expr_key):
            factors.append(Pow(L.args[0], pure[L]))
        if not rest.is_zero():
            factors.append(App("exp", (to_expr(rest),)))
    return factors


def _poly_expr(p: dict) -> Expr:
    terms = []
    for m in sorted(p, key=_mono_key):
        c = p[m]
        fs = _mono_factors(*m)
        if c != 1 or not fs:
            fs.insert(0, Num(c))
        terms.append(fs[0] if len(fs) == 1 else Mul(tuple(fs)))
    if not terms:
        return ZERO
    return terms[0] if len(terms) == 1 else Add(tuple(terms))


def to_expr(r: Rat) -> Expr:
    n = _poly_expr(r.num)
    if _is_one(r.den):
        return n
    d = _poly_expr(r.den)
    if n == ONE:
        return Pow(d, -1)
    return Mul((n, Pow(d, -1)))


def normalize(e: Expr, rules: tuple = ()) -> Expr:
    return to_expr(to_rat(e, rules))


def structurally_zero(e: Expr, rules: tuple = ()) -> bool:
    return to_rat(e, rules).is_zero()


def clear_caches() -> None:
    _RAT_CACHE.clear()
    _MONO_MUL.clear()
    _KEY_CACHE.clear()
    _big_logs.cache_clear()


def _exp_sum_impl(e1: Expr, e2: Expr):
    return exp_split(rat_add(to_rat(e1), to_rat(e2)))


_EXP_SUM: dict = {}


def _exp_sum(e1: Expr, e2: Expr):
    key = (e1, e2)
    hit = _EXP_SUM.get(key)
    if hit is None:
        hit = _exp_sum_impl(e1, e2)
        if len(_EXP_SUM) > 100_000:
            _EXP_SUM.clear()
        _EXP_SUM[key] = hit
    return hit


def poly_terms(r: Rat):
    """Iterate ``(coef, gens, ex)`` over numerator monomials."""
    for (gens, ex), c in r.num.items():
        yield c, gens, ex


__all__ = [
    "Rat",
    "RewriteRule",
    "to_rat",
    "to_expr",
    "normalize",
    "structurally_zero",
    "expr_key",
    "add",
    "mul",
]
