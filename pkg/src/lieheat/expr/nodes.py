"""Immutable expression trees with structural equality and cached hashes."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Union

Number = Union[int, Fraction]

BUILTINS = ("exp", "ln", "arctan", "sgn")

# Symbol kinds. Sign symbols take the values +1 and -1 only.
VAR, JET, PARAM, SIGN, AUX = "var", "jet", "param", "sign", "aux"
KINDS = (VAR, JET, PARAM, SIGN, AUX)


class Expr:
    __slots__ = ("_hash",)

    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return add(self, neg(as_expr(other)))

    def __rsub__(self, other):
        return add(as_expr(other), neg(self))

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        return mul(self, power(as_expr(other), -1))

    def __rtruediv__(self, other):
        return mul(as_expr(other), power(self, -1))

    def __pow__(self, other):
        return power(self, other)

    def __neg__(self):
        return neg(self)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        from .printer import to_text

        return f"<{to_text(self)}>"

    def __str__(self):
        from .printer import to_text

        return to_text(self)


class Num(Expr):
    __slots__ = ("value",)

    def __init__(self, value: Number):
        self.value = Fraction(value)
        self._hash = hash(("Num", self.value))

    def __eq__(self, other):
        return isinstance(other, Num) and self.value == other.value

    __hash__ = Expr.__hash__


class Sym(Expr):
    __slots__ = ("name", "kind")

    def __init__(self, name: str, kind: str = VAR):
        if kind not in KINDS:
            raise ValueError(f"unknown symbol kind {kind!r}")
        self.name = name
        self.kind = kind
        self._hash = hash(("Sym", name, kind))

    def __eq__(self, other):
        return (
            self is other
            or isinstance(other, Sym)
            and self.name == other.name
            and self.kind == other.kind
        )

    __hash__ = Expr.__hash__


class App(Expr):
    """Function application. ``orders`` holds one derivative order per slot."""

    __slots__ = ("name", "args", "orders")

    def __init__(self, name: str, args: tuple, orders: tuple | None = None):
        self.name = name
        self.args = tuple(args)
        self.orders = tuple(orders) if orders is not None else (0,) * len(self.args)
        if len(self.orders) != len(self.args):
            raise ValueError("orders and args differ in length")
        self._hash = hash(("App", name, self.args, self.orders))

    def __eq__(self, other):
        return (
            self is other
            or isinstance(other, App)
            and self._hash == other._hash
            and self.name == other.name
            and self.orders == other.orders
            and self.args == other.args
        )

    __hash__ = Expr.__hash__

    @property
    def is_builtin(self) -> bool:
        return self.name in BUILTINS


class Add(Expr):
    __slots__ = ("terms",)

    def __init__(self, terms: tuple):
        self.terms = tuple(terms)
        self._hash = hash(("Add", self.terms))

    def __eq__(self, other):
        return (
            self is other
            or isinstance(other, Add)
            and self._hash == other._hash
            and self.terms == other.terms
        )

    __hash__ = Expr.__hash__


class Mul(Expr):
    __slots__ = ("factors",)

    def __init__(self, factors: tuple):
        self.factors = tuple(factors)
        self._hash = hash(("Mul", self.factors))

    def __eq__(self, other):
        return (
            self is other
            or isinstance(other, Mul)
            and self._hash == other._hash
            and self.factors == other.factors
        )

    __hash__ = Expr.__hash__


class Pow(Expr):
    """Power with a rational exponent."""

    __slots__ = ("base", "exp")

    def __init__(self, base: Expr, exp: Number):
        self.base = base
        self.exp = Fraction(exp)
        self._hash = hash(("Pow", base, self.exp))

    def __eq__(self, other):
        return (
            self is other
            or isinstance(other, Pow)
            and self.exp == other.exp
            and self.base == other.base
        )

    __hash__ = Expr.__hash__


ZERO = Num(0)
ONE = Num(1)


def as_expr(value) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, Fraction)):
        return Num(value)
    if isinstance(value, str):
        return Sym(value)
    raise TypeError(f"cannot convert {value!r} to an expression")


def num(value: Number) -> Num:
    return Num(value)


def sym(name: str, kind: str = VAR) -> Sym:
    return Sym(name, kind)


def add(*terms: Expr) -> Expr:
    flat = []
    const = Fraction(0)
    for t in terms:
        t = as_expr(t)
        if isinstance(t, Add):
            items = t.terms
        else:
            items = (t,)
        for s in items:
            if isinstance(s, Num):
                const += s.value
            else:
                flat.append(s)
    if const:
        flat.append(Num(const))
    if not flat:
        return ZERO
    if len(flat) == 1:
        return flat[0]
    return Add(tuple(flat))


def mul(*factors: Expr) -> Expr:
    flat = []
    const = Fraction(1)
    for f in factors:
        f = as_expr(f)
        items = f.factors if isinstance(f, Mul) else (f,)
        for g in items:
            if isinstance(g, Num):
                const *= g.value
            else:
                flat.append(g)
    if const == 0:
        return ZERO
    if const != 1:
        flat.insert(0, Num(const))
    if not flat:
        return ONE
    if len(flat) == 1:
        return flat[0]
    return Mul(tuple(flat))


def neg(e: Expr) -> Expr:
    return mul(Num(-1), e)


def power(base, exponent) -> Expr:
    base = as_expr(base)
    if isinstance(exponent, Expr):
        if isinstance(exponent, Num):
            exponent = exponent.value
        else:
            return exp_(mul(exponent, ln_(base)))
    exponent = Fraction(exponent)
    if exponent == 0:
        return ONE
    if exponent == 1:
        return base
    if isinstance(base, Num) and exponent.denominator == 1:
        if base.value == 0 and exponent < 0:
            raise ZeroDivisionError("division by zero")
        return Num(base.value ** int(exponent))
    if isinstance(base, Pow) and exponent.denominator == 1 and base.exp.denominator == 1:
        return Pow(base.base, base.exp * exponent)
    return Pow(base, exponent)


def app(name: str, args: Iterable, orders: Iterable[int] | None = None) -> App:
    args = tuple(as_expr(a) for a in args)
    return App(name, args, tuple(orders) if orders is not None else None)


def exp_(e) -> Expr:
    e = as_expr(e)
    if e == ZERO:
        return ONE
    return App("exp", (e,))


def ln_(e) -> Expr:
    e = as_expr(e)
    if e == ONE:
        return ZERO
    return App("ln", (e,))


def arctan_(e) -> Expr:
    return App("arctan", (as_expr(e),))


def sgn_(e) -> Expr:
    e = as_expr(e)
    if isinstance(e, Num):
        return Num((e.value > 0) - (e.value < 0))
    return App("sgn", (e,))


def sqrt_(e) -> Expr:
    return power(e, Fraction(1, 2))


def abs_(e) -> Expr:
    e = as_expr(e)
    if isinstance(e, Num):
        return Num(abs(e.value))
    return mul(e, sgn_(e))


def is_sign(e: Expr) -> bool:
    return (isinstance(e, Sym) and e.kind == SIGN) or (isinstance(e, App) and e.name == "sgn")


def jet_index(s: Sym) -> tuple[int, int] | None:
    """(t-order, x-order) of a jet symbol such as ``u_tx``; ``u`` is (0, 0)."""
    if s.name == "u" and s.kind in (VAR, JET):
        return (0, 0)
    if s.kind != JET or not s.name.startswith("u_"):
        return None
    tail = s.name[2:]
    return (tail.count("t"), tail.count("x"))


def jet(k: int, m: int) -> Sym:
    if k == 0 and m == 0:
        return Sym("u", VAR)
    return Sym("u_" + "t" * k + "x" * m, JET)


T, X, U = Sym("t"), Sym("x"), Sym("u")
U_T, U_X, U_XX = jet(1, 0), jet(0, 1), jet(0, 2)


def walk(e: Expr):
    """Yield every node of ``e`` once per occurrence path, parents first."""
    stack = [e]
    while stack:
        node = stack.pop()
        yield node
        if isinstance(node, Add):
            stack.extend(node.terms)
        elif isinstance(node, Mul):
            stack.extend(node.factors)
        elif isinstance(node, Pow):
            stack.append(node.base)
        elif isinstance(node, App):
            stack.extend(node.args)


def free_symbols(e: Expr) -> set[Sym]:
    seen: set[int] = set()
    out: set[Sym] = set()
    stack = [e]
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        if isinstance(node, Sym):
            out.add(node)
        elif isinstance(node, Add):
            stack.extend(node.terms)
        elif isinstance(node, Mul):
            stack.extend(node.factors)
        elif isinstance(node, Pow):
            stack.append(node.base)
        elif isinstance(node, App):
            stack.extend(node.args)
    return out


def atoms(e: Expr) -> set[App]:
    return {n for n in walk(e) if isinstance(n, App) and not n.is_builtin}


def node_count(e: Expr) -> int:
    return sum(1 for _ in walk(e))
