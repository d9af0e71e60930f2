"""Text input for expressions, vector fields, equations and rewrite rules.

The grammar is documented in ``docs/grammar.md``. Parsing is a Pratt parser
over a small token stream. Identifiers are resolved through a ``SymbolTable``.
"""

from __future__ import annotations

import difflib
import re
from dataclasses import dataclass, field
from fractions import Fraction

from .expr import (
    AUX,
    JET,
    PARAM,
    SIGN,
    VAR,
    App,
    Expr,
    Num,
    RewriteRule,
    Sym,
    abs_,
    add,
    arctan_,
    exp_,
    ln_,
    mul,
    neg,
    normalize,
    power,
    sgn_,
    sqrt_,
)


@dataclass(frozen=True)
class SourceSpan:
    start: int
    end: int
    line: int
    col: int

    def show(self, text: str) -> str:
        lines = text.splitlines() or [""]
        src = lines[self.line - 1] if self.line - 1 < len(lines) else ""
        width = max(1, self.end - self.start)
        return f"{src}\n{' ' * (self.col - 1)}{'^' * width}"


class ParseError(ValueError):
    def __init__(self, message: str, span: SourceSpan | None = None, text: str = ""):
        self.message = message
        self.span = span
        self.text = text
        where = f" at line {span.line}, column {span.col}" if span else ""
        super().__init__(f"{message}{where}")

    def pretty(self) -> str:
        if self.span is None:
            return str(self)
        return f"{self}\n{self.span.show(self.text)}"


@dataclass(frozen=True)
class AtomDecl:
    name: str
    params: tuple[str, ...]

    @property
    def arity(self) -> int:
        return len(self.params)


_JET_RE = re.compile(r"^u_[tx]+$")
_FUNCS = {
    "exp": exp_,
    "ln": ln_,
    "log": ln_,
    "arctan": arctan_,
    "atan": arctan_,
    "sgn": sgn_,
    "sign": sgn_,
    "sqrt": sqrt_,
    "abs": abs_,
}
BASE_VARS = ("t", "x", "u")
FIELD_BASIS = ("dt", "dx", "du")


@dataclass
class SymbolTable:
    """Declared parameters, sign symbols, atoms and rewrite rules."""

    params: set[str] = field(default_factory=set)
    signs: set[str] = field(default_factory=set)
    atoms: dict[str, AtomDecl] = field(default_factory=dict)
    rules: list[RewriteRule] = field(default_factory=list)
    permissive: bool = False

    def copy(self) -> "SymbolTable":
        return SymbolTable(
            set(self.params), set(self.signs), dict(self.atoms), list(self.rules), self.permissive
        )

    def declare_atom(self, name: str, params) -> AtomDecl:
        if name in _FUNCS:
            raise ParseError(f"'{name}' is a builtin function")
        decl = AtomDecl(name, tuple(params))
        self.atoms[name] = decl
        return decl

    def resolve(self, name: str, extra_aux: tuple = ()) -> Sym | None:
        if name in BASE_VARS:
            return Sym(name, VAR)
        if _JET_RE.match(name):
            return Sym(name, JET)
        if name in extra_aux:
            return Sym(name, AUX)
        if name in self.signs:
            return Sym(name, SIGN)
        if name in self.params:
            return Sym(name, PARAM)
        return None

    def known_names(self) -> list[str]:
        return sorted(set(BASE_VARS) | self.params | self.signs | set(self.atoms) | set(_FUNCS))

    @property
    def rule_tuple(self) -> tuple:
        return tuple(self.rules)


# --------------------------------------------------------------- tokenizer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>\d+\.\d*|\.\d+|\d+)
  | (?P<ident>[^\W\d]\w*)
  | (?P<op>\*\*|->|[-+*/^(),\[\]|'=;])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    span: SourceSpan


def tokenize(text: str) -> list[Token]:
    out = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            span = SourceSpan(pos, pos + 1, line, pos - line_start + 1)
            raise ParseError(f"unexpected character {text[pos]!r}", span, text)
        kind = m.lastgroup
        tok = m.group()
        span = SourceSpan(pos, m.end(), line, pos - line_start + 1)
        if kind == "ws":
            for i, ch in enumerate(tok):
                if ch == "\n":
                    line += 1
                    line_start = pos + i + 1
        else:
            if tok == "**":
                tok = "^"
            out.append(Token(kind, tok, span))
        pos = m.end()
    out.append(Token("end", "", SourceSpan(pos, pos, line, pos - line_start + 1)))
    return out


# ------------------------------------------------------------------ parser


class _Parser:
    def __init__(self, text: str, table: SymbolTable, aux: tuple = ()):
        self.text = text
        self.table = table
        self.aux = aux
        self.tokens = tokenize(text)
        self.i = 0

    def peek(self) -> Token:
        return self.tokens[self.i]

    def next(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.peek()
        raise ParseError(msg, tok.span, self.text)

    def expect(self, text: str) -> Token:
        tok = self.peek()
        if tok.text != text:
            if text == ")" and tok.kind == "end":
                self.error("unbalanced parentheses: missing ')'", tok)
            self.error(f"expected '{text}' but found '{tok.text or 'end of input'}'", tok)
        return self.next()

    def parse_all(self) -> Expr:
        e = self.expr(0)
        tok = self.peek()
        if tok.kind != "end":
            if tok.text == ")":
                self.error("unbalanced parentheses: unexpected ')'", tok)
            self.error(f"unexpected '{tok.text}'", tok)
        return e

    # binding powers: + - 10, * / 20, unary 30, ^ 40 (right associative)
    def expr(self, rbp: int) -> Expr:
        tok = self.next()
        left = self.nud(tok)
        while True:
            tok = self.peek()
            lbp = {"+": 10, "-": 10, "*": 20, "/": 20, "^": 40}.get(tok.text, 0)
            if tok.kind != "op" or lbp <= rbp:
                break
            self.next()
            if tok.text == "+":
                left = add(left, self.expr(10))
            elif tok.text == "-":
                left = add(left, neg(self.expr(10)))
            elif tok.text == "*":
                left = mul(left, self.expr(20))
            elif tok.text == "/":
                den = self.expr(20)
                if den == Num(0):
                    self.error("division by zero", tok)
                left = mul(left, power(den, -1))
            else:
                left = self._power(left, self.expr(39), tok)
        return left

    def _power(self, base: Expr, ex: Expr, tok: Token) -> Expr:
        if isinstance(ex, Num):
            if base == Num(0) and ex.value < 0:
                self.error("division by zero", tok)
            return power(base, ex.value)
        return power(base, ex)

    def nud(self, tok: Token) -> Expr:
        if tok.kind == "num":
            return Num(Fraction(tok.text))
        if tok.text == "-":
            return neg(self.expr(30))
        if tok.text == "+":
            return self.expr(30)
        if tok.text == "(":
            e = self.expr(0)
            self.expect(")")
            return e
        if tok.text == "|":
            e = self.expr(0)
            self.expect("|")
            return abs_(e)
        if tok.kind == "ident":
            return self.identifier(tok)
        if tok.kind == "end":
            self.error("unexpected end of input", tok)
        self.error(f"unexpected '{tok.text}'", tok)

    def args(self) -> list[Expr]:
        self.expect("(")
        out = []
        if self.peek().text == ")":
            self.next()
            return out
        while True:
            out.append(self.expr(0))
            tok = self.next()
            if tok.text == ")":
                return out
            if tok.text != ",":
                if tok.kind == "end":
                    self.error("unbalanced parentheses: missing ')'", tok)
                self.error(f"expected ',' or ')' but found '{tok.text}'", tok)

    def identifier(self, tok: Token) -> Expr:
        name = tok.text
        if name == "D" and self.peek().text == "[":
            return self.derivative(tok)
        primes = 0
        while self.peek().text == "'":
            self.next()
            primes += 1
        if self.peek().text == "(":
            if name in _FUNCS and not primes:
                args = self.args()
                if len(args) != 1:
                    self.error(f"{name} takes one argument, got {len(args)}", tok)
                return _FUNCS[name](args[0])
            decl = self.atom_decl(name, tok)
            args_tok = self.peek()
            args = self.args()
            if decl is None:
                decl = self.auto_declare(name, args)
            if len(args) != decl.arity:
                self.error(
                    f"atom '{name}' expects {decl.arity} argument(s), got {len(args)}", args_tok
                )
            orders = (0,) * decl.arity
            if primes:
                if decl.arity != 1:
                    self.error(f"prime notation needs a unary atom, '{name}' has arity {decl.arity}", tok)
                orders = (primes,)
            return App(name, tuple(args), orders)
        if primes:
            self.error(f"prime notation requires an argument list after '{name}'", tok)
        s = self.table.resolve(name, self.aux)
        if s is not None:
            return s
        if name in self.table.atoms:
            decl = self.table.atoms[name]
            return App(name, tuple(self._template(decl)), None)
        if self.table.permissive and name not in _FUNCS:
            self.table.params.add(name)
            return Sym(name, PARAM)
        self.undeclared(name, tok)

    def _template(self, decl: AtomDecl) -> list[Expr]:
        out = []
        for p in decl.params:
            s = self.table.resolve(p, self.aux)
            out.append(s if s is not None else Sym(p, AUX))
        return out

    def atom_decl(self, name: str, tok: Token) -> AtomDecl | None:
        decl = self.table.atoms.get(name)
        if decl is None and not self.table.permissive:
            self.undeclared(name, tok)
        return decl

    def auto_declare(self, name: str, args: list[Expr]) -> AtomDecl:
        if all(isinstance(a, Sym) for a in args) and len(set(args)) == len(args):
            params = tuple(a.name for a in args)
        else:
            params = tuple(f"s{i + 1}" for i in range(len(args)))
        return self.table.declare_atom(name, params)

    def undeclared(self, name: str, tok: Token):
        near = difflib.get_close_matches(name, self.table.known_names(), n=3)
        hint = f"; did you mean {', '.join(near)}?" if near else ""
        self.error(f"undeclared identifier '{name}'{hint}", tok)

    def derivative(self, tok: Token) -> Expr:
        self.expect("[")
        name_tok = self.next()
        if name_tok.kind != "ident":
            self.error("expected an atom name after 'D['", name_tok)
        name = name_tok.text
        decl = self.atom_decl(name, name_tok)
        specs: list[Token] = []
        while self.peek().text == ",":
            self.next()
            specs.append(self.next())
        self.expect("]")
        explicit = self.args() if self.peek().text == "(" else None
        if decl is None:
            if explicit is None:
                self.error(f"cannot infer the arguments of undeclared atom '{name}'", name_tok)
            decl = self.auto_declare(name, explicit)
        orders = [0] * decl.arity
        if specs and all(s.kind == "num" for s in specs):
            if len(specs) != decl.arity:
                self.error(f"D[{name}, ...] needs {decl.arity} slot orders", specs[0])
            orders = [int(s.text) for s in specs]
        else:
            i = 0
            while i < len(specs):
                var = specs[i]
                if var.kind != "ident" or var.text not in decl.params:
                    self.error(
                        f"'{var.text}' is not an argument of atom '{name}' "
                        f"(arguments: {', '.join(decl.params)})",
                        var,
                    )
                k = 1
                if i + 1 < len(specs) and specs[i + 1].kind == "num":
                    k = int(specs[i + 1].text)
                    i += 1
                orders[decl.params.index(var.text)] += k
                i += 1
        args = explicit if explicit is not None else self._template(decl)
        if len(args) != decl.arity:
            self.error(f"atom '{name}' expects {decl.arity} argument(s), got {len(args)}", tok)
        return App(name, tuple(args), tuple(orders))


# -------------------------------------------------------------- public API


def parse_raw(text: str, table: SymbolTable | None = None, aux: tuple = ()) -> Expr:
    """Parse without normalizing."""
    table = table if table is not None else SymbolTable()
    return _Parser(text, table, aux).parse_all()


def parse_expr(text: str, table: SymbolTable | None = None) -> Expr:
    table = table if table is not None else SymbolTable()
    return normalize(parse_raw(text, table), table.rule_tuple)


def parse_equation(text: str, table: SymbolTable | None = None) -> Expr:
    """Return F from ``u_t = u_xx + F`` (or from a bare expression F)."""
    table = table if table is not None else SymbolTable()
    if "=" not in text:
        return parse_expr(text, table)
    lhs, _, rhs = text.partition("=")
    if lhs.strip() != "u_t":
        raise ParseError("equation must have the form u_t = u_xx + F", None, text)
    rest = parse_raw(rhs, table)
    return normalize(add(rest, neg(Sym("u_xx", JET))), table.rule_tuple)


def parse_field(text: str, table: SymbolTable | None = None):
    """Parse ``tau*dt + xi*dx + eta*du`` into a point vector field."""
    from .expr.split import NonPolynomialError, poly_coefficients
    from .fields import VectorField

    table = table if table is not None else SymbolTable()
    raw = parse_raw(text, table, FIELD_BASIS)
    basis = tuple(Sym(n, AUX) for n in FIELD_BASIS)
    try:
        coeffs = poly_coefficients(raw, basis, table.rule_tuple)
    except NonPolynomialError as exc:
        raise ParseError(f"not a vector field: {exc}", None, text) from None
    comps = {0: Num(0), 1: Num(0), 2: Num(0)}
    for exps, c in coeffs.items():
        if sum(exps) != 1:
            raise ParseError("vector field must be linear in dt, dx, du", None, text)
        comps[exps.index(1)] = c
    return VectorField(comps[0], comps[1], comps[2])


def parse_rule(text: str, table: SymbolTable) -> RewriteRule:
    """Parse ``D[alpha, t, 2] -> expression`` into a rewrite rule."""
    if "->" not in text:
        raise ParseError("rewrite rule must contain '->'", None, text)
    lhs_text, _, rhs_text = text.partition("->")
    lhs = parse_raw(lhs_text, table)
    if not isinstance(lhs, App) or lhs.is_builtin:
        raise ParseError("rule left side must be an atom or atom derivative", None, text)
    if not all(isinstance(a, Sym) for a in lhs.args):
        raise ParseError("rule left side must use the atom's template arguments", None, text)
    rhs = parse_raw(rhs_text, table)
    return RewriteRule(lhs.name, lhs.args, lhs.orders, rhs, text.strip())


def parse_atom_decl(text: str) -> AtomDecl:
    m = re.fullmatch(r"\s*([^\W\d]\w*)\s*\(([^)]*)\)\s*", text)
    if not m:
        raise ParseError(f"bad atom declaration {text!r}", None, text)
    params = tuple(p.strip() for p in m.group(2).split(",") if p.strip())
    return AtomDecl(m.group(1), params)


def make_table(
    params=(), signs=(), atoms=(), rules=(), permissive: bool = False
) -> SymbolTable:
    """Build a table from declaration strings such as ``"G(w)"`` and rule strings."""
    table = SymbolTable(set(params), set(signs), {}, [], permissive)
    for a in atoms:
        d = parse_atom_decl(a) if isinstance(a, str) else a
        table.declare_atom(d.name, d.params)
    for r in rules:
        table.rules.append(parse_rule(r, table) if isinstance(r, str) else r)
    return table
