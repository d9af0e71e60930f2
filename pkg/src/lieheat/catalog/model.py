"""Typed catalog entries built from raw blocks."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction

from ..expr import (
    AUX,
    SIGN,
    App,
    Expr,
    Num,
    Sym,
    T,
    U,
    X,
    free_symbols,
    normalize,
    sgn_,
    substitute,
    to_text,
    walk,
)
from ..fields import VectorField
from ..parser import ParseError, SymbolTable, make_table, parse_field, parse_raw
from .format import CatalogFormatError, RawEntry, split_list

KINDS = ("realization", "symmetries", "obstruction", "reduction", "abstract", "subgroup")
MAX_AUTO_CHARTS = 16


class EntryError(CatalogFormatError):
    """A catalog entry failed to parse or validate."""


@dataclass(frozen=True)
class Chart:
    name: str
    bindings: tuple = ()  # ((key, value Expr), ...) keys are sgn Apps or sign Syms

    def as_dict(self) -> dict:
        return dict(self.bindings)

    def apply(self, e: Expr, rules: tuple = ()) -> Expr:
        return substitute(e, self.as_dict(), rules) if self.bindings else normalize(e, rules)


GENERIC = Chart("generic")


@dataclass(frozen=True)
class LabelSpec:
    name: str
    params: tuple = ()  # ((abstract parameter name, Expr over entry parameters), ...)

    def text(self) -> str:
        if not self.params:
            return self.name
        return self.name + "(" + ", ".join(f"{k}={to_text(v)}" for k, v in self.params) + ")"


@dataclass(frozen=True)
class Step:
    """One transformation in a reduction chain."""

    kind: str  # "sub" or "map"
    text: str
    phi: Expr | None = None
    direction: str = "old"
    inverse_phi: Expr | None = None
    map_components: tuple | None = None
    map_inverse: tuple | None = None
    target: Expr | None = None
    target_text: str = ""


@dataclass
class CatalogEntry:
    id: str
    kind: str
    raw: RawEntry
    table: SymbolTable
    source: str = ""
    status: str = "primary"
    census: int | None = None
    basis: list = field(default_factory=list)
    F: Expr | None = None
    charts: list = field(default_factory=list)
    label: LabelSpec | None = None
    samples: list = field(default_factory=list)
    steps: list = field(default_factory=list)
    relations: str = ""
    dim: int = 0
    free_atoms: tuple = ()
    map_components: tuple | None = None
    claim: Expr | None = None
    assume: str = ""

    @property
    def rules(self) -> tuple:
        return self.table.rule_tuple

    @property
    def params(self) -> list[str]:
        return sorted(self.table.params)


# ------------------------------------------------------------------ helpers


def _err(raw: RawEntry, msg: str) -> EntryError:
    return EntryError(f"entry {raw.id}: {msg}", raw.path, raw.line)


def _names(value: str) -> list[str]:
    return [s.strip() for s in value.split(",") if s.strip()]


def _build_table(raw: RawEntry) -> SymbolTable:
    atoms = split_list(raw.get("atoms"), ",") if raw.get("atoms") else []
    try:
        table = make_table(
            params=_names(raw.get("params")), signs=_names(raw.get("signs")), atoms=atoms
        )
        for r in split_list(raw.get("rules")):
            from ..parser import parse_rule

            table.rules.append(parse_rule(r, table))
    except ParseError as exc:
        raise _err(raw, f"declaration error: {exc}") from None
    return table


class _Context:
    """Parses expressions of one entry, expanding ``let`` definitions."""

    def __init__(self, raw: RawEntry, table: SymbolTable, fixed: dict | None = None):
        self.raw = raw
        self.table = table
        # sign values substituted before normalization, so that a fractional
        # power of a product never splits off the sign of a negative factor
        self.fixed = {Sym(k, SIGN): Num(v) for k, v in (fixed or {}).items()}
        self.lets: list[tuple[Sym, Expr]] = []
        names: list[str] = []
        for d in split_list(raw.get("let")):
            name, eq, body = d.partition("=")
            name = name.strip()
            if not eq or not re.fullmatch(r"[^\W\d]\w*", name):
                raise _err(raw, f"bad let definition {d!r}")
            e = self._parse(body, tuple(names))
            self.lets.append((Sym(name, AUX), e))
            names.append(name)
        self.let_names = tuple(names)

    def _expand(self, e: Expr) -> Expr:
        for s, v in reversed(self.lets):
            if s in free_symbols(e):
                e = substitute(e, {s: v}, normal=False)
        return e

    def _parse(self, text: str, aux: tuple) -> Expr:
        try:
            e = parse_raw(text, self.table, aux)
        except ParseError as exc:
            raise _err(self.raw, f"{exc}\n  in: {text}") from None
        return self._expand(e)

    def _fix(self, e: Expr) -> Expr:
        if self.fixed and any(s in self.fixed for s in free_symbols(e)):
            return substitute(e, self.fixed, normal=False)
        return e

    def expr(self, text: str, normal: bool = True) -> Expr:
        e = self._fix(self._parse(text, self.let_names))
        return normalize(e, self.table.rule_tuple) if normal else e

    def field_(self, text: str) -> VectorField:
        if self.let_names:
            raise _err(self.raw, "let definitions are not allowed in vector fields")
        try:
            q = parse_field(text, self.table)
        except ParseError as exc:
            raise _err(self.raw, f"{exc}\n  in: {text}") from None
        except ValueError as exc:
            raise _err(self.raw, f"{exc}\n  in: {text}") from None
        return q.substitute(self.fixed, self.table.rule_tuple) if self.fixed else q

    def equation(self, text: str, var: str = "v") -> Expr:
        """Right-hand side ``G`` of ``v_t = v_xx + G`` written in variable ``var``."""
        text = rename_dependent(text, var)
        lhs, eq, rhs = text.partition("=")
        if not eq:
            return self.expr(text)
        if lhs.strip() != "u_t":
            raise _err(self.raw, f"equation must start with {var}_t =: {text}")
        return self.expr(f"({rhs}) - u_xx")


def rename_dependent(text: str, var: str) -> str:
    """Rewrite ``v``, ``v_x``, ``v_xx``, ``v_t`` into ``u`` names."""
    if var == "u":
        return text
    return re.sub(rf"\b{re.escape(var)}(_[tx]+)?\b", lambda m: "u" + (m.group(1) or ""), text)


def dependent_text(e: Expr, var: str) -> str:
    """Print ``e`` with the dependent variable renamed to ``var``."""
    return re.sub(r"\bu(_[tx]+)?\b", lambda m: var + (m.group(1) or ""), to_text(e))


def equation_text(G: Expr, var: str = "v") -> str:
    """``v_t = v_xx + G`` with a leading minus of ``G`` folded into the operator."""
    head = f"{var}_t = {var}_xx"
    if normalize(G) == Num(0):
        return head
    g = dependent_text(G, var)
    return f"{head} - {g[1:]}" if g.startswith("-") else f"{head} + {g}"


def _parse_label(ctx: _Context, text: str) -> LabelSpec:
    m = re.fullmatch(r"\s*([0-9]*A[0-9.]+(?:\+[0-9]*A[0-9.]+)*)\s*(?:\((.*)\))?\s*", text)
    if not m:
        raise _err(ctx.raw, f"bad label {text!r}")
    params = []
    if m.group(2):
        for part in split_list(m.group(2), ","):
            k, _, v = part.partition("=")
            params.append((k.strip(), ctx.expr(v)))
    return LabelSpec(m.group(1), tuple(params))


def _parse_samples(ctx: _Context, text: str) -> list[dict]:
    out = []
    for s in split_list(text):
        d = {}
        for part in split_list(s, ","):
            k, _, v = part.partition("=")
            k = k.strip()
            if k not in ctx.table.params and k not in ctx.table.signs:
                raise _err(ctx.raw, f"sample assigns undeclared parameter {k!r}")
            val = ctx.expr(v)
            if not isinstance(val, Num):
                raise _err(ctx.raw, f"sample value for {k} must be rational")
            d[k] = val.value
        out.append(d)
    return out


_COND_RE = re.compile(r"^(.*?)\s*(>|<|=)\s*(.*)$")


def _parse_chart(ctx: _Context, text: str) -> Chart:
    binds = []
    for cond in split_list(text, ","):
        m = _COND_RE.match(cond)
        if not m:
            raise _err(ctx.raw, f"bad chart condition {cond!r}")
        lhs, op, rhs = m.groups()
        if op == "=":
            name = lhs.strip()
            if name not in ctx.table.signs:
                raise _err(ctx.raw, f"chart assigns {name!r}, which is not a sign symbol")
            binds.append((Sym(name, SIGN), ctx.expr(rhs)))
            continue
        if rhs.strip() != "0":
            raise _err(ctx.raw, f"chart inequality must compare with 0: {cond!r}")
        key = normalize(sgn_(ctx.expr(lhs)))
        if not (isinstance(key, App) and key.name == "sgn"):
            raise _err(ctx.raw, f"chart condition {cond!r} is not a single sign")
        binds.append((key, Num(1 if op == ">" else -1)))
    return Chart(text.strip(), tuple(binds))


def sign_generators(exprs) -> list:
    found = []
    for e in exprs:
        for node in walk(e):
            if isinstance(node, App) and node.name == "sgn" and node not in found:
                found.append(node)
    return found


def auto_charts(entry: CatalogEntry, exprs) -> list[Chart]:
    """Every sign assignment of the ``sgn`` generators and sign symbols present."""
    gens = sign_generators(exprs)
    syms = sorted(
        {s for e in exprs for s in free_symbols(e) if s.kind == SIGN}, key=lambda s: s.name
    )
    keys = gens + syms
    if not keys:
        return [GENERIC]
    if 2 ** len(keys) > MAX_AUTO_CHARTS:
        raise EntryError(f"entry {entry.id}: too many sign generators for automatic charts")
    charts = []
    for signs in itertools.product((1, -1), repeat=len(keys)):
        parts = []
        for k, s in zip(keys, signs):
            if isinstance(k, App):
                parts.append(f"{to_text(k.args[0])}{'>' if s > 0 else '<'}0")
            else:
                parts.append(f"{k.name}={s}")
        charts.append(Chart(", ".join(parts), tuple((k, Num(s)) for k, s in zip(keys, signs))))
    return charts


def _parse_map(ctx: _Context, text: str) -> tuple:
    comps = {}
    for part in split_list(text):
        lhs, arrow, rhs = part.partition("->")
        v = lhs.strip()
        if not arrow or v not in ("t", "x", "u"):
            raise _err(ctx.raw, f"map component must read 't -> expr': {part!r}")
        comps[v] = ctx.expr(rhs)
    return tuple(comps.get(v, s) for v, s in (("t", T), ("x", X), ("u", U)))


def _parse_sub(ctx: _Context, text: str, var: str) -> tuple[Expr, str]:
    lhs, eq, rhs = text.partition("=")
    lhs = lhs.strip()
    if not eq:
        raise _err(ctx.raw, f"substitution must read 'u = phi({var})' or '{var} = psi(u)'")
    if lhs == "u":
        return ctx.expr(rename_dependent(rhs, var)), "old"
    if lhs == var:
        return ctx.expr(rhs), "new"
    raise _err(ctx.raw, f"substitution must define u or {var}: {text!r}")


# ------------------------------------------------------------------ compile


def compile_entry(raw: RawEntry, fixed: dict | None = None) -> CatalogEntry:
    """Typed entry; ``fixed`` maps sign symbol names to +1 or -1."""
    kind = raw.get("kind")
    if kind not in KINDS:
        raise _err(raw, f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}")
    table = _build_table(raw)
    ctx = _Context(raw, table, fixed)
    e = CatalogEntry(raw.id, kind, raw, table, raw.get("source"), raw.get("status", "primary"))
    e.assume = raw.get("assume")
    if raw.get("census"):
        try:
            e.census = int(raw.get("census"))
        except ValueError:
            raise _err(raw, "census must be an integer dimension") from None
    if e.status not in ("primary", "variant", "control"):
        raise _err(raw, f"unknown status {e.status!r}")
    if kind in ("realization", "symmetries", "obstruction", "subgroup"):
        key = "operators" if kind == "symmetries" else "basis"
        if not raw.get(key):
            raise _err(raw, f"missing field {key!r}")
        e.basis = [ctx.field_(s) for s in split_list(raw.get(key))]
    if kind in ("realization", "symmetries", "obstruction"):
        if not raw.get("F"):
            raise _err(raw, "missing field 'F'")
        e.F = ctx.expr(raw.get("F"))
    if kind == "obstruction" and raw.get("claim"):
        e.claim = ctx.expr(raw.get("claim"))
    if kind in ("realization", "abstract") and raw.get("label"):
        e.label = _parse_label(ctx, raw.get("label"))
    if raw.get("samples"):
        e.samples = _parse_samples(ctx, raw.get("samples"))
    if kind == "abstract":
        try:
            e.dim = int(raw.get("dim"))
        except ValueError:
            raise _err(raw, "abstract entry needs an integer 'dim'") from None
        e.relations = raw.get("relations")
    if kind == "subgroup":
        e.map_components = _parse_map(ctx, raw.get("map"))
        e.free_atoms = tuple(_names(raw.get("free")))
    if kind == "reduction":
        if not raw.get("F"):
            raise _err(raw, "missing field 'F'")
        e.F = ctx.expr(raw.get("F"))
        n = 1
        while raw.get(f"step{n}"):
            e.steps.append(_parse_step(ctx, raw, n))
            n += 1
        if not e.steps:
            raise _err(raw, "reduction needs at least 'step1'")
    if raw.get("charts"):
        e.charts = [_parse_chart(ctx, c) for c in split_list(raw.get("charts"))]
    return e


def _parse_step(ctx: _Context, raw: RawEntry, n: int) -> Step:
    text = raw.get(f"step{n}")
    var = raw.get(f"var{n}", raw.get("var", "v")).strip()
    kind, _, body = text.partition(":")
    kind = kind.strip()
    target_text = raw.get(f"target{n}")
    target = ctx.equation(target_text, var) if target_text else None
    if kind == "sub":
        phi, direction = _parse_sub(ctx, body, var)
        inv = raw.get(f"inverse{n}")
        inv_phi = None
        if inv:
            inv_phi, d2 = _parse_sub(ctx, inv, var)
            if d2 == direction:
                raise _err(raw, f"inverse{n} must express the other variable")
        return Step("sub", text, phi, direction, inv_phi, target=target, target_text=target_text)
    if kind == "map":
        comps = _parse_map(ctx, body)
        inv = raw.get(f"inverse{n}")
        inv_c = _parse_map(ctx, inv) if inv else None
        return Step("map", text, map_components=comps, map_inverse=inv_c, target=target, target_text=target_text)
    raise _err(raw, f"step{n} must start with 'sub:' or 'map:'")


def specialize(entry: CatalogEntry, chart: Chart) -> tuple[CatalogEntry, Chart]:
    """Recompile with the chart's sign symbols fixed; return the remaining chart."""
    fixed = {k.name: v.value for k, v in chart.bindings if isinstance(k, Sym)}
    if not fixed:
        return entry, chart
    rest = Chart(chart.name, tuple((k, v) for k, v in chart.bindings if not isinstance(k, Sym)))
    return compile_entry(entry.raw, fixed), rest


def load_entries(raws: list[RawEntry]) -> list[CatalogEntry]:
    return [compile_entry(r) for r in raws]
