"""Command-line front end: ``lieheat <subcommand> ...``.

Exit codes: 0 pass, 1 unexpected failure (or nonzero residual), 2 I/O,
parse or schema error. Output is deterministic for fixed inputs and seed.
"""

from __future__ import annotations

import argparse
import fnmatch
import json
import os
import re
import sys
from contextlib import nullcontext
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .algebra import (
    COMMON_NAMES,
    DependentBasisError,
    NotClosedError,
    classify,
    derived_series,
    fingerprint,
    parse_relations,
    structure_constants,
)
from .catalog import (
    CONTROL_FILE,
    DATA_FILES,
    ERRATA_FILE,
    CatalogFormatError,
    EntryError,
    data_path,
    dependent_text,
    equation_text,
    from_json,
    load_errata,
    raw_census,
    verify_all,
)
from .catalog.format import dumps_text, parse_text, read_file, to_json
from .catalog.model import rename_dependent
from .equiv import (
    ChartMismatch,
    ClassViolation,
    DependentSubstitution,
    EquivalenceMap,
    MissingInverseError,
    substitute_dependent,
    transform_pde,
)
from .expr import PARAM, SIGN, App, Num, Sym, T, U, X, is_zero, normalize, sgn_, to_text
from .expr.zero import zero_test_settings
from .fields import commutator, invariance_residual, split_by_jet_monomials
from .parser import ParseError, SymbolTable, make_table, parse_equation, parse_expr, parse_field

OUTPUT_SCHEMA = "lieheat-output/1"
SEED_ENV = "LIEHEAT_SEED"
EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    """Bad input: unreadable file, parse error or schema violation (exit 2)."""


@dataclass
class CliConfig:
    subcommand: str
    inputs: list = field(default_factory=list)
    only: str | None = None
    chart: str | None = None
    seed: int = 0
    fmt: str = "text"
    jobs: int = 1
    verbose: int = 0


@dataclass
class Outcome:
    code: int
    doc: dict
    text: list


# ------------------------------------------------------------------ helpers


def _seed(value: str | None) -> int:
    raw = value if value is not None else os.environ.get(SEED_ENV, "")
    if raw in ("", None):
        return 0
    try:
        seed = int(raw, 0)
    except ValueError:
        raise InputError(f"seed must be an integer, got {raw!r}") from None
    if not 0 <= seed < 2**64:
        raise InputError("seed must be an unsigned 64-bit value")
    return seed


def _resolve(path: str, shipped) -> Path:
    """An existing path, else the shipped file of that name."""
    p = Path(path)
    if p.exists():
        return p
    candidate = shipped(p.name)
    if p.parent == Path(".") and candidate.exists():
        return candidate
    raise InputError(f"{path}: no such file")


def _input_path(name: str) -> Path:
    return Path(str(resources.files(__package__).joinpath("inputs", name)))


def _read_raws(path: Path):
    if path.suffix == ".json":
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise InputError(f"{path}: {exc}") from None
        return from_json(doc, str(path))
    return read_file(path)


def _table() -> SymbolTable:
    return make_table(permissive=True)


def _pde(text: str, table: SymbolTable):
    return parse_equation(text, table)


_COND_RE = re.compile(r"^(.*?)\s*(>|<|=)\s*(.*)$")


def parse_chart(text: str | None, table: SymbolTable) -> dict:
    """``"t>0, u_x<0, eps=-1"`` into substitution bindings."""
    binds: dict = {}
    if not text:
        return binds
    for cond in (c.strip() for c in text.split(",")):
        m = _COND_RE.match(cond)
        if not m:
            raise InputError(f"bad chart condition {cond!r}")
        lhs, op, rhs = (g.strip() for g in m.groups())
        if op == "=":
            if rhs not in ("1", "-1", "+1"):
                raise InputError(f"chart assignment must be +1 or -1: {cond!r}")
            val = Num(int(rhs))
            table.signs.add(lhs)
            binds[Sym(lhs, SIGN)] = val
            binds[Sym(lhs, PARAM)] = val
            continue
        if rhs != "0":
            raise InputError(f"chart inequality must compare with 0: {cond!r}")
        key = normalize(sgn_(parse_expr(lhs, table)))
        if not (isinstance(key, App) and key.name == "sgn"):
            raise InputError(f"chart condition {cond!r} is not a single sign")
        binds[key] = Num(1 if op == ">" else -1)
    return binds


def _label_tex(label: str) -> str:
    return re.sub(r"A(\d+(?:\.\d+)?)", r"A_{\1}", label)


# --------------------------------------------------------------- commands


def cmd_verify(cfg: CliConfig, errata_path: str | None = None, controls: bool = False, timing: bool = False) -> Outcome:
    names = list(cfg.inputs) or list(DATA_FILES) + ([CONTROL_FILE] if controls else [])
    raws = []
    for name in names:
        raws.extend(_read_raws(_resolve(name, data_path)))
    if cfg.only:
        raws = [r for r in raws if fnmatch.fnmatchcase(r.id, cfg.only)]
    known = load_errata(read_file(_resolve(errata_path, data_path) if errata_path else data_path(ERRATA_FILE)))
    census = not cfg.only and any(r.get("census") for r in raws)
    summary = verify_all(raws, known, cfg.seed, cfg.chart, cfg.jobs, check_census=census)
    code = EXIT_OK if summary.ok else EXIT_FAIL
    counts = summary.counts()
    doc = {
        "catalogs": names,
        "only": cfg.only,
        "chart": cfg.chart,
        "seed": cfg.seed,
        "summary": {"line": summary.line(), **counts},
        "reports": [r.to_json(timing) for r in summary.reports],
        "errata": [e.to_json() for e in summary.errata],
        "unexpected": list(summary.unexpected),
    }
    if census:
        doc["census"] = {str(k): v for k, v in raw_census(raws).items()}
    lines = []
    for r in summary.reports:
        if r.status == "control":
            tag = "CTRL" if r.control_caught else "MISS"
            where = ", ".join(c.name for c in r.failures) or r.error or "no failing check"
            lines.append(f"{tag} {r.entry_id}: expected {', '.join(r.expect)}; failed {where}")
            continue
        if r.passed:
            lines.append(f"PASS {r.entry_id}" + (f" ({r.elapsed:.2f}s)" if timing else ""))
            continue
        status = "ERRATUM" if r.entry_id in known else "FAIL"
        detail = r.error or "; ".join(c.name + (f": {c.detail}" if c.detail else "") for c in r.failures)
        lines.append(f"{status} {r.entry_id}: {detail}")
        if cfg.verbose:
            for c in r.failures:
                if c.dump:
                    lines.append(f"    {c.name}: {c.dump}")
    for e in summary.errata:
        lines.append(f"errata {e.status} {e.entry_id}: claim {e.claim} | computed {e.computed}")
    if census:
        lines.append("census " + " ".join(f"{k}:{v}" for k, v in raw_census(raws).items()))
    lines.append(summary.line())
    return Outcome(code, doc, lines)


def cmd_residual(cfg: CliConfig, field_text: str, pde_text: str) -> Outcome:
    table = _table()
    q = parse_field(field_text, table)
    F = _pde(pde_text, table)
    chart = parse_chart(cfg.chart, table)
    rules = table.rule_tuple
    with zero_test_settings(seed=cfg.seed) if cfg.seed else nullcontext():
        r = normalize(invariance_residual(q, F, rules, chart or None), rules)
        zero = is_zero(r, rules).value
    split = [] if zero else [
        {"monomial": to_text(m), "coefficient": to_text(c)} for m, c in split_by_jet_monomials(r, rules=rules)
    ]
    text = "0" if zero else to_text(r)
    lines = [text] + [f"  [{s['monomial']}] {s['coefficient']}" for s in split]
    doc = {
        "field": str(q),
        "F": to_text(F),
        "chart": [cfg.chart] if cfg.chart else [],
        "residual": text,
        "zero": zero,
        "split": split,
    }
    return Outcome(EXIT_OK if zero else EXIT_FAIL, doc, lines)


def cmd_commutator(cfg: CliConfig, a: str, b: str) -> Outcome:
    table = _table()
    q1, q2 = parse_field(a, table), parse_field(b, table)
    out = str(commutator(q1, q2, table.rule_tuple))
    return Outcome(EXIT_OK, {"fields": [str(q1), str(q2)], "result": out}, [out])


def read_basis(path: Path) -> tuple[list, SymbolTable]:
    """Basis file: one field per line (or ``;``-separated), ``#`` comments and
    optional ``params``/``signs``/``atoms``/``rules`` declarations."""
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from None
    decl: dict = {"params": [], "signs": [], "atoms": [], "rules": []}
    fields_text = []
    for line in lines:
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        m = re.match(r"^(params|signs|atoms|rules)\s*=\s*(.*)$", line)
        if m:
            sep = ";" if m.group(1) in ("atoms", "rules") else ","
            decl[m.group(1)].extend(s.strip() for s in m.group(2).split(sep) if s.strip())
            continue
        fields_text.extend(s.strip() for s in line.split(";") if s.strip())
    table = make_table(decl["params"], decl["signs"], decl["atoms"], decl["rules"], permissive=True)
    return [parse_field(t, table) for t in fields_text], table


def cmd_classify(cfg: CliConfig, basis: str | None, relations: str | None, dim: int | None) -> Outcome:
    if basis:
        fields_, table = read_basis(_resolve(basis, _input_path))
        try:
            sc = structure_constants(fields_, table.rule_tuple)
        except (NotClosedError, DependentBasisError) as exc:
            msg = f"basis rejected: {exc}"
            return Outcome(EXIT_FAIL, {"message": msg}, [msg])
    else:
        if not dim:
            raise InputError("--relations needs --dim")
        sc = parse_relations(relations, dim)
    if not sc.is_numeric:
        raise InputError("structure constants depend on parameters; instantiate them first")
    cls = classify(sc)
    fp = fingerprint(sc)
    pos, neg = fp.killing.signature
    common = COMMON_NAMES.get(cls.label or "")
    head = _label_tex(cls.text()) if cls.label else cls.text()
    if common:
        head += f" ({common})"
    head += f"; Killing signature ({pos},{neg})"
    doc = {
        "dim": sc.n,
        "label": cls.label,
        "text": cls.text(),
        "common_name": common,
        "relations": sc.relations_text(),
        "fingerprint": fp.text(),
        "killing_signature": [pos, neg],
        "derived_series": list(derived_series(sc)),
        "candidates": list(cls.candidates),
    }
    return Outcome(EXIT_OK, doc, [head, fp.text()])


def _map_components(text: str, table: SymbolTable) -> tuple:
    comps = {}
    for part in text.split(","):
        lhs, arrow, rhs = part.partition("->")
        v = lhs.strip()
        if not arrow or v not in ("t", "x", "u"):
            raise InputError(f"map component must read 't -> expr': {part.strip()!r}")
        comps[v] = parse_expr(rhs, table)
    return tuple(comps.get(v, s) for v, s in (("t", T), ("x", X), ("u", U)))


def cmd_transform(cfg: CliConfig, sub: str | None, map_text: str | None, inverse: str | None, pde_text: str, var: str) -> Outcome:
    table = _table()
    F = _pde(pde_text, table)
    rules = table.rule_tuple
    if sub:
        lhs, eq, rhs = sub.partition("=")
        lhs = lhs.strip()
        if not eq or lhs not in ("u", var):
            raise InputError(f"substitution must read 'u = phi({var})' or '{var} = psi(u)'")
        inv = None
        if inverse:
            inv = parse_expr(rename_dependent(inverse.partition("=")[2] or inverse, var), table)
        if lhs == "u":
            s = DependentSubstitution(parse_expr(rename_dependent(rhs, var), table), "old", inv, rules)
        else:
            s = DependentSubstitution(parse_expr(rhs, table), "new", inv, rules)
        res = substitute_dependent(s, F)
        G, factor = normalize(res.G, rules), dependent_text(normalize(res.factor, rules), var)
        src = sub
    else:
        comps = _map_components(map_text, table)
        inv_comps = _map_components(inverse, table) if inverse else None
        m = EquivalenceMap(*comps, inv_comps, rules=tuple(rules))
        G, factor = normalize(transform_pde(m, F).G, rules), None
        src = map_text
    g_text = dependent_text(G, var)
    eq = equation_text(G, var)
    lines = [eq + (f"; factor {factor}" if factor else "")]
    doc = {"input": src, "F": to_text(F), "var": var, "G": g_text, "factor": factor, "equation": eq}
    return Outcome(EXIT_OK, doc, lines)


def cmd_export(cfg: CliConfig) -> Outcome:
    names = list(cfg.inputs) or list(DATA_FILES)
    raws = []
    for name in names:
        raws.extend(_read_raws(_resolve(name, data_path)))
    if cfg.only:
        raws = [r for r in raws if fnmatch.fnmatchcase(r.id, cfg.only)]
    doc = {"document": to_json(raws)}
    # the text rendering is a catalog file that parses back to the same entries
    text = dumps_text(raws)
    parse_text(text)
    return Outcome(EXIT_OK, doc, [text.rstrip("\n")])


# ------------------------------------------------------------------ driver


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--only", metavar="GLOB", help="entry id glob, e.g. 'T3.*'")
    p.add_argument("--chart", help="verify: chart-name glob; residual: sign conditions like 't>0, u_x<0'")
    p.add_argument("--seed", help=f"sampling seed (default: ${SEED_ENV}, else 0)")
    p.add_argument("--format", dest="fmt", choices=("text", "json"), default="text")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for verify")
    p.add_argument("-v", "--verbose", action="count", default=0)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lieheat", description="Lie symmetry verification for u_t = u_xx + F(t,x,u,u_x).")
    sub = ap.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("verify", help="verify catalog files (default: the shipped catalog)")
    p.add_argument("catalogs", nargs="*", help="catalog files; bare names fall back to the shipped data")
    p.add_argument("--errata", help="errata file (default: the shipped one)")
    p.add_argument("--controls", action="store_true", help="include the shipped negative controls")
    p.add_argument("--timing", action="store_true", help="report per-entry wall time (breaks byte-identical output)")
    _common(p)

    p = sub.add_parser("residual", help="invariance residual of a vector field")
    p.add_argument("--field", required=True)
    p.add_argument("--pde", required=True, help="F, or 'u_t = u_xx + F'")
    _common(p)

    p = sub.add_parser("commutator", help="Lie bracket of two vector fields")
    p.add_argument("a")
    p.add_argument("b")
    _common(p)

    p = sub.add_parser("classify", help="identify the abstract algebra of a basis")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--basis", help="file with one vector field per line")
    g.add_argument("--relations", help="e.g. '[e1,e2] = e1; [e1,e3] = -2*e2'")
    p.add_argument("--dim", type=int)
    _common(p)

    p = sub.add_parser("transform", help="change of variables on u_t = u_xx + F")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--sub", help="'u = phi(v)' or 'v = psi(u)'")
    g.add_argument("--map", dest="map_text", help="'t -> T, x -> X, u -> U'")
    p.add_argument("--inverse", help="inverse of --sub ('u = phi(v)') or of --map (same syntax)")
    p.add_argument("--pde", required=True)
    p.add_argument("--var", default="v", help="name of the new dependent variable")
    _common(p)

    p = sub.add_parser("export", help="print catalog files as JSON or normalized text")
    p.add_argument("catalogs", nargs="*")
    _common(p)
    return ap


def _schema() -> dict:
    path = resources.files(__package__).joinpath("schemas", "output.schema.json")
    return json.loads(path.read_text(encoding="utf-8"))


def validate_output(doc: dict) -> None:
    import jsonschema

    jsonschema.validate(doc, _schema())


_EXPR_OPTIONS = ("--field", "--pde", "--sub", "--map", "--inverse", "--relations")


def _glue_expr_values(argv: list[str]) -> list[str]:
    """Keep expression values such as ``--pde "-u_x^2"`` from reading as flags."""
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in _EXPR_OPTIONS and i + 1 < len(argv):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def run(argv: list[str] | None = None) -> tuple[int, str]:
    """Run the CLI and return ``(exit code, stdout text)``."""
    ap = build_parser()
    args = ap.parse_args(_glue_expr_values(list(sys.argv[1:] if argv is None else argv)))
    fmt = args.fmt
    try:
        cfg = CliConfig(
            args.subcommand,
            list(getattr(args, "catalogs", []) or []),
            args.only,
            args.chart,
            _seed(args.seed),
            fmt,
            max(1, args.jobs),
            args.verbose,
        )
        if cfg.subcommand == "verify":
            out = cmd_verify(cfg, args.errata, args.controls, args.timing)
        elif cfg.subcommand == "residual":
            out = cmd_residual(cfg, args.field, args.pde)
        elif cfg.subcommand == "commutator":
            out = cmd_commutator(cfg, args.a, args.b)
        elif cfg.subcommand == "classify":
            out = cmd_classify(cfg, args.basis, args.relations, args.dim)
        elif cfg.subcommand == "transform":
            out = cmd_transform(cfg, args.sub, args.map_text, args.inverse, args.pde, args.var)
        else:
            out = cmd_export(cfg)
        command = cfg.subcommand if "message" not in out.doc else "error"
    except ParseError as exc:
        out, command = Outcome(EXIT_INPUT, {"message": exc.pretty()}, [f"error: {exc.pretty()}"]), "error"
    except (InputError, CatalogFormatError, EntryError) as exc:
        out, command = Outcome(EXIT_INPUT, {"message": str(exc)}, [f"error: {exc}"]), "error"
    except (ClassViolation, MissingInverseError, ChartMismatch, NotClosedError, DependentBasisError) as exc:
        out, command = Outcome(EXIT_FAIL, {"message": str(exc)}, [f"error: {exc}"]), "error"
    if fmt == "json":
        doc = {"schema": OUTPUT_SCHEMA, "command": command, "exit_code": out.code, **out.doc}
        validate_output(doc)
        return out.code, json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
    return out.code, "\n".join(out.text) + "\n"


def main(argv: list[str] | None = None) -> int:
    code, text = run(argv)
    text_error = code == EXIT_INPUT and not text.lstrip().startswith("{")
    stream = sys.stderr if text_error else sys.stdout
    stream.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
