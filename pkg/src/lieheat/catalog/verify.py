"""Replay every check of a catalog entry and aggregate the results."""

from __future__ import annotations

import fnmatch
import random
import time
from contextlib import nullcontext
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from ..algebra import (
    DependentBasisError,
    NotClosedError,
    StructureConstants,
    canonical_tensor,
    classify,
    jacobi_check,
    parse_relations,
    structure_constants,
)
from ..equiv import (
    ClassViolation,
    DependentSubstitution,
    EquivalenceMap,
    MissingInverseError,
    coefficient_pattern,
    pushforward_field,
    substitute_dependent,
    transform_pde,
)
from ..expr import (
    JET,
    PARAM,
    SIGN,
    App,
    Num,
    Sym,
    T,
    U,
    X,
    add,
    atoms,
    free_symbols,
    is_zero,
    mul,
    normalize,
    power,
    substitute,
    to_text,
    zero_test_settings,
)
from ..fields import invariance_residual, split_by_jet_monomials
from .format import RawEntry
from .model import GENERIC, CatalogEntry, Chart, EntryError, auto_charts, compile_entry, equation_text, specialize

ERRATA_STATUSES = ("confirmed-discrepancy", "resolved", "open")
SAMPLE_POOL = (Fraction(3), Fraction(5, 2), Fraction(-7, 3), Fraction(11, 4), Fraction(-5), Fraction(13, 3))


@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""
    dump: str = ""

    def to_json(self) -> dict:
        d = {"name": self.name, "ok": self.ok}
        if self.detail:
            d["detail"] = self.detail
        if self.dump:
            d["dump"] = self.dump
        return d


@dataclass(frozen=True)
class ErrataRecord:
    entry_id: str
    claim: str
    computed: str
    status: str
    note: str = ""

    def __post_init__(self):
        if not (self.entry_id and self.claim and self.computed):
            raise ValueError("errata records need an entry id, a claim and a computed value")
        if self.status not in ERRATA_STATUSES:
            raise ValueError(f"unknown errata status {self.status!r}")

    def to_json(self) -> dict:
        d = {"entry": self.entry_id, "claim": self.claim, "computed": self.computed, "status": self.status}
        if self.note:
            d["note"] = self.note
        return d


@dataclass
class VerificationReport:
    entry_id: str
    kind: str
    checks: list = field(default_factory=list)
    errata: list = field(default_factory=list)
    elapsed: float = 0.0
    error: str = ""
    status: str = "primary"
    expect: tuple = ()  # check-name prefixes a negative control must fail

    def add(self, name: str, ok: bool, detail: str = "", dump: str = "") -> Check:
        c = Check(name, bool(ok), detail, dump)
        self.checks.append(c)
        return c

    def _flag(self, prefix: str) -> bool | None:
        cs = [c for c in self.checks if c.name.startswith(prefix)]
        return all(c.ok for c in cs) if cs else None

    @property
    def closure_ok(self) -> bool | None:
        return self._flag("closure")

    @property
    def label_ok(self) -> bool | None:
        return self._flag("label")

    @property
    def residual_zero(self) -> dict:
        return {c.name: c.ok for c in self.checks if c.name.startswith("residual")}

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.ok]

    @property
    def passed(self) -> bool:
        return not self.error and bool(self.checks) and not self.failures and not self.errata

    @property
    def control_caught(self) -> bool:
        """A negative control failed exactly in the checks it names."""
        if self.status != "control" or self.error or not self.failures or not self.expect:
            return False
        names = [c.name for c in self.failures]
        return all(any(n.startswith(p) for n in names) for p in self.expect) and all(
            any(n.startswith(p) for p in self.expect) for n in names
        )

    def to_json(self, timing: bool = False) -> dict:
        d = {
            "id": self.entry_id,
            "kind": self.kind,
            "passed": self.passed,
            "closure_ok": self.closure_ok,
            "label_ok": self.label_ok,
            "checks": [c.to_json() for c in self.checks],
            "errata": [e.to_json() for e in self.errata],
        }
        if self.error:
            d["error"] = self.error
        if self.status == "control":
            d["control_caught"] = self.control_caught
        if timing:
            d["elapsed"] = round(self.elapsed, 3)
        return d


# ------------------------------------------------------------------ helpers


def _is_zero(e, rules) -> bool:
    return is_zero(e, rules).value


def _dump(r, rules) -> str:
    try:
        parts = split_by_jet_monomials(r, rules=rules)
    except Exception:  # the dump is diagnostic only
        return to_text(normalize(r, rules))
    return "; ".join(f"[{to_text(m)}] {to_text(c)}" for m, c in parts if normalize(c, rules) != Num(0))


def _select_charts(entry: CatalogEntry, exprs, pattern: str | None) -> list[Chart]:
    charts = entry.charts or auto_charts(entry, exprs)
    if pattern:
        charts = [c for c in charts if fnmatch.fnmatchcase(c.name, pattern)]
    return charts


def _samples(entry: CatalogEntry, names: list[str], seed: int, count: int = 3) -> list[dict]:
    """Declared samples, or seeded draws from a pool of generic rationals."""
    if entry.samples:
        return entry.samples
    if not names:
        return [{}]
    rng = random.Random(f"{seed}:{entry.id}")
    return [{n: rng.choice(SAMPLE_POOL) for n in names} for _ in range(count)]


def _bind(values: dict) -> dict:
    out = {}
    for k, v in values.items():
        out[Sym(k, PARAM)] = Num(v)
        out[Sym(k, SIGN)] = Num(v)
    return out


def _chart_values(chart: Chart) -> dict:
    return {k.name: v.value for k, v in chart.bindings if isinstance(k, Sym) and isinstance(v, Num)}


def _numeric_sc(sc: StructureConstants, values: dict) -> StructureConstants | str:
    try:
        return sc.instantiate(values)
    except ValueError as exc:
        return str(exc)


def _sample_text(values: dict) -> str:
    return ", ".join(f"{k}={v}" for k, v in sorted(values.items())) or "-"


# ------------------------------------------------------------- realization


def _label_checks(rep, entry, sc, chart, seed):
    names = sorted({s.name for s in sc.parameters() if s.kind in (PARAM, SIGN)})
    if entry.label is not None:
        for _, e in entry.label.params:
            names += [s.name for s in free_symbols(e) if s.kind in (PARAM, SIGN) and s.name not in names]
    fixed = _chart_values(chart)
    names = [n for n in sorted(set(names)) if n not in fixed]
    sign_names = [n for n in names if n in entry.table.signs]
    param_names = [n for n in names if n not in entry.table.signs]
    base_samples = _samples(entry, param_names, seed)
    combos = []
    for s in base_samples:
        missing = [n for n in sign_names if n not in s]
        if not missing:
            combos.append(dict(s))
            continue
        for bits in range(2 ** len(missing)):
            d = dict(s)
            for i, n in enumerate(missing):
                d[n] = Fraction(-1 if bits >> i & 1 else 1)
            combos.append(d)
    for values in combos:
        values = {**values, **fixed}
        tag = f"label[{chart.name}; {_sample_text({k: v for k, v in values.items() if k not in fixed})}]"
        inst = _numeric_sc(sc, values)
        if isinstance(inst, str):
            rep.add(tag, False, f"structure constants are not numeric: {inst}")
            continue
        got = classify(inst)
        if entry.label is None:
            rep.add(tag, True, f"computed {got.text()}")
            continue
        try:
            pvals = {}
            for k, e in entry.label.params:
                v = normalize(substitute(e, _bind(values)))
                if not isinstance(v, Num):
                    raise ValueError(f"label parameter {k} = {to_text(v)} is not numeric")
                pvals[k] = v.value
            expected = classify(canonical_tensor(entry.label.name, **pvals))
        except (KeyError, ValueError) as exc:
            rep.add(tag, False, f"expected label unusable: {exc}")
            continue
        ok = got.same_as(expected)
        rep.add(tag, ok, f"computed {got.text()}, expected {expected.text()}")


def _residual_checks(rep, entry, basis, F, chart, prefix="residual"):
    rules = entry.rules
    out = []
    for i, q in enumerate(basis, 1):
        r = invariance_residual(q, F, rules)
        zero = _is_zero(r, rules)
        out.append((i, r, zero))
        if prefix == "residual":
            rep.add(f"residual[Q{i}; {chart.name}]", zero, "", "" if zero else _dump(r, rules))
    return out


def _apply_chart(entry, chart):
    entry, chart = specialize(entry, chart)
    d = chart.as_dict()
    rules = entry.rules
    basis = [q.substitute(d, rules) if d else q.normalized(rules) for q in entry.basis]
    F = substitute(entry.F, d, rules) if d else entry.F
    return basis, F


def _exprs(entry):
    out = [c for q in entry.basis for c in q.components]
    if entry.F is not None:
        out.append(entry.F)
    return out


def verify_realization(entry: CatalogEntry, seed: int = 0, chart_pattern: str | None = None) -> VerificationReport:
    rep = VerificationReport(entry.id, entry.kind)
    for chart in _select_charts(entry, _exprs(entry), chart_pattern):
        basis, F = _apply_chart(entry, chart)
        try:
            sc = structure_constants(basis, entry.rules)
            rep.add(f"closure[{chart.name}]", True, sc.relations_text())
        except (NotClosedError, DependentBasisError) as exc:
            rep.add(f"closure[{chart.name}]", False, str(exc))
            sc = None
        _residual_checks(rep, entry, basis, F, chart)
        if sc is not None:
            _label_checks(rep, entry, sc, chart, seed)
    return rep


def verify_symmetry_listing(entry: CatalogEntry, seed: int = 0, chart_pattern: str | None = None) -> VerificationReport:
    """Every listed operator leaves the equation invariant modulo the side rules."""
    rep = VerificationReport(entry.id, entry.kind)
    for chart in _select_charts(entry, _exprs(entry), chart_pattern):
        basis, F = _apply_chart(entry, chart)
        _residual_checks(rep, entry, basis, F, chart)
    return rep


def verify_obstruction(entry: CatalogEntry, seed: int = 0, chart_pattern: str | None = None) -> VerificationReport:
    """The listed fields cannot all be symmetries: some residual must survive."""
    rep = VerificationReport(entry.id, entry.kind)
    rules = entry.rules
    for chart in _select_charts(entry, _exprs(entry), chart_pattern):
        basis, F = _apply_chart(entry, chart)
        res = _residual_checks(rep, entry, basis, F, chart, prefix="obstruction")
        bad = [(i, r) for i, r, z in res if not z]
        detail = "; ".join(f"Q{i}: {to_text(normalize(r, rules))}" for i, r in bad)
        rep.add(f"obstruction[{chart.name}]", bool(bad), detail or "all residuals vanish")
        if entry.claim is not None and bad:
            ent, rest = specialize(entry, chart)
            claim = rest.apply(ent.claim, rules)
            ok = False
            for _, r in bad:
                ratio = normalize(mul(r, power(claim, -1)), rules)
                if not any(s.kind == JET for s in free_symbols(ratio)):
                    ok = True
            rep.add(f"claim[{chart.name}]", ok, f"claimed {to_text(claim)} up to a jet-free factor")
    return rep


# --------------------------------------------------------------- reduction


def _run_step(entry, step, F):
    rules = entry.rules
    if step.kind == "sub":
        s = DependentSubstitution(step.phi, step.direction, step.inverse_phi, rules)
        return substitute_dependent(s, F).G
    m = EquivalenceMap(*step.map_components, step.map_inverse, rules=rules)
    return transform_pde(m, F).G


def _chain(entry):
    """Run every step; return [(step, G or exception)] stopping at the first failure."""
    out = []
    F = entry.F
    for step in entry.steps:
        try:
            G = _run_step(entry, step, F)
        except (ClassViolation, MissingInverseError) as exc:
            out.append((step, exc))
            return out
        out.append((step, G))
        # continue the chain from the independently computed equation
        F = G
    return out


def verify_reduction(entry: CatalogEntry, seed: int = 0, chart_pattern: str | None = None) -> VerificationReport:
    rep = VerificationReport(entry.id, entry.kind)
    rules = entry.rules
    exprs = [entry.F] + [s.target for s in entry.steps if s.target is not None]
    charts = _select_charts(entry, exprs, chart_pattern)
    chains = {}
    mismatch: dict[int, list] = {}
    for chart in charts:
        ent, rest = specialize(entry, chart)
        key = tuple((k.name, v.value) for k, v in chart.bindings if isinstance(k, Sym))
        if key not in chains:
            chains[key] = _chain(ent)
        for n, (step, G) in enumerate(chains[key], 1):
            if isinstance(G, Exception):
                break
            if step.target is None:
                continue
            diff_ = add(rest.apply(G, rules), mul(-1, rest.apply(step.target, rules)))
            if not _is_zero(diff_, rules):
                mismatch.setdefault(n, []).append((chart, G))
    for key, chain in chains.items():
        where = ", ".join(f"{k}={v}" for k, v in key)
        suffix = f"; {where}" if where else ""
        for n, (step, G) in enumerate(chain, 1):
            if isinstance(G, Exception):
                rep.add(f"step{n}{suffix and '[' + where + ']'}", False, f"{step.text}: {G}")
                break
            rep.add(f"class[step{n}{suffix}]", True, f"G = {to_text(G)}")
    for n, step in enumerate(entry.steps, 1):
        if step.target is None or not any(len(c) >= n and not isinstance(c[n - 1][1], Exception) for c in chains.values()):
            continue
        bad = mismatch.get(n, [])
        var = entry.raw.get(f"var{n}", entry.raw.get("var", "v")).strip()
        computed = "; ".join(dict.fromkeys(equation_text(G, var) for _, G in bad)) or "; ".join(
            dict.fromkeys(equation_text(c[n - 1][1], var) for c in chains.values() if len(c) >= n)
        )
        where = ", ".join(c.name for c, _ in bad)
        rep.add(
            f"target[step{n}]",
            not bad,
            f"computed {computed}" + ("" if not bad else f"; claimed {step.target_text} (differs on {where})"),
        )
        if bad:
            claim = entry.raw.get(f"claim{n}") or step.target_text
            rep.errata.append(
                ErrataRecord(entry.id, claim, computed, "confirmed-discrepancy", f"step {n}: {step.text}")
            )
    return rep


# ----------------------------------------------------------------- abstract


def verify_abstract(entry: CatalogEntry, seed: int = 0, chart_pattern: str | None = None) -> VerificationReport:
    rep = VerificationReport(entry.id, entry.kind)
    try:
        sc = parse_relations(entry.relations, entry.dim, entry.params, sorted(entry.table.signs))
    except ValueError as exc:
        rep.add("relations", False, str(exc))
        return rep
    rep.add("jacobi[symbolic]", jacobi_check(sc), sc.relations_text())
    names = sorted({s.name for s in sc.parameters()})
    for values in _samples(entry, names, seed):
        tag = _sample_text(values)
        inst = _numeric_sc(sc, values)
        if isinstance(inst, str):
            rep.add(f"jacobi[{tag}]", False, inst)
            continue
        rep.add(f"jacobi[{tag}]", jacobi_check(inst))
        got = classify(inst)
        if entry.label is None:
            rep.add(f"classify[{tag}]", True, got.text())
    if entry.label is not None:
        _label_checks(rep, entry, sc, GENERIC, seed)
    return rep


# ----------------------------------------------------------------- subgroup


def verify_subgroup(entry: CatalogEntry, seed: int = 0, chart_pattern: str | None = None) -> VerificationReport:
    """Push the basis forward by a general member of the subgroup and compare forms."""
    rep = VerificationReport(entry.id, entry.kind)
    rules = entry.rules
    exprs = list(entry.map_components) + _exprs(entry)
    for chart in _select_charts(entry, exprs, chart_pattern):
        ent, rest = specialize(entry, chart)
        comps = tuple(rest.apply(c, rules) for c in ent.map_components)
        m = EquivalenceMap(*comps, rules=rules)
        point = dict(zip((T, X, U), comps))
        for i, q in enumerate(ent.basis, 1):
            q = q.substitute(rest.as_dict(), rules) if rest.bindings else q.normalized(rules)
            img = pushforward_field(m, q, barred=False)
            at_point = q.substitute(point, rules)
            exact = img.equals(at_point, rules)
            if exact:
                rep.add(f"form[Q{i}; {chart.name}]", True, "image equals the original at the mapped point")
                continue
            declared = set(ent.table.atoms)
            if not any(a.name in declared for c in q.components for a in atoms(c)):
                rep.add(f"form[Q{i}; {chart.name}]", False, f"image {img} differs from {at_point}")
                continue
            # free functions in the field may be renamed, so only the shape must survive
            pat_q, pat_img = coefficient_pattern(q, rules), coefficient_pattern(img, rules)
            rep.add(
                f"form[Q{i}; {chart.name}]",
                pat_q == pat_img,
                f"image {img}; coefficient pattern {pat_img} vs {pat_q}",
            )
    return rep


VERIFIERS = {
    "realization": verify_realization,
    "symmetries": verify_symmetry_listing,
    "obstruction": verify_obstruction,
    "reduction": verify_reduction,
    "abstract": verify_abstract,
    "subgroup": verify_subgroup,
}


def verify_entry(entry: CatalogEntry, seed: int = 0, chart_pattern: str | None = None) -> VerificationReport:
    """Run every check for one entry. Failures become report content."""
    start = time.perf_counter()
    try:
        with zero_test_settings(seed=seed) if seed else nullcontext():
            rep = VERIFIERS[entry.kind](entry, seed, chart_pattern)
    except Exception as exc:  # an unexpected kernel error is a failed entry, not a crash
        rep = VerificationReport(entry.id, entry.kind, error=f"{type(exc).__name__}: {exc}")
    rep.elapsed = time.perf_counter() - start
    rep.status = entry.status
    rep.expect = tuple(p.strip() for p in entry.raw.get("expect").split(",") if p.strip())
    return rep


# ------------------------------------------------------------------- errata


@dataclass(frozen=True)
class KnownDiscrepancy:
    """An entry listed in the shipped errata file as expected to fail."""

    entry_id: str
    claim: str
    computed: str
    note: str = ""
    census: tuple | None = None  # (dimension, printed count) for census records


def load_errata(raws: list[RawEntry]) -> dict[str, KnownDiscrepancy]:
    out = {}
    for r in raws:
        if not r.get("claim") or not r.get("computed"):
            raise EntryError(f"errata entry {r.id} needs 'claim' and 'computed'", r.path, r.line)
        cen = None
        if r.get("census_dim"):
            try:
                cen = (int(r.get("census_dim")), int(r.get("census_count")))
            except ValueError:
                raise EntryError(f"errata entry {r.id}: census fields must be integers", r.path, r.line) from None
        out[r.id] = KnownDiscrepancy(r.id, r.get("claim"), r.get("computed"), r.get("note"), cen)
    return out


@dataclass
class Summary:
    reports: list
    errata: list
    unexpected: list  # entry ids failing without an errata listing
    controls: list = field(default_factory=list)  # negative controls caught in the named checks

    @property
    def ok(self) -> bool:
        return not self.unexpected

    def counts(self) -> dict:
        passed = sum(r.passed for r in self.reports)
        return {
            "entries": len(self.reports),
            "passed": passed,
            "failed": len(self.reports) - passed - len(self.controls),
            "unexpected": len(self.unexpected),
            "errata": len(self.errata),
            "controls": len(self.controls),
        }

    def line(self) -> str:
        c = self.counts()
        if c["failed"] == 0 and c["unexpected"] == 0 and c["passed"] == 0 and c["controls"]:
            head = "all negative controls caught"
        elif c["failed"] == 0 and c["unexpected"] == 0:
            head = "all entries pass"
        elif c["unexpected"] == 0:
            head = "all failures are documented errata"
        else:
            head = f"{c['unexpected']} unexpected failures"
        tail = f", {c['controls']} negative controls caught" if c["controls"] else ""
        return (
            f"{head}: {c['passed']}/{c['entries']} passed, {c['unexpected']} unexpected, "
            f"{c['errata']} errata{tail}"
        )


def _failure_text(rep: VerificationReport) -> str:
    if rep.error:
        return rep.error
    return "; ".join(f"{c.name}: {c.detail}" if c.detail else c.name for c in rep.failures)


def reconcile(reports: list, known: dict[str, KnownDiscrepancy], counts: dict | None = None) -> Summary:
    """Match reports with known discrepancies; ``counts`` enables census records."""
    errata: list[ErrataRecord] = []
    unexpected: list[str] = []
    controls: list[str] = []
    if counts is not None:
        for k in known.values():
            if k.census is None:
                continue
            dim, printed = k.census
            got = counts.get(dim, 0)
            status = "resolved" if got == printed else "confirmed-discrepancy"
            errata.append(ErrataRecord(k.entry_id, k.claim, f"{got} primary entries of dimension {dim}", status, k.note))
    for rep in reports:
        k = known.get(rep.entry_id)
        if rep.status == "control":
            (controls if rep.control_caught else unexpected).append(rep.entry_id)
            continue
        if rep.passed:
            if k is not None:
                errata.append(ErrataRecord(rep.entry_id, k.claim, "all checks pass", "resolved", k.note))
            continue
        if k is None:
            unexpected.append(rep.entry_id)
            errata.extend(rep.errata)
            continue
        if rep.errata:
            for e in rep.errata:
                errata.append(ErrataRecord(e.entry_id, k.claim, e.computed, "confirmed-discrepancy", k.note or e.note))
        else:
            errata.append(
                ErrataRecord(rep.entry_id, k.claim, _failure_text(rep) or k.computed, "confirmed-discrepancy", k.note)
            )
    return Summary(reports, errata, unexpected, controls)


def _verify_raw(args):
    raw, seed, chart = args
    try:
        entry = compile_entry(raw)
    except EntryError as exc:
        return VerificationReport(raw.id, raw.get("kind"), error=str(exc), status=raw.get("status", "primary"))
    return verify_entry(entry, seed, chart)


def verify_all(
    entries,
    known: dict[str, KnownDiscrepancy] | None = None,
    seed: int = 0,
    chart_pattern: str | None = None,
    jobs: int = 1,
    check_census: bool = False,
) -> Summary:
    """Verify entries (compiled or raw) and merge the reports by entry id."""
    known = known or {}
    raws = [e.raw if isinstance(e, CatalogEntry) else e for e in entries]
    tasks = [(r, seed, chart_pattern) for r in raws]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(_verify_raw, tasks, chunksize=1))
    else:
        reports = [_verify_raw(t) for t in tasks]
    reports.sort(key=lambda r: r.entry_id)
    return reconcile(reports, known, raw_census(raws) if check_census else None)


# ------------------------------------------------------------------- census


def raw_census(raws) -> dict[int, int]:
    """Census computed from raw blocks without compiling them."""
    out: dict[int, int] = {}
    for r in raws:
        if r.get("census") and r.get("status", "primary") == "primary":
            d = int(r.get("census"))
            out[d] = out.get(d, 0) + 1
    return dict(sorted(out.items()))


def census(entries) -> dict[int, int]:
    """Number of primary entries carrying a census dimension, per dimension."""
    out: dict[int, int] = {}
    for e in entries:
        if e.census is not None and e.status == "primary":
            out[e.census] = out.get(e.census, 0) + 1
    return dict(sorted(out.items()))
