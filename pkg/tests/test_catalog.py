import json

import pytest
from hypothesis import given, settings, strategies as st

from lieheat.catalog import (
    CONTROL_FILE,
    CatalogFormatError,
    Chart,
    EntryError,
    RawEntry,
    census,
    compile_entry,
    data_path,
    dumps_json,
    from_json,
    load,
    load_shipped,
    parse_text,
    read_file,
    shipped_errata,
    specialize,
    to_json,
    verify_all,
    verify_entry,
)
from lieheat.catalog.format import dumps_text
from lieheat.expr import Num, Sym

HEADER = "format = lieheat-catalog/1\n\n"


def test_text_and_json_round_trip():
    raws = read_file(data_path("tables123.cat"))
    again = parse_text(dumps_text(raws))
    assert [(r.id, r.fields) for r in again] == [(r.id, r.fields) for r in raws]
    back = from_json(json.loads(dumps_json(raws)))
    assert [(r.id, r.fields) for r in back] == [(r.id, r.fields) for r in raws]


@settings(max_examples=50)
@given(
    st.lists(
        st.tuples(
            st.from_regex(r"[A-Z][A-Za-z0-9_.]{0,6}", fullmatch=True),
            st.dictionaries(
                st.from_regex(r"[a-z][a-z0-9_]{0,5}", fullmatch=True),
                st.from_regex(r"[a-z0-9(]([a-z0-9*+ ()^-]{0,12}[a-z0-9)])?", fullmatch=True),
                max_size=4,
            ),
        ),
        max_size=4,
        unique_by=lambda p: p[0],
    )
)
def test_format_round_trip_property(items):
    raws = [RawEntry(i, f) for i, f in items]
    assert [(r.id, r.fields) for r in parse_text(dumps_text(raws))] == items
    assert [(r.id, r.fields) for r in from_json(to_json(raws))] == items


def test_empty_file_is_an_empty_catalog(tmp_path):
    p = tmp_path / "empty.cat"
    p.write_text("")
    assert load(p) == []
    s = verify_all([])
    assert s.ok and s.counts()["entries"] == 0


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("[A]\nkind = abstract\n", "missing 'format"),
        (HEADER + "[A]\n[A]\n", "duplicate entry id"),
        (HEADER + "[A]\nkind = x\nkind = y\n", "duplicate field"),
        (HEADER + "  dangling\n", "continuation line"),
        ("format = other/2\n", "unsupported format"),
    ],
)
def test_format_errors_carry_line(text, fragment):
    with pytest.raises(CatalogFormatError, match=fragment) as info:
        parse_text(text, "x.cat")
    assert info.value.line


def test_non_closing_basis_is_rejected_on_load(tmp_path):
    p = tmp_path / "bad.cat"
    p.write_text(HEADER + "[BAD]\nkind = realization\nbasis = dx; x^2*du\nF = u_x^2\n")
    with pytest.raises(EntryError, match="not in the span"):
        load(p)
    assert len(load(p, validate=False)) == 1


def test_unknown_kind_is_an_entry_error():
    with pytest.raises(EntryError, match="unknown kind"):
        compile_entry(RawEntry("X", {"kind": "poem"}))


def test_specialize_fixes_sign_symbols():
    raw = RawEntry("S", {"kind": "realization", "signs": "eps", "basis": "dx", "F": "eps*u_x^2"})
    entry = compile_entry(raw)
    eps = Sym("eps", "sign")
    fixed, rest = specialize(entry, Chart("eps=-1", ((eps, Num(-1)),)))
    assert rest.bindings == ()
    assert fixed.F != entry.F
    assert verify_entry(fixed).passed


def test_shipped_catalog_reconciles(shipped_summary):
    summary, _, _ = shipped_summary
    assert summary.unexpected == []
    known = shipped_errata()
    failing = {r.entry_id for r in summary.reports if not r.passed}
    assert failing <= set(known)
    assert all(r.passed for r in summary.reports if r.status == "primary" and r.entry_id not in known)


def test_census_and_record(shipped_summary):
    summary, _, _ = shipped_summary
    entries = load_shipped()
    assert census(entries) == {1: 3, 2: 7, 3: 28, 4: 12}
    rec = [e for e in summary.errata if e.entry_id == "census.3"]
    assert len(rec) == 1 and rec[0].status == "resolved"
    assert "26" in rec[0].note


def test_negative_controls_are_caught_in_the_named_checks():
    raws = read_file(data_path(CONTROL_FILE))
    assert len(raws) == 10
    summary = verify_all(raws)
    assert summary.unexpected == []
    assert sorted(summary.controls) == sorted(r.id for r in raws)
    for rep in summary.reports:
        assert rep.control_caught, rep.entry_id
        assert all(any(c.name.startswith(p) for p in rep.expect) for c in rep.failures)


def test_control_with_wrong_expectation_is_unexpected():
    raw = read_file(data_path(CONTROL_FILE))[0]
    wrong = RawEntry(raw.id, {**raw.fields, "expect": "label"})
    summary = verify_all([wrong])
    assert summary.unexpected == [raw.id]


def test_verification_is_deterministic():
    raws = read_file(data_path("extended.cat"))
    a = [r.to_json() for r in verify_all(raws, seed=3).reports]
    b = [r.to_json() for r in verify_all(raws, seed=3).reports]
    assert a == b
