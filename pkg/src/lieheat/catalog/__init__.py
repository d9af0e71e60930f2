"""Machine-readable catalog of realizations, equations and maps, with its verifier."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from ..algebra import DependentBasisError, NotClosedError, structure_constants
from .format import FORMAT, CatalogFormatError, RawEntry, dumps_json, from_json, parse_text, read_file, to_json
from .model import CatalogEntry, Chart, EntryError, LabelSpec, Step, compile_entry, dependent_text, equation_text, load_entries, specialize
from .verify import (
    Check,
    ErrataRecord,
    KnownDiscrepancy,
    Summary,
    VerificationReport,
    census,
    raw_census,
    load_errata,
    reconcile,
    verify_abstract,
    verify_all,
    verify_entry,
    verify_obstruction,
    verify_realization,
    verify_reduction,
    verify_subgroup,
    verify_symmetry_listing,
)

DATA_FILES = ("tables123.cat", "extended.cat", "reductions.cat", "abstract.cat", "subgroups.cat", "variants.cat")
CONTROL_FILE = "controls.cat"
ERRATA_FILE = "errata.cat"


def data_path(name: str) -> Path:
    return Path(str(resources.files(__package__).joinpath("data", name)))


def _validate(entry: CatalogEntry) -> None:
    if entry.kind != "realization" or entry.status != "primary":
        return
    try:
        structure_constants(entry.basis, entry.rules)
    except (NotClosedError, DependentBasisError) as exc:
        raise EntryError(f"entry {entry.id}: {exc}", entry.raw.path, entry.raw.line) from None


def load(path, validate: bool = True) -> list[CatalogEntry]:
    """Parse a catalog file; primary realizations must close under the bracket."""
    entries = load_entries(read_file(path))
    if validate:
        for e in entries:
            _validate(e)
    return entries


def load_shipped(names=DATA_FILES, validate: bool = False) -> list[CatalogEntry]:
    out = []
    for n in names:
        out.extend(load(data_path(n), validate))
    return out


def shipped_errata() -> dict[str, KnownDiscrepancy]:
    return load_errata(read_file(data_path(ERRATA_FILE)))
