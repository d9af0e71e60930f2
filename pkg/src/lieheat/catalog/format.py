"""Line-oriented catalog files and their JSON mirror.

A file is a sequence of blocks::

    format = lieheat-catalog/1

    [T2.A3_9.3]
    kind = realization
    basis = dt; du; t*dt + 1/2*x*dx + q*u*du

Lines starting with whitespace continue the previous value. Lines starting
with ``#`` are comments. Keys are unique within a block.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

FORMAT = "lieheat-catalog/1"
_HEADER_RE = re.compile(r"^\[([A-Za-z0-9_.+\-]+)\]\s*$")
_KV_RE = re.compile(r"^([A-Za-z][A-Za-z0-9_]*)\s*=\s?(.*)$")


class CatalogFormatError(ValueError):
    """Malformed catalog text."""

    def __init__(self, msg: str, path: str | None = None, line: int | None = None):
        where = f"{path or '<text>'}:{line}" if line is not None else (path or "<text>")
        super().__init__(f"{where}: {msg}")
        self.path = path
        self.line = line


@dataclass
class RawEntry:
    id: str
    fields: dict[str, str] = field(default_factory=dict)
    line: int = 0
    path: str | None = None

    def get(self, key: str, default: str = "") -> str:
        return self.fields.get(key, default)


def parse_text(text: str, path: str | None = None) -> list[RawEntry]:
    entries: list[RawEntry] = []
    seen: set[str] = set()
    cur: RawEntry | None = None
    last_key: str | None = None
    header_ok = False
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if line[0] in " \t":
            if cur is None or last_key is None:
                raise CatalogFormatError("continuation line outside a field", path, lineno)
            cur.fields[last_key] = (cur.fields[last_key] + " " + stripped).strip()
            continue
        m = _HEADER_RE.match(stripped)
        if m:
            if not header_ok:
                raise CatalogFormatError(f"missing 'format = {FORMAT}' header", path, lineno)
            eid = m.group(1)
            if eid in seen:
                raise CatalogFormatError(f"duplicate entry id {eid}", path, lineno)
            seen.add(eid)
            cur = RawEntry(eid, {}, lineno, path)
            entries.append(cur)
            last_key = None
            continue
        m = _KV_RE.match(stripped)
        if not m:
            raise CatalogFormatError(f"cannot parse line {stripped!r}", path, lineno)
        key, value = m.group(1), m.group(2).strip()
        if cur is None:
            if key != "format":
                raise CatalogFormatError(f"field {key!r} before the first entry", path, lineno)
            if value != FORMAT:
                raise CatalogFormatError(f"unsupported format {value!r}, expected {FORMAT}", path, lineno)
            header_ok = True
            continue
        if key in cur.fields:
            raise CatalogFormatError(f"duplicate field {key!r} in {cur.id}", path, lineno)
        cur.fields[key] = value
        last_key = key
    if text.strip() and not header_ok and not entries:
        raise CatalogFormatError(f"missing 'format = {FORMAT}' header", path, 1)
    return entries


def read_file(path) -> list[RawEntry]:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise CatalogFormatError(f"cannot read file: {exc.strerror or exc}", str(p)) from None
    if not text.strip():
        return []
    return parse_text(text, str(p))


def dumps_text(entries: list[RawEntry]) -> str:
    out = [f"format = {FORMAT}", ""]
    for e in entries:
        out.append(f"[{e.id}]")
        for k, v in e.fields.items():
            out.append(f"{k} = {v}")
        out.append("")
    return "\n".join(out)


def to_json(entries: list[RawEntry]) -> dict:
    return {
        "format": FORMAT,
        "entries": [{"id": e.id, "line": e.line, "fields": dict(e.fields)} for e in entries],
    }


def from_json(doc: dict, path: str | None = None) -> list[RawEntry]:
    if doc.get("format") != FORMAT:
        raise CatalogFormatError(f"unsupported format {doc.get('format')!r}", path)
    out = []
    for item in doc.get("entries", []):
        fields = item.get("fields")
        if not isinstance(item.get("id"), str) or not isinstance(fields, dict):
            raise CatalogFormatError("entry needs string 'id' and object 'fields'", path)
        out.append(RawEntry(item["id"], {str(k): str(v) for k, v in fields.items()}, item.get("line", 0), path))
    return out


def dumps_json(entries: list[RawEntry]) -> str:
    return json.dumps(to_json(entries), indent=2, ensure_ascii=False) + "\n"


def split_list(value: str, sep: str = ";") -> list[str]:
    """Split on ``sep`` at bracket depth zero."""
    out, depth, cur = [], 0, []
    for ch in value:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == sep and depth == 0:
            out.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    tail = "".join(cur).strip()
    if tail:
        out.append(tail)
    return [s for s in out if s]
