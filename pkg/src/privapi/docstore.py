"""API documentation store.

Normalizes and serves documented-API records and renders the canonical
``name(signature):description`` line that every downstream consumer (prompt
assembly, retrieval indexing, pretraining corpus construction) relies on.

Input is a UTF-8 JSON Lines doc dump, one object per record with keys:
``api_id``, ``library``, ``name``, ``qualified_name``, ``signature``,
``description``, ``parameters`` (array of ``{name, description}``) and
``examples`` (array of strings). Unknown keys are ignored.
"""

from __future__ import annotations

import io
import json
import re
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator

from .errors import PrivApiError


class MalformedRecord(PrivApiError):
    """A doc-dump line violates the record schema."""

    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


class DuplicateApiId(PrivApiError):
    """The same api_id appeared on more than one doc-dump line."""

    def __init__(self, api_id: str, line_no: int):
        super().__init__(f"duplicate api_id {api_id!r} at line {line_no}")
        self.api_id = api_id
        self.line_no = line_no


# A sentence ends at '.', '!' or '?' followed by whitespace or end-of-text.
# No abbreviation dictionary: a mis-split "e.g." is tolerated noise.
_SENTENCE_END = re.compile(r"[.!?](?=\s|$)")


def first_sentence(text: str) -> str:
    """Return the first sentence of ``text``, terminator included.

    If no terminator is found the whole trimmed text is returned. Total
    function: empty input yields empty output.
    """
    stripped = text.strip()
    m = _SENTENCE_END.search(stripped)
    if m is None:
        return stripped
    return stripped[: m.end()]


@dataclass(frozen=True)
class ApiRecord:
    """One documented API.

    ``signature`` is the parameter-list text without enclosing parentheses;
    ``description_first`` is the first sentence of ``description_full``.
    """

    api_id: str
    library: str
    name: str
    qualified_name: str = ""
    signature: str = ""
    description_full: str = ""
    description_first: str = ""
    parameters: tuple[tuple[str, str], ...] = ()
    examples: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.api_id:
            raise ValueError("api_id must be non-empty")
        if not self.name or not self.library:
            raise ValueError(f"record {self.api_id!r}: name and library must be non-empty")


def api_info_line(record: ApiRecord) -> str:
    """Render the canonical API-information line: ``name(signature):description``."""
    return f"{record.name}({record.signature}):{record.description_first}"


class DocStore:
    """Immutable-after-ingest collection of :class:`ApiRecord`.

    ``by_name`` is a multimap: one unqualified name may map to several
    records (e.g. ``concat`` in two libraries); disambiguation is the
    consumer's job.
    """

    def __init__(self, records: Iterable[ApiRecord] = ()):
        self._records: dict[str, ApiRecord] = {}
        self.by_name: dict[str, list[str]] = {}
        self.by_library: dict[str, list[str]] = {}
        for record in records:
            self._add(record)

    def _add(self, record: ApiRecord) -> None:
        if record.api_id in self._records:
            raise DuplicateApiId(record.api_id, line_no=-1)
        self._records[record.api_id] = record
        self.by_name.setdefault(record.name, []).append(record.api_id)
        self.by_library.setdefault(record.library, []).append(record.api_id)

    def __len__(self) -> int:
        return len(self._records)

    def __contains__(self, api_id: str) -> bool:
        return api_id in self._records

    def __iter__(self) -> Iterator[ApiRecord]:
        return iter(self._records.values())

    def get(self, api_id: str) -> ApiRecord:
        return self._records[api_id]

    def records_named(self, name: str) -> list[ApiRecord]:
        return [self._records[i] for i in self.by_name.get(name, [])]

    def library_of(self, api_id: str) -> str:
        return self._records[api_id].library

    def libraries(self) -> list[str]:
        return sorted(self.by_library)


_REQUIRED_KEYS = ("api_id", "library", "name")


def _parse_record(obj: dict, line_no: int) -> ApiRecord:
    if not isinstance(obj, dict):
        raise MalformedRecord(line_no, "record is not a JSON object")
    for key in _REQUIRED_KEYS:
        value = obj.get(key)
        if not isinstance(value, str) or not value:
            raise MalformedRecord(line_no, f"missing or empty {key!r} field")
    description = obj.get("description", "")
    if not isinstance(description, str):
        raise MalformedRecord(line_no, "'description' must be a string")
    raw_params = obj.get("parameters", [])
    if not isinstance(raw_params, list):
        raise MalformedRecord(line_no, "'parameters' must be an array")
    parameters = []
    for p in raw_params:
        if not isinstance(p, dict) or "name" not in p:
            raise MalformedRecord(line_no, "each parameter needs a 'name'")
        parameters.append((str(p["name"]), str(p.get("description", ""))))
    raw_examples = obj.get("examples", [])
    if not isinstance(raw_examples, list) or not all(isinstance(e, str) for e in raw_examples):
        raise MalformedRecord(line_no, "'examples' must be an array of strings")
    return ApiRecord(
        api_id=obj["api_id"],
        library=obj["library"],
        name=obj["name"],
        qualified_name=str(obj.get("qualified_name", "")),
        signature=str(obj.get("signature", "")),
        description_full=description,
        description_first=first_sentence(description),
        parameters=tuple(parameters),
        examples=tuple(raw_examples),
    )


def ingest_doc_dump(source: IO[str] | Iterable[str]) -> DocStore:
    """Build a :class:`DocStore` from a doc-dump stream, one record per line.

    Raises :class:`MalformedRecord` (with the 1-based line number) on schema
    violations and :class:`DuplicateApiId` on repeated ids. Blank lines are
    skipped.
    """
    store = DocStore()
    for line_no, line in enumerate(source, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedRecord(line_no, f"invalid JSON: {exc.msg}") from exc
        record = _parse_record(obj, line_no)
        if record.api_id in store:
            raise DuplicateApiId(record.api_id, line_no)
        store._add(record)
    return store


def load_doc_dump(path) -> DocStore:
    with open(path, encoding="utf-8") as fh:
        return ingest_doc_dump(fh)


def record_to_json(record: ApiRecord) -> str:
    """Serialize one record back to its canonical doc-dump line."""
    return json.dumps(
        {
            "api_id": record.api_id,
            "library": record.library,
            "name": record.name,
            "qualified_name": record.qualified_name,
            "signature": record.signature,
            "description": record.description_full,
            "parameters": [{"name": n, "description": d} for n, d in record.parameters],
            "examples": list(record.examples),
        },
        ensure_ascii=False,
        sort_keys=False,
    )


def dump_store(store: DocStore, sink: IO[str] | None = None) -> str:
    """Write the store in canonical doc-dump form; ingest∘dump is the identity."""
    out = sink if sink is not None else io.StringIO()
    for record in store:
        out.write(record_to_json(record))
        out.write("\n")
    return out.getvalue() if sink is None else ""
