"""Claim and golden-standard file ingestion, plus author-list normalization.

Claim files are delimited text with a ``source,object,value`` header;
golden files carry ``object,value``. The delimiter is configurable
(comma by default, tab supported) and fields are quote-aware, so a
value may contain the delimiter when quoted.
"""

from __future__ import annotations

import csv
import re
from collections.abc import Iterable, Mapping, Sequence
from pathlib import Path

from .errors import DuplicateObject, EmptyFile, ParseError
from .model import Claim, ObjectId, Value

_AND_SPLIT = re.compile(r"\s*\band\b\s*", re.IGNORECASE)
_EDGE_PUNCT = re.compile(r"^[^0-9a-z]+|[^0-9a-z]+$")


def _clean_token(token: str) -> str:
    # keep internal hyphens/apostrophes ("o'brien", "smith-jones")
    return _EDGE_PUNCT.sub("", token.lower())


def _comma_groups(part: str) -> list[str]:
    """Split one segment on commas, flipping a surname-first single author.

    A single comma with exactly one token before it reads as
    "last, first [middles]" and is reordered; any other comma pattern
    separates author groups.
    """
    if "," not in part:
        return [part]
    pieces = [p.strip() for p in part.split(",") if p.strip()]
    if len(pieces) == 2 and len(pieces[0].split()) == 1:
        return [f"{pieces[1]} {pieces[0]}"]
    return pieces


def _normalize_author(group: str) -> str:
    tokens = [t for t in (_clean_token(tok) for tok in group.split()) if t]
    if not tokens:
        return ""
    if len(tokens) == 1:
        return tokens[0]
    # first and last survive; middle names and initials drop
    return f"{tokens[0]} {tokens[-1]}"


def normalize_author_list(raw: str) -> Value:
    """Canonical form of an author list: ``first last; first last; ...``.

    Authors split on semicolons, the word "and", or commas between name
    groups; each author keeps only the first and last name, lowercased;
    order is preserved. Empty input normalizes to the empty string
    (rejected later by claim validation).
    """
    text = " ".join(raw.split())
    if not text:
        return ""
    groups: list[str] = []
    for segment in text.split(";"):
        for part in _AND_SPLIT.split(segment):
            part = part.strip().strip(",").strip()
            if part:
                groups.extend(_comma_groups(part))
    authors = [a for a in (_normalize_author(g) for g in groups) if a]
    return "; ".join(authors)


def _plain_normalize(raw: str) -> Value:
    return " ".join(raw.split())


def _read_rows(
    path: str | Path, delimiter: str, expected_header: Sequence[str]
) -> list[tuple[int, list[str]]]:
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle, delimiter=delimiter)
        rows = [(number, row) for number, row in enumerate(reader, start=1) if row]
    if not rows:
        raise EmptyFile(f"{path} is empty")
    header_number, header = rows[0]
    normalized = [cell.strip().lower() for cell in header]
    if normalized != list(expected_header):
        raise ParseError(
            f"expected header {','.join(expected_header)!r}, got {header!r}",
            line=header_number,
        )
    body = rows[1:]
    if not body:
        raise EmptyFile(f"{path} has a header but no data rows")
    return body


def parse_claims(
    path: str | Path,
    delimiter: str = ",",
    normalize: bool = True,
) -> list[Claim]:
    """Read one claim per row, in row order.

    ``normalize`` passes values through the author-list normalizer;
    when off, values only get whitespace collapsed.
    """
    normalizer = normalize_author_list if normalize else _plain_normalize
    claims: list[Claim] = []
    for number, row in _read_rows(path, delimiter, ("source", "object", "value")):
        if len(row) != 3:
            raise ParseError(f"expected 3 fields, got {len(row)}", line=number)
        source, obj, raw_value = (cell.strip() for cell in row)
        value = normalizer(raw_value)
        if not source or not obj or not value:
            raise ParseError(f"blank field in row {row!r}", line=number)
        claims.append(Claim(source, obj, value))
    return claims


def parse_golden(
    path: str | Path,
    delimiter: str = ",",
    normalize: bool = True,
) -> dict[ObjectId, Value]:
    """Read a golden standard: one normalized truth per unique object."""
    normalizer = normalize_author_list if normalize else _plain_normalize
    golden: dict[ObjectId, Value] = {}
    for number, row in _read_rows(path, delimiter, ("object", "value")):
        if len(row) != 2:
            raise ParseError(f"expected 2 fields, got {len(row)}", line=number)
        obj, raw_value = (cell.strip() for cell in row)
        value = normalizer(raw_value)
        if not obj or not value:
            raise ParseError(f"blank field in row {row!r}", line=number)
        if obj in golden:
            raise DuplicateObject(f"object {obj!r} listed twice")
        golden[obj] = value
    return golden


def parse_truths(
    path: str | Path,
    delimiter: str = ",",
    normalize: bool = False,
) -> dict[ObjectId, Value]:
    """Read a fused-truths file (``object,value[,probability]``).

    Accepts plain golden-format files too; extra columns after the
    value are ignored. Fused outputs are already normalized, so
    normalization defaults off here.
    """
    normalizer = normalize_author_list if normalize else _plain_normalize
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle, delimiter=delimiter)
        rows = [(number, row) for number, row in enumerate(reader, start=1) if row]
    if not rows:
        raise EmptyFile(f"{path} is empty")
    header_number, header = rows[0]
    normalized_header = [cell.strip().lower() for cell in header]
    if normalized_header[:2] != ["object", "value"]:
        raise ParseError(
            f"expected header starting 'object,value', got {header!r}",
            line=header_number,
        )
    truths: dict[ObjectId, Value] = {}
    for number, row in rows[1:]:
        if len(row) < 2:
            raise ParseError(f"expected at least 2 fields, got {len(row)}", line=number)
        obj = row[0].strip()
        value = normalizer(row[1].strip())
        if not obj or not value:
            raise ParseError(f"blank field in row {row!r}", line=number)
        if obj in truths:
            raise DuplicateObject(f"object {obj!r} listed twice")
        truths[obj] = value
    return truths


def _open_writer(path: str | Path, delimiter: str):
    handle = Path(path).open("w", newline="", encoding="utf-8")
    return handle, csv.writer(handle, delimiter=delimiter, lineterminator="\n")


def write_claims(
    path: str | Path, claims: Iterable[Claim], delimiter: str = ","
) -> None:
    handle, writer = _open_writer(path, delimiter)
    with handle:
        writer.writerow(["source", "object", "value"])
        for claim in claims:
            writer.writerow([claim.source, claim.object, claim.value])


def write_golden(
    path: str | Path, golden: Mapping[ObjectId, Value], delimiter: str = ","
) -> None:
    handle, writer = _open_writer(path, delimiter)
    with handle:
        writer.writerow(["object", "value"])
        for obj, value in sorted(golden.items()):
            writer.writerow([obj, value])


def write_truths(
    path: str | Path,
    truths: Mapping[ObjectId, Value],
    probabilities: Mapping[ObjectId, float] | None = None,
    delimiter: str = ",",
) -> None:
    handle, writer = _open_writer(path, delimiter)
    with handle:
        writer.writerow(["object", "value", "probability"])
        for obj, value in sorted(truths.items()):
            prob = "" if probabilities is None else str(probabilities.get(obj, ""))
            writer.writerow([obj, value, prob])
