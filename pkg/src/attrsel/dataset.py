"""Typed tabular data model plus ARFF-subset and CSV readers/writers.

Every analysis module consumes :class:`Dataset`.  Columns are stored
column-major: numeric columns as ``float64`` with ``NaN`` marking a missing
cell, nominal columns as ``int64`` category codes with ``-1`` marking a
missing cell.  Arrays are frozen (read-only) once a Dataset is built.
"""

from __future__ import annotations

import csv
import io
import os
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence, TextIO

import numpy as np

from .errors import ParseError, SchemaError

MISSING_TOKEN = "?"
NUMERIC_KEYWORDS = ("numeric", "real", "integer")

_NUMBER_RE = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_NEEDS_QUOTES_RE = re.compile(r"[\s,{}'\"%]")


@dataclass(frozen=True)
class Attribute:
    """Attribute name and kind.  ``categories is None`` means numeric."""

    name: str
    categories: tuple[str, ...] | None = None

    def __post_init__(self):
        if not self.name:
            raise SchemaError("attribute name must be non-empty")
        if self.categories is not None:
            cats = tuple(self.categories)
            object.__setattr__(self, "categories", cats)
            if not cats:
                raise SchemaError(f"nominal attribute {self.name!r} has no categories")
            if len(set(cats)) != len(cats):
                raise SchemaError(f"nominal attribute {self.name!r} has duplicate categories")

    @classmethod
    def numeric(cls, name: str) -> "Attribute":
        return cls(name)

    @classmethod
    def nominal(cls, name: str, categories: Iterable[str]) -> "Attribute":
        return cls(name, tuple(categories))

    @property
    def is_nominal(self) -> bool:
        return self.categories is not None

    @property
    def is_numeric(self) -> bool:
        return self.categories is None


@dataclass(frozen=True, eq=False)
class Dataset:
    """Immutable column-major table with an optional numeric target.

    Parameters
    ----------
    attributes : sequence of Attribute
        Schema in source order.
    columns : sequence of array-like
        One vector per attribute, all of the same length.  Numeric columns
        use NaN for missing cells; nominal columns hold category codes and
        -1 for missing cells.
    relation : str
        Relation name carried through ARFF round-trips.
    target : int or None
        Index of the designated target attribute (must be numeric).
    """

    attributes: tuple[Attribute, ...]
    columns: tuple[np.ndarray, ...]
    relation: str = "data"
    target: int | None = None
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        attrs = tuple(self.attributes)
        if len(attrs) != len(self.columns):
            raise SchemaError(f"{len(attrs)} attributes but {len(self.columns)} columns")
        index: dict[str, int] = {}
        for i, a in enumerate(attrs):
            if a.name in index:
                raise SchemaError(f"duplicate attribute name {a.name!r}")
            index[a.name] = i
        cols = []
        n_rows = None
        for a, raw in zip(attrs, self.columns):
            col = np.asarray(raw, dtype=np.float64 if a.is_numeric else np.int64)
            if col.flags.writeable:
                col = col.copy()
            if a.is_nominal:
                bad = (col < -1) | (col >= len(a.categories))
                if bad.any():
                    raise SchemaError(
                        f"category code out of range in nominal attribute {a.name!r}"
                    )
            if col.ndim != 1:
                raise SchemaError(f"column {a.name!r} is not one-dimensional")
            if n_rows is None:
                n_rows = col.shape[0]
            elif col.shape[0] != n_rows:
                raise SchemaError(
                    f"column {a.name!r} has {col.shape[0]} cells, expected {n_rows}"
                )
            col.setflags(write=False)
            cols.append(col)
        if self.target is not None:
            if not 0 <= self.target < len(attrs):
                raise SchemaError(f"target index {self.target} out of range")
            if attrs[self.target].is_nominal:
                raise SchemaError(
                    f"target {attrs[self.target].name!r} is nominal; a numeric target is required"
                )
        object.__setattr__(self, "attributes", attrs)
        object.__setattr__(self, "columns", tuple(cols))
        object.__setattr__(self, "_index", index)

    # -- accessors ---------------------------------------------------------

    @property
    def n_rows(self) -> int:
        return int(self.columns[0].shape[0]) if self.columns else 0

    @property
    def n_attributes(self) -> int:
        return len(self.attributes)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.attributes)

    @property
    def target_name(self) -> str | None:
        return None if self.target is None else self.attributes[self.target].name

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise SchemaError(f"no attribute named {name!r}") from None

    def _resolve(self, key: int | str) -> int:
        return self.index(key) if isinstance(key, str) else int(key)

    def column(self, key: int | str) -> np.ndarray:
        return self.columns[self._resolve(key)]

    def missing(self, key: int | str) -> np.ndarray:
        """Boolean mask of missing cells for one column."""
        i = self._resolve(key)
        col = self.columns[i]
        if self.attributes[i].is_nominal:
            return col < 0
        return np.isnan(col)

    # -- derived datasets --------------------------------------------------

    def with_target(self, target: int | None) -> "Dataset":
        return Dataset(self.attributes, self.columns, self.relation, target)

    def take(self, rows) -> "Dataset":
        """Dataset restricted to ``rows`` (boolean mask or index array), order kept."""
        rows = np.asarray(rows)
        return Dataset(
            self.attributes, tuple(c[rows] for c in self.columns), self.relation, self.target
        )

    def replace_columns(self, replacements: dict[int, np.ndarray]) -> "Dataset":
        cols = list(self.columns)
        for i, col in replacements.items():
            cols[i] = col
        return Dataset(self.attributes, tuple(cols), self.relation, self.target)

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        if (
            self.attributes != other.attributes
            or self.relation != other.relation
            or self.target != other.target
            or self.n_rows != other.n_rows
        ):
            return False
        for a, b in zip(self.columns, other.columns):
            if not np.array_equal(a, b, equal_nan=a.dtype.kind == "f"):
                return False
        return True

    __hash__ = None


# -- parsing helpers ------------------------------------------------------------


def _read_text(source: str | TextIO) -> str:
    return source if isinstance(source, str) else source.read()


def _unquote(token: str) -> str:
    if len(token) >= 2 and token[0] == token[-1] and token[0] in "'\"":
        return token[1:-1]
    return token


def _split_name(rest: str, lineno: int) -> tuple[str, str]:
    """Split ``<name> <remainder>`` honouring a quoted name."""
    if rest[:1] in ("'", '"'):
        end = rest.find(rest[0], 1)
        if end < 0:
            raise ParseError("unterminated quoted attribute name", lineno, rest)
        return rest[1:end], rest[end + 1 :].strip()
    parts = rest.split(None, 1)
    return parts[0], (parts[1].strip() if len(parts) > 1 else "")


def _parse_category_list(text: str, lineno: int) -> tuple[str, ...]:
    inner = text.strip()
    if not (inner.startswith("{") and inner.endswith("}")):
        raise ParseError("malformed nominal category list", lineno, text)
    labels = [_unquote(t.strip()) for t in inner[1:-1].split(",")]
    if not labels or any(lbl == "" for lbl in labels):
        raise ParseError("empty label in nominal category list", lineno, text)
    if len(set(labels)) != len(labels):
        raise ParseError("duplicate label in nominal category list", lineno, text)
    return tuple(labels)


def _is_number(token: str) -> bool:
    return _NUMBER_RE.fullmatch(token) is not None


def _build_columns(
    attributes: Sequence[Attribute],
    raw_columns: Sequence[Sequence[str]],
    line_numbers: Sequence[int],
    extra_missing: tuple[str, ...] = (),
) -> list[np.ndarray]:
    """Convert raw string tokens column by column into typed arrays."""
    missing_tokens = {MISSING_TOKEN, *extra_missing}
    columns = []
    for attr, tokens in zip(attributes, raw_columns):
        if attr.is_numeric:
            values = np.empty(len(tokens), dtype=np.float64)
            for r, tok in enumerate(tokens):
                if tok in missing_tokens:
                    values[r] = np.nan
                elif _NUMBER_RE.fullmatch(tok):
                    values[r] = float(tok)
                else:
                    raise ParseError(
                        f"value for numeric attribute {attr.name!r} is not a number",
                        line_numbers[r],
                        tok,
                    )
        else:
            lookup = {label: code for code, label in enumerate(attr.categories)}
            values = np.empty(len(tokens), dtype=np.int64)
            for r, tok in enumerate(tokens):
                if tok in missing_tokens:
                    values[r] = -1
                    continue
                code = lookup.get(tok)
                if code is None:
                    code = lookup.get(_unquote(tok))
                if code is None:
                    raise ParseError(
                        f"label not declared for nominal attribute {attr.name!r}",
                        line_numbers[r],
                        tok,
                    )
                values[r] = code
        columns.append(values)
    return columns


def _transpose(rows: list[list[str]], width: int) -> list[Sequence[str]]:
    if not rows:
        return [[] for _ in range(width)]
    return list(zip(*rows))


# -- ARFF -------------------------------------------------------------------


def parse_arff(source: str | TextIO) -> Dataset:
    """Parse an ARFF-subset document.

    Supported: ``@relation``, ``@attribute <name> numeric|real|integer``,
    ``@attribute <name> {v1,v2,...}`` (the brace list may continue on the
    following lines), ``@data`` followed by comma-separated rows, ``?`` for
    missing cells and ``%`` comment lines.  Keywords are case-insensitive,
    attribute names are not.
    """
    text = _read_text(source)
    relation = "data"
    attributes: list[Attribute] = []
    seen: set[str] = set()
    rows: list[list[str]] = []
    row_lines: list[int] = []
    in_data = False
    pending: tuple[str, str, int] | None = None  # name, partial type text, start line

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue

        if pending is not None:
            name, partial, start = pending
            partial = f"{partial} {line}".strip() if partial else line
            if "}" not in partial:
                pending = (name, partial, start)
                continue
            pending = None
            attributes.append(Attribute.nominal(name, _parse_category_list(partial, start)))
            continue

        if in_data:
            tokens = [t.strip() for t in line.split(",")]
            if len(tokens) != len(attributes):
                raise ParseError(
                    f"row has {len(tokens)} values, expected {len(attributes)}", lineno, line
                )
            rows.append(tokens)
            row_lines.append(lineno)
            continue

        if not line.startswith("@"):
            raise ParseError("unexpected content before @data", lineno, line)
        keyword, _, rest = line.partition(" ")
        keyword = keyword.lower()
        rest = rest.strip()
        if keyword == "@relation":
            relation = _unquote(rest) or relation
        elif keyword == "@attribute":
            if not rest:
                raise ParseError("attribute declaration without a name", lineno, line)
            name, kind = _split_name(rest, lineno)
            if name in seen:
                raise ParseError("duplicate attribute name", lineno, name)
            seen.add(name)
            if not kind or (kind.startswith("{") and "}" not in kind):
                pending = (name, kind, lineno)
            elif kind.startswith("{"):
                attributes.append(Attribute.nominal(name, _parse_category_list(kind, lineno)))
            elif kind.lower() in NUMERIC_KEYWORDS:
                attributes.append(Attribute.numeric(name))
            else:
                raise ParseError("unknown attribute kind", lineno, kind)
        elif keyword == "@data":
            in_data = True
        else:
            raise ParseError("unknown keyword", lineno, keyword)

    if pending is not None:
        raise ParseError("unterminated nominal declaration", pending[2], pending[0])
    if not attributes:
        raise ParseError("no @attribute declarations found")
    raw_cols = _transpose(rows, len(attributes))
    columns = _build_columns(attributes, raw_cols, row_lines)
    return Dataset(tuple(attributes), tuple(columns), relation)


def _quote_if_needed(token: str) -> str:
    return f"'{token}'" if _NEEDS_QUOTES_RE.search(token) else token


def format_number(value: float) -> str:
    """Shortest round-tripping text for a float, dropping a trailing ``.0``."""
    text = repr(float(value))
    if text.endswith(".0"):
        text = text[:-2]
    return text


def _cell_text(attr: Attribute, value) -> str:
    if attr.is_numeric:
        return MISSING_TOKEN if np.isnan(value) else format_number(value)
    return MISSING_TOKEN if value < 0 else attr.categories[value]


def _row_texts(ds: Dataset) -> Iterable[list[str]]:
    cols = [c.tolist() for c in ds.columns]
    for r in range(ds.n_rows):
        yield [_cell_text(a, col[r]) for a, col in zip(ds.attributes, cols)]


def to_arff(ds: Dataset) -> str:
    """Serialize ``ds`` as an ARFF document that :func:`parse_arff` reads back exactly."""
    out = io.StringIO()
    out.write(f"@relation {_quote_if_needed(ds.relation)}\n\n")
    for a in ds.attributes:
        kind = "numeric" if a.is_numeric else "{" + ",".join(a.categories) + "}"
        out.write(f"@attribute {_quote_if_needed(a.name)} {kind}\n")
    out.write("\n@data\n")
    for cells in _row_texts(ds):
        out.write(",".join(cells))
        out.write("\n")
    return out.getvalue()


# -- CSV --------------------------------------------------------------------


def parse_csv(
    source: str | TextIO,
    schema_hint: Sequence[Attribute] | None = None,
    relation: str = "data",
) -> Dataset:
    """Parse a headed CSV table.

    Without ``schema_hint`` a column is numeric iff every non-missing token is
    a decimal number; otherwise it is nominal with categories in order of
    first appearance.  Both ``?`` and the empty string mark a missing cell.
    """
    text = _read_text(source)
    reader = csv.reader(io.StringIO(text))
    header: list[str] | None = None
    rows: list[list[str]] = []
    row_lines: list[int] = []
    for record in reader:
        if not record or (len(record) == 1 and not record[0].strip()):
            continue
        tokens = [t.strip() for t in record]
        if header is None:
            header = tokens
            if any(not h for h in header):
                raise ParseError("empty column name in header", reader.line_num)
            dupes = sorted({h for h in header if header.count(h) > 1})
            if dupes:
                raise ParseError("duplicate column name in header", reader.line_num, dupes[0])
            continue
        if len(tokens) != len(header):
            raise ParseError(
                f"ragged row: {len(tokens)} values, expected {len(header)}",
                reader.line_num,
                ",".join(record),
            )
        rows.append(tokens)
        row_lines.append(reader.line_num)
    if header is None:
        raise ParseError("missing header line")

    raw_cols = _transpose(rows, len(header))
    if schema_hint is not None:
        attributes = tuple(schema_hint)
        if len(attributes) != len(header):
            raise SchemaError(
                f"schema hint has {len(attributes)} attributes, header has {len(header)}"
            )
        for a, h in zip(attributes, header):
            if a.name != h:
                raise SchemaError(f"schema hint names {a.name!r} where header has {h!r}")
    else:
        inferred = []
        for name, tokens in zip(header, raw_cols):
            present = [t for t in tokens if t not in (MISSING_TOKEN, "")]
            if all(_is_number(t) for t in present):
                inferred.append(Attribute.numeric(name))
            else:
                inferred.append(Attribute.nominal(name, dict.fromkeys(present)))
        attributes = tuple(inferred)
    columns = _build_columns(attributes, raw_cols, row_lines, extra_missing=("",))
    return Dataset(attributes, tuple(columns), relation)


def to_csv(ds: Dataset) -> str:
    """Serialize ``ds`` as CSV with a header row and ``?`` for missing cells."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(ds.names)
    writer.writerows(_row_texts(ds))
    return out.getvalue()


# -- target & file helpers -----------------------------------------------------


def validate_target(ds: Dataset, name: str) -> Dataset:
    """Return ``ds`` with ``name`` designated as the (numeric) target."""
    if name not in ds.names:
        raise SchemaError(f"target attribute {name!r} not found")
    idx = ds.index(name)
    if ds.attributes[idx].is_nominal:
        raise SchemaError(f"target {name!r} is nominal; nominal targets are unsupported")
    return ds.with_target(idx)


def detect_format(path: str | os.PathLike) -> str:
    suffix = os.path.splitext(os.fspath(path))[1].lower()
    return "csv" if suffix == ".csv" else "arff"


def read_dataset(path: str | os.PathLike, fmt: str | None = None) -> Dataset:
    """Read an ARFF or CSV file; ``fmt`` defaults to a guess from the extension."""
    fmt = fmt or detect_format(path)
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if fmt == "csv":
        return parse_csv(text)
    if fmt == "arff":
        return parse_arff(text)
    raise ValueError(f"unknown input format {fmt!r}")


def write_dataset(ds: Dataset, path: str | os.PathLike, fmt: str | None = None) -> None:
    fmt = fmt or detect_format(path)
    text = to_csv(ds) if fmt == "csv" else to_arff(ds)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
