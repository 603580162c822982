"""Semicolon-delimited numeric dataset ingestion and summary statistics.

The expected file format is the UCI wine-quality layout: a header row of
(possibly quoted) column names followed by numeric rows, ';' separated.
Blank or NA cells are kept as missing values; they are reported by the
statistics and rejected by fixed-point encoding.

Note on medians: the statistics table uses the conventional mid-average
median (mean of the two middle values for even counts).  The selection
engine in :mod:`bitmedian.bitplane` deliberately returns the lower median
instead; the two agree for odd counts.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, replace
from pathlib import Path

from .errors import MissingError, ParseError, RangeError, ShapeError
from .fixedpoint import FixedPointCodec, codec_for_values, encode

__all__ = [
    "Dataset",
    "StatsRow",
    "STAT_LABELS",
    "parse",
    "serialize",
    "summary_stats",
    "encode_dataset",
    "format_stats_text",
    "stats_to_csv",
]

_NA_TOKENS = {"", "na", "n/a", "nan"}


@dataclass(frozen=True)
class Dataset:
    """An immutable parsed table; ``encoded``/``codec`` are set by
    :func:`encode_dataset`."""

    column_names: tuple[str, ...]
    rows: tuple[tuple[float | None, ...], ...]
    source: str = "<memory>"
    codec: FixedPointCodec | None = None
    encoded: tuple[tuple[int, ...], ...] | None = None

    @property
    def n(self) -> int:
        return len(self.rows)

    @property
    def d(self) -> int:
        return len(self.column_names)

    def column(self, j: int) -> list[float | None]:
        return [row[j] for row in self.rows]


def _looks_numeric(fields) -> bool:
    for f in fields:
        tok = f.strip()
        if tok.lower() in _NA_TOKENS:
            continue
        try:
            float(tok)
        except ValueError:
            return False
    return True


def parse(source, delimiter: str = ";", header="auto") -> Dataset:
    """Parse a delimited numeric file into a Dataset.

    ``source`` is a path or a text file object.  ``header`` may be True,
    False, or "auto" (headerless if every field of the first row parses as a
    number; synthesized names c0..c{d-1} are used then).  Raises ParseError
    on malformed numerics (with 1-based line/column location), ShapeError on
    ragged rows.
    """
    if hasattr(source, "read"):
        return _parse_stream(source, delimiter, header, getattr(source, "name", "<stream>"))
    path = Path(source)
    with open(path, "r", encoding="utf-8-sig", newline="") as fh:
        return _parse_stream(fh, delimiter, header, str(path))


def _parse_stream(fh, delimiter, header, source_name) -> Dataset:
    reader = csv.reader(fh, delimiter=delimiter)
    records = [(lineno, row) for lineno, row in enumerate(reader, start=1) if row]
    if not records:
        raise ParseError(f"{source_name}: empty input")

    first_line, first_row = records[0]
    first_fields = [f.strip().strip('"') for f in first_row]
    if header == "auto":
        has_header = not _looks_numeric(first_fields)
    else:
        has_header = bool(header)
    if has_header:
        names = tuple(first_fields)
        data_records = records[1:]
    else:
        names = tuple(f"c{j}" for j in range(len(first_row)))
        data_records = records

    if not data_records:
        raise ParseError(f"{source_name}: no data rows")

    d = len(names)
    rows = []
    for lineno, raw in data_records:
        if len(raw) != d:
            raise ShapeError(
                f"{source_name}: line {lineno} has {len(raw)} fields, expected {d}"
            )
        vals = []
        for j, tok in enumerate(raw):
            tok = tok.strip()
            if tok.lower() in _NA_TOKENS:
                vals.append(None)
                continue
            try:
                vals.append(float(tok))
            except ValueError:
                raise ParseError(
                    f"{source_name}: malformed number {tok!r}", row=lineno, col=j + 1
                ) from None
        rows.append(tuple(vals))
    return Dataset(column_names=names, rows=tuple(rows), source=source_name)


def serialize(ds: Dataset, target, delimiter: str = ";") -> None:
    """Write the dataset back out; floats use repr so a re-parse is
    bit-exact."""

    def _write(fh):
        w = csv.writer(fh, delimiter=delimiter, lineterminator="\n")
        w.writerow(ds.column_names)
        for row in ds.rows:
            w.writerow(["" if v is None else repr(v) for v in row])

    if hasattr(target, "write"):
        _write(target)
    else:
        with open(target, "w", encoding="utf-8", newline="") as fh:
            _write(fh)


@dataclass(frozen=True)
class StatsRow:
    """Per-column descriptive statistics, labeled like the reference table."""

    name: str
    nbr_val: int
    nbr_null: int
    nbr_na: int
    min: float | None = None
    max: float | None = None
    range: float | None = None
    sum: float | None = None
    median: float | None = None
    mean: float | None = None
    se_mean: float | None = None
    ci_mean_095: float | None = None
    var: float | None = None
    std_dev: float | None = None
    coef_var: float | None = None


STAT_LABELS = (
    ("nbr.val", "nbr_val"),
    ("nbr.null", "nbr_null"),
    ("nbr.na", "nbr_na"),
    ("min", "min"),
    ("max", "max"),
    ("range", "range"),
    ("sum", "sum"),
    ("median", "median"),
    ("mean", "mean"),
    ("SE.mean", "se_mean"),
    ("CI.mean.0.95", "ci_mean_095"),
    ("var", "var"),
    ("std.dev", "std_dev"),
    ("coef.var", "coef_var"),
)


def summary_stats(ds: Dataset, ci_quantile: float = 1.96) -> list[StatsRow]:
    """Descriptive statistics per column.

    nbr.null counts exact zeros among the present values; nbr.na counts
    missing cells.  The median mid-averages for even counts; variance uses
    the sample (n-1) denominator; SE.mean = std.dev/sqrt(n); the 0.95 CI
    half-width is ci_quantile * SE.mean (1.96 = normal approximation; pass a
    Student-t quantile for small samples).  coef.var = std.dev/mean when the
    mean is nonzero.  An all-missing column yields an all-NA row.
    """
    out = []
    for j, name in enumerate(ds.column_names):
        col = ds.column(j)
        vals = [v for v in col if v is not None]
        nv = len(vals)
        na = len(col) - nv
        null = sum(1 for v in vals if v == 0)
        if nv == 0:
            out.append(StatsRow(name=name, nbr_val=0, nbr_null=0, nbr_na=na))
            continue
        mn, mx = min(vals), max(vals)
        total = math.fsum(vals)
        mean = total / nv
        srt = sorted(vals)
        mid = nv // 2
        med = srt[mid] if nv % 2 else (srt[mid - 1] + srt[mid]) / 2
        var = std = se = ci = None
        if nv >= 2:
            var = math.fsum((v - mean) ** 2 for v in vals) / (nv - 1)
            std = math.sqrt(var)
            se = std / math.sqrt(nv)
            ci = ci_quantile * se
        coef = None
        if std is not None and mean != 0:
            coef = std / mean
        out.append(
            StatsRow(
                name=name,
                nbr_val=nv,
                nbr_null=null,
                nbr_na=na,
                min=mn,
                max=mx,
                range=mx - mn,
                sum=total,
                median=med,
                mean=mean,
                se_mean=se,
                ci_mean_095=ci,
                var=var,
                std_dev=std,
                coef_var=coef,
            )
        )
    return out


def encode_dataset(ds: Dataset, codec: FixedPointCodec | None = None) -> Dataset:
    """Attach a fixed-point encoding of every cell.

    Missing cells raise MissingError; out-of-range cells raise RangeError,
    both naming the offending (row, column).  Without an explicit codec the
    finest 64-bit codec fitting the data is derived.
    """
    for i, row in enumerate(ds.rows):
        for j, v in enumerate(row):
            if v is None:
                raise MissingError(
                    f"missing value at row {i}, column {j} ({ds.column_names[j]})"
                )
    if codec is None:
        codec = codec_for_values([v for row in ds.rows for v in row])
    encoded = []
    for i, row in enumerate(ds.rows):
        words = []
        for j, v in enumerate(row):
            try:
                words.append(encode(v, codec))
            except RangeError as exc:
                raise RangeError(
                    f"row {i}, column {j} ({ds.column_names[j]}): {exc}"
                ) from None
        encoded.append(tuple(words))
    return replace(ds, codec=codec, encoded=tuple(encoded))


def _fmt(v) -> str:
    if v is None:
        return "NA"
    if isinstance(v, int):
        return str(v)
    return f"{v:.6g}"


def format_stats_text(stats: list[StatsRow], block: int = 4) -> str:
    """Aligned text table, statistics as rows and variables as columns,
    split into blocks of ``block`` variables."""
    lines = []
    for start in range(0, len(stats), block):
        chunk = stats[start : start + block]
        headers = [s.name for s in chunk]
        cols = [
            [_fmt(getattr(s, attr)) for _label, attr in STAT_LABELS] for s in chunk
        ]
        widths = [
            max(len(h), max(len(c) for c in col)) for h, col in zip(headers, cols)
        ]
        label_w = max(len(label) for label, _ in STAT_LABELS)
        lines.append(
            " " * label_w
            + "  "
            + "  ".join(h.rjust(w) for h, w in zip(headers, widths))
        )
        for r, (label, _attr) in enumerate(STAT_LABELS):
            lines.append(
                label.ljust(label_w)
                + "  "
                + "  ".join(col[r].rjust(w) for col, w in zip(cols, widths))
            )
        lines.append("")
    return "\n".join(lines).rstrip("\n") + "\n"


def stats_to_csv(stats: list[StatsRow]) -> str:
    """CSV with one row per variable and one column per statistic."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["column"] + [label for label, _ in STAT_LABELS])
    for s in stats:
        w.writerow(
            [s.name]
            + [
                "" if getattr(s, attr) is None else repr(getattr(s, attr))
                if isinstance(getattr(s, attr), float)
                else str(getattr(s, attr))
                for _label, attr in STAT_LABELS
            ]
        )
    return buf.getvalue()
