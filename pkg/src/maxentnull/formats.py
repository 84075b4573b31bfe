"""File formats: FIMI transactions, dense CSV, edge lists, margins files,
and canonical JSON.

All writers are deterministic (sorted cell order, fixed float formatting)
so identical inputs produce byte-identical files.  Floats are written with
17 significant digits, which round-trips IEEE doubles exactly; infinities
use the Infinity/-Infinity literals accepted by Python's json parser.

Node and item ids are 0-based on disk.  Row/column indices inside model
files are 1-based; the matrix lives 0-based in memory.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .errors import InfeasibleError, InputFormatError
from .matrix import (
    DataMatrix,
    MarginTargets,
    Structure,
    StructureKind,
    ValueDomain,
    database,
)


def read_text(path) -> str:
    return Path(path).read_text(encoding="utf-8")


def write_text(path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# -- canonical JSON ----------------------------------------------------------


def format_float(x: float) -> str:
    if math.isnan(x):
        raise ValueError("NaN is not serializable")
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".17g")


def canonical_json(obj, indent: int = 0) -> str:
    """Serialize with sorted keys and 17-significant-digit floats."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        parts = [
            f"{inner}{json.dumps(str(k))}: {canonical_json(obj[k], indent + 1)}"
            for k in sorted(obj, key=str)
        ]
        return "{\n" + ",\n".join(parts) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        parts = [f"{inner}{canonical_json(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(parts) + f"\n{pad}]"
    if isinstance(obj, bool) or isinstance(obj, np.bool_):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def parse_json(text: str) -> dict:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputFormatError(f"invalid JSON: {exc}") from exc


# -- FIMI transactions -------------------------------------------------------


def parse_fimi(text: str, n: int | None = None) -> DataMatrix:
    """One transaction per line; 0-based integer item ids; blank line =
    empty transaction. Columns default to max item id + 1."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    entries: dict[tuple[int, int], int] = {}
    max_item = -1
    for i, line in enumerate(lines):
        for tok in line.split():
            try:
                item = int(tok)
            except ValueError as exc:
                raise InputFormatError(f"line {i + 1}: bad item id {tok!r}") from exc
            if item < 0:
                raise InputFormatError(f"line {i + 1}: negative item id {item}")
            max_item = max(max_item, item)
            entries[(i, item)] = 1
    cols = max_item + 1 if n is None else n
    if max_item >= cols:
        raise InputFormatError(f"item id {max_item} exceeds declared columns {cols}")
    return DataMatrix(database(), ValueDomain.BINARY, len(lines), cols, entries)


def format_fimi(data: DataMatrix) -> str:
    if data.domain is not ValueDomain.BINARY or data.structure.is_network:
        raise ValueError("FIMI format holds binary databases only")
    rows: list[list[int]] = [[] for _ in range(data.m)]
    for (i, j) in data.entries:
        rows[i].append(j)
    return "".join(" ".join(str(j) for j in sorted(r)) + "\n" for r in rows)


# -- dense CSV ---------------------------------------------------------------


def parse_csv_matrix(text: str, domain: ValueDomain) -> DataMatrix:
    """Comma-separated numeric rows, no header."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    values = []
    for i, line in enumerate(lines):
        try:
            row = [float(tok) for tok in line.split(",")]
        except ValueError as exc:
            raise InputFormatError(f"line {i + 1}: {exc}") from exc
        values.append(row)
        if len(row) != len(values[0]):
            raise InputFormatError(f"line {i + 1}: ragged row")
    m = len(values)
    n = len(values[0]) if values else 0
    entries = {}
    for i, row in enumerate(values):
        for j, v in enumerate(row):
            if v != 0:
                entries[(i, j)] = v
    try:
        return DataMatrix(database(), domain, m, n, entries)
    except ValueError as exc:
        raise InputFormatError(str(exc)) from exc


def _format_value(v, domain: ValueDomain) -> str:
    return str(int(v)) if domain.is_discrete else format_float(float(v))


def format_csv_matrix(data: DataMatrix) -> str:
    if data.structure.is_network:
        raise ValueError("CSV format holds databases only")
    out = []
    for i in range(data.m):
        out.append(
            ",".join(_format_value(data.get(i, j), data.domain) if data.get(i, j) else "0"
                     for j in range(data.n))
        )
    return "".join(line + "\n" for line in out)


# -- edge lists --------------------------------------------------------------


def parse_edgelist(
    text: str,
    structure: Structure,
    domain: ValueDomain,
    n: int | None = None,
) -> DataMatrix:
    """Lines ``u v`` (weight 1) or ``u v w``; 0-based node ids; ``#`` starts
    a comment line; undirected edges are listed once in either orientation."""
    if not structure.is_network:
        raise ValueError("edge lists hold networks only")
    entries: dict[tuple[int, int], float] = {}
    max_node = -1
    for lineno, line in enumerate(text.split("\n"), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        toks = line.split()
        if len(toks) not in (2, 3):
            raise InputFormatError(f"line {lineno}: expected 'u v' or 'u v w'")
        try:
            u, v = int(toks[0]), int(toks[1])
            w = float(toks[2]) if len(toks) == 3 else 1.0
        except ValueError as exc:
            raise InputFormatError(f"line {lineno}: {exc}") from exc
        if u < 0 or v < 0:
            raise InputFormatError(f"line {lineno}: negative node id")
        if structure.is_undirected and u > v:
            u, v = v, u
        if (u, v) in entries:
            raise InputFormatError(f"line {lineno}: duplicate edge ({u}, {v})")
        entries[(u, v)] = w
        max_node = max(max_node, u, v)
    nodes = max_node + 1 if n is None else n
    if max_node >= nodes:
        raise InputFormatError(f"node id {max_node} exceeds declared size {nodes}")
    try:
        return DataMatrix(structure, domain, nodes, nodes, entries)
    except ValueError as exc:
        raise InputFormatError(str(exc)) from exc


def format_edgelist(data: DataMatrix) -> str:
    if not data.structure.is_network:
        raise ValueError("edge lists hold networks only")
    lines = []
    for (u, v) in sorted(data.entries):
        w = data.entries[(u, v)]
        if data.domain is ValueDomain.BINARY:
            lines.append(f"{u} {v}")
        else:
            lines.append(f"{u} {v} {_format_value(w, data.domain)}")
    return "".join(line + "\n" for line in lines)


# -- margins files -----------------------------------------------------------


def _parse_target_lines(lines, offset) -> list[float]:
    out = []
    for k, line in enumerate(lines):
        line = line.strip()
        if not line:
            continue
        try:
            out.append(float(line))
        except ValueError as exc:
            raise InputFormatError(f"line {offset + k + 1}: {exc}") from exc
    return out


def parse_margins(text: str, structure: Structure) -> MarginTargets:
    """Row targets, then ``---`` on its own line, then column targets.
    Undirected networks use a single section (the degree sequence); a
    directed network given one section uses it for both in- and out-degrees.
    """
    lines = text.split("\n")
    sections: list[list[str]] = [[]]
    for line in lines:
        if line.strip() == "---":
            sections.append([])
        else:
            sections[-1].append(line)
    if len(sections) > 2:
        raise InputFormatError("margins file has more than one '---' separator")
    offset = 0
    parsed = []
    for sec in sections:
        parsed.append(_parse_target_lines(sec, offset))
        offset += len(sec) + 1
    try:
        if structure.is_undirected:
            if len(parsed) != 1:
                raise InputFormatError("undirected margins use a single section")
            return MarginTargets(parsed[0], parsed[0])
        if len(parsed) == 1:
            if structure.kind is StructureKind.DATABASE:
                raise InputFormatError("database margins need 'row --- col' sections")
            return MarginTargets(parsed[0], parsed[0])
        return MarginTargets(parsed[0], parsed[1])
    except ValueError as exc:
        if isinstance(exc, (InputFormatError, InfeasibleError)):
            raise
        raise InputFormatError(str(exc)) from exc


def format_margins(targets: MarginTargets, structure: Structure) -> str:
    rows = "".join(format_float(v) + "\n" for v in targets.row_targets)
    if structure.is_undirected:
        return rows
    cols = "".join(format_float(v) + "\n" for v in targets.col_targets)
    return rows + "---\n" + cols


# -- dispatch ----------------------------------------------------------------

FORMAT_NAMES = ("fimi", "csv", "edgelist")


def parse_matrix(
    text: str,
    fmt: str,
    domain: ValueDomain,
    structure: Structure,
    n: int | None = None,
) -> DataMatrix:
    if fmt == "fimi":
        if domain is not ValueDomain.BINARY or structure.is_network:
            raise InputFormatError("fimi format requires a binary database")
        return parse_fimi(text, n=n)
    if fmt == "csv":
        if structure.is_network:
            raise InputFormatError("csv format holds databases; use edgelist")
        return parse_csv_matrix(text, domain)
    if fmt == "edgelist":
        return parse_edgelist(text, structure, domain, n=n)
    raise InputFormatError(f"unknown format {fmt!r}")


def format_matrix(data: DataMatrix, fmt: str) -> str:
    if fmt == "fimi":
        return format_fimi(data)
    if fmt == "csv":
        return format_csv_matrix(data)
    if fmt == "edgelist":
        return format_edgelist(data)
    raise InputFormatError(f"unknown format {fmt!r}")


def matrix_extension(fmt: str) -> str:
    return {"fimi": "fimi", "csv": "csv", "edgelist": "edges"}[fmt]
