"""CSV readers and writers for datasets, targets, meta attributes and results.

Long format has one observation per row (id, time, kind, value). Wide format has
one row per (id, time) and one column per kind. Numbers are written with 17
significant digits so a write/read cycle reproduces them bit for bit.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from freshx.model import (
    ConstantTargetError,
    Dataset,
    DataError,
    FeatureId,
    FeatureMatrix,
    RelevanceRow,
    RelevanceTable,
    TargetVector,
    TestKind,
)

log = logging.getLogger(__name__)

__all__ = [
    "ConstantTargetError",
    "DuplicateEntityError",
    "DuplicateTimestampError",
    "IngestIOError",
    "LongSchema",
    "MissingColumnError",
    "MissingEntityError",
    "RaggedKindError",
    "UnparsableValueError",
    "attach_meta",
    "format_number",
    "read_dataset",
    "read_feature_matrix",
    "read_long_format",
    "read_meta",
    "read_relevance_table",
    "read_targets",
    "read_wide_format",
    "write_feature_matrix",
    "write_long_format",
    "write_relevance_table",
    "write_targets",
]


class MissingColumnError(DataError):
    pass


class UnparsableValueError(DataError):
    pass


class RaggedKindError(DataError):
    pass


class DuplicateTimestampError(DataError):
    pass


class MissingEntityError(DataError):
    pass


class DuplicateEntityError(DataError):
    pass


class IngestIOError(DataError):
    pass


@dataclass(frozen=True)
class LongSchema:
    """Column names of the logical long-format fields."""

    id: str = "id"
    time: str = "time"
    kind: str = "kind"
    value: str = "value"


def format_number(value: float) -> str:
    return "%.17g" % value


def _open_rows(path, delimiter: str):
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh, delimiter=delimiter))
    except OSError as exc:
        raise IngestIOError(f"{path}: {exc.strerror or exc}") from exc
    if not rows:
        raise MissingColumnError(f"{path}: file is empty (no header)")
    return path, rows[0], rows[1:]


def _column_index(path, header, name: str) -> int:
    try:
        return header.index(name)
    except ValueError:
        raise MissingColumnError(f"{path}: required column {name!r} not found in header {header}") from None


def _parse_float(path, line: int, column: str, text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise UnparsableValueError(f"{path}: row {line}, column {column!r}: cannot parse {text!r} as a number") from None
    if not np.isfinite(value):
        raise UnparsableValueError(f"{path}: row {line}, column {column!r}: value {text!r} is not finite")
    return value


def _time_keys(path, times: list[str]):
    try:
        return [float(t) for t in times]
    except ValueError:
        # non-numeric timestamps (e.g. ISO 8601) sort lexicographically
        return times


def _write_rows(path, header, rows, delimiter=","):
    path = Path(path)
    try:
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, delimiter=delimiter, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as exc:
        raise IngestIOError(f"{path}: {exc.strerror or exc}") from exc


def _assemble(path, groups: dict, entity_order: list[str], kinds: list[str]) -> Dataset:
    series = {}
    for kind in kinds:
        lengths = {}
        for entity in entity_order:
            if (entity, kind) not in groups:
                raise RaggedKindError(f"{path}: kind {kind!r} has no observations for entity {entity!r}")
            lengths[entity] = len(groups[entity, kind])
        if len(set(lengths.values())) != 1:
            detail = ", ".join(f"{e}={n}" for e, n in list(lengths.items())[:6])
            raise RaggedKindError(f"{path}: kind {kind!r} has differing series lengths per entity ({detail})")
        rows = []
        for entity in entity_order:
            obs = groups[entity, kind]
            keys = _time_keys(path, [t for t, _, _ in obs])
            order = sorted(range(len(obs)), key=lambda i: (keys[i], obs[i][1]))
            for a, b in zip(order, order[1:]):
                if keys[a] == keys[b]:
                    raise DuplicateTimestampError(
                        f"{path}: rows {obs[a][1]} and {obs[b][1]} repeat time {obs[a][0]!r} for ({entity}, {kind})"
                    )
            rows.append([obs[i][2] for i in order])
        series[kind] = np.array(rows, dtype=float)
    try:
        return Dataset(tuple(entity_order), series)
    except DataError as exc:
        raise DataError(f"{path}: {exc}") from exc


def read_long_format(path, schema: LongSchema = LongSchema(), delimiter: str = ",") -> Dataset:
    path, header, rows = _open_rows(path, delimiter)
    cols = {name: _column_index(path, header, getattr(schema, name)) for name in ("id", "time", "kind", "value")}
    groups: dict[tuple[str, str], list] = {}
    entity_order: dict[str, None] = {}
    kinds: dict[str, None] = {}
    for line, row in enumerate(rows, start=2):
        if not row:
            continue
        if len(row) < len(header):
            raise UnparsableValueError(f"{path}: row {line} has {len(row)} fields, header has {len(header)}")
        entity, kind = row[cols["id"]], row[cols["kind"]]
        value = _parse_float(path, line, schema.value, row[cols["value"]])
        entity_order.setdefault(entity)
        kinds.setdefault(kind)
        groups.setdefault((entity, kind), []).append((row[cols["time"]], line, value))
    return _assemble(path, groups, list(entity_order), list(kinds))


def read_wide_format(path, id_column: str = "id", time_column: str = "time", delimiter: str = ",") -> Dataset:
    """Every column other than id and time is a kind."""
    path, header, rows = _open_rows(path, delimiter)
    id_col = _column_index(path, header, id_column)
    time_col = _column_index(path, header, time_column)
    kind_cols = [(j, name) for j, name in enumerate(header) if j not in (id_col, time_col)]
    if not kind_cols:
        raise MissingColumnError(f"{path}: wide format needs at least one value column")
    groups: dict[tuple[str, str], list] = {}
    entity_order: dict[str, None] = {}
    for line, row in enumerate(rows, start=2):
        if not row:
            continue
        if len(row) < len(header):
            raise UnparsableValueError(f"{path}: row {line} has {len(row)} fields, header has {len(header)}")
        entity = row[id_col]
        entity_order.setdefault(entity)
        for j, kind in kind_cols:
            value = _parse_float(path, line, kind, row[j])
            groups.setdefault((entity, kind), []).append((row[time_col], line, value))
    return _assemble(path, groups, list(entity_order), [k for _, k in kind_cols])


def read_dataset(path, fmt: str = "long", delimiter: str = ",") -> Dataset:
    if fmt == "long":
        return read_long_format(path, delimiter=delimiter)
    if fmt == "wide":
        return read_wide_format(path, delimiter=delimiter)
    raise ValueError(f"unknown data format {fmt!r} (expected 'long' or 'wide')")


def _read_keyed(path, entity_order: Sequence[str], delimiter: str):
    path, header, rows = _open_rows(path, delimiter)
    if len(header) < 1:
        raise MissingColumnError(f"{path}: missing id column")
    by_id: dict[str, tuple[int, list[str]]] = {}
    for line, row in enumerate(rows, start=2):
        if not row:
            continue
        if row[0] in by_id:
            raise DuplicateEntityError(f"{path}: entity {row[0]!r} appears on rows {by_id[row[0]][0]} and {line}")
        by_id[row[0]] = (line, row)
    missing = [e for e in entity_order if e not in by_id]
    if missing:
        raise MissingEntityError(f"{path}: no row for entities {missing[:5]}")
    extra = set(by_id) - set(entity_order)
    if extra:
        log.warning("%s: ignoring %d ids not present in the dataset", path, len(extra))
    return path, header, by_id


def read_targets(path, entity_order: Sequence[str], delimiter: str = ",") -> TargetVector:
    """Targets aligned to ``entity_order``; columns ``id`` and ``target`` (else the first two)."""
    path, header, by_id = _read_keyed(path, entity_order, delimiter)
    col = header.index("target") if "target" in header else 1
    if len(header) <= col:
        raise MissingColumnError(f"{path}: missing target column")
    values = []
    for entity in entity_order:
        line, row = by_id[entity]
        values.append(_parse_float(path, line, header[col], row[col]))
    try:
        return TargetVector(np.array(values))
    except ConstantTargetError as exc:
        raise ConstantTargetError(f"{path}: {exc}") from None


def read_meta(path, entity_order: Sequence[str], delimiter: str = ",") -> dict[str, np.ndarray]:
    """Static attributes: first column id, every further column one real attribute."""
    path, header, by_id = _read_keyed(path, entity_order, delimiter)
    meta = {}
    for j, name in enumerate(header[1:], start=1):
        col = []
        for entity in entity_order:
            line, row = by_id[entity]
            if len(row) <= j:
                raise UnparsableValueError(f"{path}: row {line} has no value for {name!r}")
            col.append(_parse_float(path, line, name, row[j]))
        meta[name] = np.array(col)
    return meta


def attach_meta(dataset: Dataset, meta: dict[str, np.ndarray]) -> Dataset:
    merged = dict(dataset.meta)
    merged.update(meta)
    return Dataset(dataset.entity_order, dataset.series, merged)


def write_long_format(dataset: Dataset, path) -> None:
    rows = []
    for kind, block in dataset.series.items():
        for entity, values in zip(dataset.entity_order, block):
            rows.extend([entity, t, kind, format_number(v)] for t, v in enumerate(values))
    _write_rows(path, ["id", "time", "kind", "value"], rows)


def write_targets(target: TargetVector, entity_order: Sequence[str], path) -> None:
    _write_rows(path, ["id", "target"], [[e, format_number(v)] for e, v in zip(entity_order, target.values)])


def write_feature_matrix(matrix: FeatureMatrix, path) -> None:
    array = matrix.to_array()
    rows = [[entity, *(format_number(v) for v in array[i])] for i, entity in enumerate(matrix.entity_order)]
    _write_rows(path, ["id", *matrix.names], rows)


def read_feature_matrix(path, delimiter: str = ",") -> FeatureMatrix:
    path, header, rows = _open_rows(path, delimiter)
    if not header or header[0] != "id":
        raise MissingColumnError(f"{path}: feature matrix must start with an 'id' column")
    ids = [FeatureId.parse(name) for name in header[1:]]
    entities, values = [], []
    for line, row in enumerate(rows, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise UnparsableValueError(f"{path}: row {line} has {len(row)} fields, header has {len(header)}")
        entities.append(row[0])
        values.append([_parse_float(path, line, header[j], row[j]) for j in range(1, len(header))])
    if len(set(entities)) != len(entities):
        raise DuplicateEntityError(f"{path}: duplicate entity ids")
    array = np.array(values, dtype=float).reshape(len(entities), len(ids))
    return FeatureMatrix.from_array(entities, ids, array)


def write_relevance_table(table: RelevanceTable, path) -> None:
    rows = [
        [
            r.feature.name,
            "NA" if r.p_value is None else format_number(r.p_value),
            r.test.value,
            "true" if r.relevant else "false",
        ]
        for r in table.rows
    ]
    _write_rows(path, ["feature", "p_value", "test", "relevant"], rows)


def read_relevance_table(path) -> RelevanceTable:
    path, header, rows = _open_rows(path, ",")
    cols = {name: _column_index(path, header, name) for name in ("feature", "p_value", "test", "relevant")}
    out = []
    for line, row in enumerate(rows, start=2):
        if not row:
            continue
        p_text = row[cols["p_value"]]
        p = None if p_text == "NA" else _parse_float(path, line, "p_value", p_text)
        out.append(
            RelevanceRow(FeatureId.parse(row[cols["feature"]]), p, TestKind(row[cols["test"]]), row[cols["relevant"]] == "true")
        )
    return RelevanceTable(tuple(out))
