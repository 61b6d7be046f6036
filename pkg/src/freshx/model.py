"""Domain types shared by every stage of the pipeline.

Everything here is immutable after construction (numpy payloads are copied and
marked read-only), so instances can be handed to worker processes freely.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

import numpy as np


class FreshError(Exception):
    """Base class for all errors raised by freshx."""


class DataError(FreshError):
    """Input data violates a structural invariant."""


class ConstantTargetError(DataError):
    pass


class LengthMismatchError(DataError):
    pass


class CodomainClass(str, enum.Enum):
    CONSTANT = "constant"
    BINARY = "binary"
    CONTINUOUS = "continuous"


class TestKind(str, enum.Enum):
    FISHER = "fisher"
    KS_BINARY_FEATURE = "ks_binary_feature"
    KS_BINARY_TARGET = "ks_binary_target"
    KENDALL = "kendall"
    NONE = "none"

    __test__ = False  # keep pytest from collecting this enum


class PcaPlacement(str, enum.Enum):
    NONE = "none"
    BEFORE = "before"
    AFTER = "after"


class ByMode(str, enum.Enum):
    GLOBAL = "global"
    PARTIAL_HARMONIC = "paper"


def _frozen(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


def classify_codomain(values) -> CodomainClass:
    """Classify a value vector by its exact number of distinct values."""
    n_distinct = np.unique(np.asarray(values, dtype=float)).size
    if n_distinct <= 1:
        return CodomainClass.CONSTANT
    if n_distinct == 2:
        return CodomainClass.BINARY
    return CodomainClass.CONTINUOUS


def _check_name(name: str, what: str) -> None:
    if not name or "__" in name:
        raise DataError(f"invalid {what} name {name!r}: must be non-empty and must not contain '__'")


@dataclass(frozen=True)
class TimeSeriesSample:
    """One uniformly sampled series of one kind for one entity."""

    entity_id: str
    kind: str
    values: np.ndarray

    def __post_init__(self):
        values = _frozen(self.values)
        if values.ndim != 1 or values.size == 0:
            raise DataError(f"series ({self.entity_id}, {self.kind}) must be a non-empty 1-d sequence")
        if not np.all(np.isfinite(values)):
            raise DataError(f"series ({self.entity_id}, {self.kind}) contains non-finite values")
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class Dataset:
    """m entities times n kinds of equal-length series, plus optional static attributes.

    Series of one kind are stored as a single ``(m, n_t)`` block whose rows follow
    ``entity_order``. ``meta`` maps attribute name to a length-m vector.
    """

    entity_order: tuple[str, ...]
    series: Mapping[str, np.ndarray]
    meta: Mapping[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        order = tuple(str(e) for e in self.entity_order)
        if len(set(order)) != len(order):
            raise DataError("entity_order contains duplicate ids")
        m = len(order)
        series = {}
        for kind, block in self.series.items():
            _check_name(kind, "kind")
            if kind == "meta":
                raise DataError("'meta' is reserved and cannot be used as a kind name")
            block = _frozen(block)
            if block.ndim != 2 or block.shape[0] != m or block.shape[1] == 0:
                raise DataError(f"kind {kind!r}: expected a ({m}, n_t) block, got shape {block.shape}")
            if not np.all(np.isfinite(block)):
                raise DataError(f"kind {kind!r} contains non-finite values")
            series[kind] = block
        meta = {}
        for name, col in self.meta.items():
            _check_name(name, "meta attribute")
            col = _frozen(col)
            if col.shape != (m,):
                raise DataError(f"meta attribute {name!r}: expected {m} values, got shape {col.shape}")
            if not np.all(np.isfinite(col)):
                raise DataError(f"meta attribute {name!r} contains non-finite values")
            meta[name] = col
        object.__setattr__(self, "entity_order", order)
        object.__setattr__(self, "series", series)
        object.__setattr__(self, "meta", meta)

    @classmethod
    def from_samples(cls, samples: Sequence[TimeSeriesSample], meta=None, entity_order=None) -> "Dataset":
        """Assemble a dataset from individual samples.

        Entity order defaults to first appearance. Every kind must be present for every
        entity with a common length.
        """
        if entity_order is None:
            entity_order = list(dict.fromkeys(s.entity_id for s in samples))
        index = {e: i for i, e in enumerate(entity_order)}
        by_kind: dict[str, dict[str, np.ndarray]] = {}
        for s in samples:
            if s.entity_id not in index:
                raise DataError(f"sample for unknown entity {s.entity_id!r}")
            per_entity = by_kind.setdefault(s.kind, {})
            if s.entity_id in per_entity:
                raise DataError(f"duplicate series for ({s.entity_id}, {s.kind})")
            per_entity[s.entity_id] = s.values
        series = {}
        for kind, per_entity in by_kind.items():
            missing = [e for e in entity_order if e not in per_entity]
            if missing:
                raise DataError(f"kind {kind!r} is missing for entities {missing[:5]}")
            lengths = {per_entity[e].size for e in entity_order}
            if len(lengths) != 1:
                raise DataError(f"kind {kind!r} has ragged lengths {sorted(lengths)}")
            series[kind] = np.stack([per_entity[e] for e in entity_order])
        return cls(tuple(entity_order), series, meta or {})

    @property
    def n_entities(self) -> int:
        return len(self.entity_order)

    @property
    def kinds(self) -> tuple[str, ...]:
        return tuple(self.series)

    def series_length(self, kind: str) -> int:
        return self.series[kind].shape[1]

    def sample(self, entity_id: str, kind: str) -> TimeSeriesSample:
        row = self.entity_order.index(entity_id)
        return TimeSeriesSample(entity_id, kind, self.series[kind][row])

    def samples(self) -> Iterator[TimeSeriesSample]:
        for kind, block in self.series.items():
            for entity_id, row in zip(self.entity_order, block):
                yield TimeSeriesSample(entity_id, kind, row)

    def reorder(self, entity_order: Sequence[str]) -> "Dataset":
        """Return the same data with rows permuted to ``entity_order``."""
        if sorted(entity_order) != sorted(self.entity_order):
            raise DataError("new entity order must be a permutation of the current one")
        pos = {e: i for i, e in enumerate(self.entity_order)}
        idx = np.array([pos[e] for e in entity_order], dtype=int)
        return Dataset(
            tuple(entity_order),
            {k: v[idx] for k, v in self.series.items()},
            {k: v[idx] for k, v in self.meta.items()},
        )


@dataclass(frozen=True)
class TargetVector:
    values: np.ndarray

    def __post_init__(self):
        values = _frozen(self.values)
        if values.ndim != 1:
            raise DataError("target must be one-dimensional")
        if not np.all(np.isfinite(values)):
            raise DataError("target contains non-finite values")
        if classify_codomain(values) is CodomainClass.CONSTANT:
            raise ConstantTargetError("target has fewer than two distinct values; no relevance test applies")
        object.__setattr__(self, "values", values)

    @property
    def codomain_class(self) -> CodomainClass:
        return classify_codomain(self.values)

    def __len__(self) -> int:
        return self.values.size


def _format_param(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    return repr(float(value))


def _parse_param(text: str):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


@dataclass(frozen=True, order=True)
class FeatureId:
    """Structured column identity, rendered as ``kind__mapping[__param-value...]``.

    Columns without a kind (principal components) render as the bare mapping name.
    """

    kind: str
    mapping: str
    params: tuple[tuple[str, object], ...] = ()

    @property
    def name(self) -> str:
        parts = [self.kind] if self.kind else []
        parts.append(self.mapping)
        parts.extend(f"{k}-{_format_param(v)}" for k, v in self.params)
        return "__".join(parts)

    @classmethod
    def meta(cls, attribute: str) -> "FeatureId":
        return cls("meta", attribute)

    @property
    def is_meta(self) -> bool:
        return self.kind == "meta"

    @classmethod
    def parse(cls, name: str) -> "FeatureId":
        parts = name.split("__")
        if len(parts) == 1:
            return cls("", parts[0])
        params = []
        for token in parts[2:]:
            key, sep, value = token.partition("-")
            if not sep:
                raise DataError(f"cannot parse parameter {token!r} in column name {name!r}")
            params.append((key, _parse_param(value)))
        return cls(parts[0], parts[1], tuple(params))

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class FeatureColumn:
    id: FeatureId
    values: np.ndarray
    flagged: bool = False

    def __post_init__(self):
        values = _frozen(self.values)
        if values.ndim != 1:
            raise DataError(f"feature {self.id} must be one-dimensional")
        object.__setattr__(self, "values", values)

    @property
    def codomain_class(self) -> CodomainClass:
        return classify_codomain(self.values)

    @property
    def name(self) -> str:
        return self.id.name


@dataclass(frozen=True)
class FeatureMatrix:
    entity_order: tuple[str, ...]
    columns: tuple[FeatureColumn, ...]

    def __post_init__(self):
        order = tuple(self.entity_order)
        columns = tuple(self.columns)
        m = len(order)
        seen = set()
        for col in columns:
            if col.values.size != m:
                raise LengthMismatchError(f"feature {col.id}: {col.values.size} values for {m} entities")
            if col.id in seen:
                raise DataError(f"duplicate feature id {col.id}")
            seen.add(col.id)
        object.__setattr__(self, "entity_order", order)
        object.__setattr__(self, "columns", columns)

    @classmethod
    def from_array(cls, entity_order, ids: Sequence[FeatureId], array, flags=None) -> "FeatureMatrix":
        array = np.asarray(array, dtype=float).reshape(len(entity_order), len(ids))
        flags = [False] * len(ids) if flags is None else list(flags)
        return cls(
            tuple(entity_order),
            tuple(FeatureColumn(fid, array[:, j], bool(f)) for j, (fid, f) in enumerate(zip(ids, flags))),
        )

    @property
    def n_entities(self) -> int:
        return len(self.entity_order)

    @property
    def n_features(self) -> int:
        return len(self.columns)

    @property
    def ids(self) -> tuple[FeatureId, ...]:
        return tuple(c.id for c in self.columns)

    @property
    def names(self) -> list[str]:
        return [c.name for c in self.columns]

    def to_array(self) -> np.ndarray:
        if not self.columns:
            return np.zeros((self.n_entities, 0))
        return np.column_stack([c.values for c in self.columns])

    def column(self, name: str) -> FeatureColumn:
        for c in self.columns:
            if c.name == name:
                return c
        raise KeyError(name)

    def select(self, ids) -> "FeatureMatrix":
        wanted = set(ids)
        return FeatureMatrix(self.entity_order, tuple(c for c in self.columns if c.id in wanted))

    def __len__(self) -> int:
        return len(self.columns)


@dataclass(frozen=True)
class RelevanceRow:
    feature: FeatureId
    p_value: float | None
    test: TestKind
    relevant: bool


@dataclass(frozen=True)
class RelevanceTable:
    rows: tuple[RelevanceRow, ...] = ()

    @property
    def relevant_ids(self) -> list[FeatureId]:
        return [r.feature for r in self.rows if r.relevant]

    @property
    def p_values(self) -> list[float | None]:
        return [r.p_value for r in self.rows]

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)


@dataclass(frozen=True)
class SelectionConfig:
    q: float = 0.10
    pca_placement: PcaPlacement = PcaPlacement.NONE
    variance_fraction: float = 0.95
    by_mode: ByMode = ByMode.GLOBAL
    registry_params: Mapping | None = None
    worker_count: int = 1

    def __post_init__(self):
        if not 0.0 < self.q <= 1.0:
            raise ValueError(f"FDR level q must lie in (0, 1], got {self.q}")
        if not 0.0 < self.variance_fraction <= 1.0:
            raise ValueError(f"variance fraction must lie in (0, 1], got {self.variance_fraction}")
        if int(self.worker_count) < 1:
            raise ValueError(f"worker_count must be positive, got {self.worker_count}")
        object.__setattr__(self, "pca_placement", PcaPlacement(self.pca_placement))
        object.__setattr__(self, "by_mode", ByMode(self.by_mode))
