"""FRESH and its PCA variants.

Tiers: feature extraction (parallel over kind x entity chunks), per-feature
testing (parallel over column chunks), then the sequential BY step. Chunk sizes
are fixed constants, so outputs do not depend on the worker count.
"""

from __future__ import annotations

import logging
import warnings

import numpy as np

from freshx import parallel
from freshx.features.registry import MappingSpec, extract_block, registry
from freshx.model import (
    Dataset,
    FeatureId,
    FeatureMatrix,
    PcaPlacement,
    RelevanceTable,
    SelectionConfig,
    TargetVector,
)
from freshx.pca import EmptyAfterConstantDropError, pca_reduce
from freshx.selection import build_relevance_table

log = logging.getLogger(__name__)

CHUNK_ROWS = 64


def _extract_task(args):
    specs, block = args
    return extract_block(specs, block)


def extract_all(dataset: Dataset, specs: list[MappingSpec] | None = None, worker_count: int = 1) -> FeatureMatrix:
    """Feature matrix with one column per (kind, spec) followed by one per meta attribute."""
    specs = registry() if specs is None else list(specs)
    tasks, layout = [], []
    for kind in dataset.kinds:
        block = dataset.series[kind]
        for start in range(0, dataset.n_entities, CHUNK_ROWS):
            tasks.append((specs, block[start : start + CHUNK_ROWS]))
            layout.append(kind)
    results = parallel.ordered_map(_extract_task, tasks, worker_count) if specs else [None] * len(tasks)

    ids: list[FeatureId] = []
    parts: list[np.ndarray] = []
    flags: list[np.ndarray] = []
    for kind in dataset.kinds:
        chunks = [r for r, k in zip(results, layout) if k == kind]
        n_t = dataset.series_length(kind)
        ids.extend(spec.feature_id(kind, n_t) for spec in specs)
        if specs:
            parts.append(np.vstack([c[0] for c in chunks]))
            flags.append(np.logical_or.reduce([c[1] for c in chunks]))
    for name, values in dataset.meta.items():
        ids.append(FeatureId.meta(name))
        parts.append(np.asarray(values, dtype=float)[:, None])
        flags.append(np.zeros(1, dtype=bool))
    m = dataset.n_entities
    array = np.hstack(parts) if parts else np.zeros((m, 0))
    flag_vec = np.concatenate(flags) if flags else np.zeros(0, dtype=bool)
    if flag_vec.any():
        log.info("%d feature columns flagged (non-finite values or invalid parameters)", int(flag_vec.sum()))
    return FeatureMatrix.from_array(dataset.entity_order, ids, array, flag_vec)


def _specs(config: SelectionConfig) -> list[MappingSpec]:
    return registry(config.registry_params)


def _check_aligned(matrix: FeatureMatrix, target: TargetVector) -> None:
    if matrix.n_entities != len(target):
        raise ValueError(f"{matrix.n_entities} entities but {len(target)} target values")


def select(matrix: FeatureMatrix, target: TargetVector, config: SelectionConfig | None = None):
    """Steps 2 and 3: test every column, apply BY, keep the relevant columns."""
    config = config or SelectionConfig()
    _check_aligned(matrix, target)
    table = build_relevance_table(matrix, target, config)
    return matrix.select(table.relevant_ids), table


def run_fresh(dataset: Dataset, target: TargetVector, config: SelectionConfig | None = None):
    config = config or SelectionConfig()
    matrix = extract_all(dataset, _specs(config), config.worker_count)
    return select(matrix, target, config)


def run_fresh_pca_before(dataset: Dataset, target: TargetVector, config: SelectionConfig | None = None):
    config = config or SelectionConfig()
    matrix = extract_all(dataset, _specs(config), config.worker_count)
    components = pca_reduce(matrix, config.variance_fraction)
    return select(components, target, config)


def run_fresh_pca_after(dataset: Dataset, target: TargetVector, config: SelectionConfig | None = None):
    config = config or SelectionConfig()
    matrix = extract_all(dataset, _specs(config), config.worker_count)
    selected, table = select(matrix, target, config)
    try:
        reduced = pca_reduce(selected, config.variance_fraction)
    except EmptyAfterConstantDropError:
        warnings.warn("no relevant features survived selection; PCA output is empty", RuntimeWarning, stacklevel=2)
        reduced = FeatureMatrix(matrix.entity_order, ())
    return reduced, table


def run(dataset: Dataset, target: TargetVector, config: SelectionConfig | None = None) -> tuple[FeatureMatrix, RelevanceTable]:
    """Dispatch on ``config.pca_placement``."""
    config = config or SelectionConfig()
    runner = {
        PcaPlacement.NONE: run_fresh,
        PcaPlacement.BEFORE: run_fresh_pca_before,
        PcaPlacement.AFTER: run_fresh_pca_after,
    }[config.pca_placement]
    return runner(dataset, target, config)
