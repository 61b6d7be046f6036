"""Benjamini-Yekutieli step-up selection and relevance tables."""

from __future__ import annotations

import numpy as np

from freshx import parallel
from freshx.model import (
    ByMode,
    FeatureMatrix,
    LengthMismatchError,
    RelevanceRow,
    RelevanceTable,
    SelectionConfig,
    TargetVector,
    TestKind,
)
from freshx.significance import dispatch_test


def by_thresholds(n: int, q: float, mode: ByMode = ByMode.GLOBAL) -> np.ndarray:
    """Rejection line r_1..r_n.

    GLOBAL divides by the full harmonic number H(n); PARTIAL_HARMONIC divides the
    i-th threshold by the partial harmonic number H(i).
    """
    ranks = np.arange(1, n + 1, dtype=float)
    harmonic = np.cumsum(1.0 / ranks)
    if ByMode(mode) is ByMode.GLOBAL:
        return ranks * q / (n * harmonic[-1])
    return ranks * q / (n * harmonic)


def benjamini_yekutieli(p_values, q: float, mode: ByMode = ByMode.GLOBAL) -> np.ndarray:
    """Boolean rejection mask, in input order.

    Finds the largest k with p_(k) <= r_k and rejects every hypothesis whose
    p-value is <= p_(k), so values tied with p_(k) share its fate.
    """
    if not 0.0 < q <= 1.0:
        raise ValueError(f"FDR level q must lie in (0, 1], got {q}")
    p = np.asarray(p_values, dtype=float)
    if p.ndim != 1:
        raise ValueError("p-values must be a flat sequence")
    if p.size == 0:
        return np.zeros(0, dtype=bool)
    if np.any(~np.isfinite(p)) or np.any((p < 0) | (p > 1)):
        raise ValueError("p-values must lie in [0, 1]")
    sorted_p = np.sort(p, kind="stable")
    below = np.flatnonzero(sorted_p <= by_thresholds(p.size, q, mode))
    if below.size == 0:
        return np.zeros(p.size, dtype=bool)
    return p <= sorted_p[below[-1]]


def _test_chunk(args):
    block, target = args
    out = []
    for j in range(block.shape[1]):
        res = dispatch_test(block[:, j], target)
        out.append(None if res is None else (res.p_value, res.test.value))
    return out


def collect_p_values(matrix: FeatureMatrix, target: TargetVector, workers: int = 1, chunk_cols: int = 256):
    """Per-column (p_value, TestKind) or None for untestable columns, in column order."""
    if matrix.n_entities != len(target):
        raise LengthMismatchError(f"matrix has {matrix.n_entities} rows, target has {len(target)}")
    array = matrix.to_array()
    tasks = [
        (array[:, start : start + chunk_cols], target.values)
        for start in range(0, matrix.n_features, chunk_cols)
    ]
    results = []
    for chunk in parallel.ordered_map(_test_chunk, tasks, workers):
        results.extend(None if r is None else (r[0], TestKind(r[1])) for r in chunk)
    return results


def build_relevance_table(matrix: FeatureMatrix, target: TargetVector, config: SelectionConfig | None = None) -> RelevanceTable:
    """Test every column, then apply BY over the testable ones."""
    config = config or SelectionConfig()
    outcomes = collect_p_values(matrix, target, config.worker_count)
    testable = [j for j, o in enumerate(outcomes) if o is not None]
    mask = benjamini_yekutieli([outcomes[j][0] for j in testable], config.q, config.by_mode)
    relevant = dict(zip(testable, mask))
    rows = []
    for j, (col, outcome) in enumerate(zip(matrix.columns, outcomes)):
        if outcome is None:
            rows.append(RelevanceRow(col.id, None, TestKind.NONE, False))
        else:
            rows.append(RelevanceRow(col.id, float(outcome[0]), outcome[1], bool(relevant[j])))
    return RelevanceTable(tuple(rows))
