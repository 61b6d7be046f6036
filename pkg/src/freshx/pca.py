"""Correlation PCA used to decorrelate features before or after selection."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from freshx.model import DataError, FeatureId, FeatureMatrix


class TooFewRowsError(DataError):
    pass


class EmptyAfterConstantDropError(DataError):
    pass


@dataclass(frozen=True)
class PcaFit:
    kept: np.ndarray  # indices of non-constant input columns
    mean: np.ndarray
    scale: np.ndarray
    loadings: np.ndarray  # (n_kept, n_components), unit columns
    eigenvalues: np.ndarray  # of the sample correlation matrix, descending

    @property
    def explained_variance_ratio(self) -> np.ndarray:
        return self.eigenvalues / self.eigenvalues.sum()

    def n_components_for(self, fraction: float) -> int:
        """Smallest leading count whose eigenvalues reach ``fraction`` of the total."""
        cumulative = np.cumsum(self.eigenvalues)
        total = cumulative[-1]
        # relative slack so that fraction = 1 is reached despite rounding
        hit = np.flatnonzero(cumulative >= fraction * total - 1e-12 * total)
        return int(hit[0]) + 1

    def transform(self, array) -> np.ndarray:
        z = (np.asarray(array, dtype=float)[:, self.kept] - self.mean) / self.scale
        return z @ self.loadings


def fit_pca(array) -> PcaFit:
    x = np.asarray(array, dtype=float)
    m = x.shape[0]
    if m < 2:
        raise TooFewRowsError(f"PCA needs at least two rows, got {m}")
    spread = x.max(axis=0) - x.min(axis=0) if x.size else np.zeros(x.shape[1])
    kept = np.flatnonzero(spread > 0)
    if kept.size == 0:
        raise EmptyAfterConstantDropError("no non-constant columns left for PCA")
    x = x[:, kept]
    mean = x.mean(axis=0)
    scale = x.std(axis=0, ddof=1)
    z = (x - mean) / scale
    _, s, vt = np.linalg.svd(z / np.sqrt(m - 1), full_matrices=False)
    loadings = vt.T.copy()
    lead = np.abs(loadings).argmax(axis=0)
    signs = np.sign(loadings[lead, np.arange(loadings.shape[1])])
    loadings *= np.where(signs == 0, 1.0, signs)
    return PcaFit(kept, mean, scale, loadings, s * s)


def pca_reduce(matrix: FeatureMatrix, variance_fraction: float = 0.95) -> FeatureMatrix:
    """Replace the columns by the leading principal component scores ``pc-1 .. pc-r``."""
    if not 0.0 < variance_fraction <= 1.0:
        raise ValueError(f"variance fraction must lie in (0, 1], got {variance_fraction}")
    fit = fit_pca(matrix.to_array())
    r = fit.n_components_for(variance_fraction)
    scores = fit.transform(matrix.to_array())[:, :r]
    ids = [FeatureId("", f"pc-{i + 1}") for i in range(r)]
    return FeatureMatrix.from_array(matrix.entity_order, ids, scores)
