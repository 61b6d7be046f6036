"""freshx: parallel time-series feature extraction with hypothesis-test based filtering."""

from freshx.model import (
    CodomainClass,
    Dataset,
    FeatureColumn,
    FeatureId,
    FeatureMatrix,
    RelevanceRow,
    RelevanceTable,
    SelectionConfig,
    TargetVector,
    TimeSeriesSample,
    classify_codomain,
)

__all__ = [
    "CodomainClass",
    "Dataset",
    "FeatureColumn",
    "FeatureId",
    "FeatureMatrix",
    "RelevanceRow",
    "RelevanceTable",
    "SelectionConfig",
    "TargetVector",
    "TimeSeriesSample",
    "classify_codomain",
]

__version__ = "0.1.0"
