"""Catalog of feature mappings and the default parameter grid."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping

import numpy as np

from freshx.features import calculators as calc
from freshx.model import FeatureId, TimeSeriesSample

Calculator = Callable[[np.ndarray, list], np.ndarray]

_DECILES = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]

# name -> (calculator, parameter names); dict order is the catalog order
CATALOG: dict[str, tuple[Calculator, tuple[str, ...]]] = {
    "maximum": (calc.maximum, ()),
    "minimum": (calc.minimum, ()),
    "mean": (calc.mean, ()),
    "var": (calc.var, ()),
    "std": (calc.std, ()),
    "skewness": (calc.skewness, ()),
    "kurtosis": (calc.kurtosis, ()),
    "length": (calc.length, ()),
    "median": (calc.median, ()),
    "quantile": (calc.quantile, ("q",)),
    "absolute_energy": (calc.absolute_energy, ()),
    "augmented_dickey_fuller": (calc.augmented_dickey_fuller, ()),
    "binned_entropy": (calc.binned_entropy, ("max_bins",)),
    "has_large_standard_deviation": (calc.has_large_standard_deviation, ()),
    "has_variance_larger_than_std": (calc.has_variance_larger_than_std, ()),
    "is_symmetric_looking": (calc.is_symmetric_looking, ()),
    "mass_quantile": (calc.mass_quantile, ("q",)),
    "number_data_points_above_mean": (calc.number_data_points_above_mean, ()),
    "number_data_points_above_median": (calc.number_data_points_above_median, ()),
    "number_data_points_below_mean": (calc.number_data_points_below_mean, ()),
    "number_data_points_below_median": (calc.number_data_points_below_median, ()),
    "arima_model_coefficients": (calc.arima_model_coefficients, ("i", "k")),
    "continuous_wavelet_coefficients": (calc.continuous_wavelet_coefficients, ("a", "b")),
    "fft_coefficient": (calc.fft_coefficient, ("k",)),
    "first_index_max": (calc.first_index_max, ()),
    "first_index_min": (calc.first_index_min, ()),
    "lagged_autocorrelation": (calc.lagged_autocorrelation, ("lag",)),
    "large_number_of_peaks": (calc.large_number_of_peaks, ("support", "m")),
    "last_index_max": (calc.last_index_max, ()),
    "last_index_min": (calc.last_index_min, ()),
    "longest_strike_above_mean": (calc.longest_strike_above_mean, ()),
    "longest_strike_above_median": (calc.longest_strike_above_median, ()),
    "longest_strike_below_mean": (calc.longest_strike_below_mean, ()),
    "longest_strike_below_median": (calc.longest_strike_below_median, ()),
    "longest_strike_negative": (calc.longest_strike_negative, ()),
    "longest_strike_positive": (calc.longest_strike_positive, ()),
    "longest_strike_zero": (calc.longest_strike_zero, ()),
    "mean_absolute_change": (calc.mean_absolute_change, ()),
    "mean_absolute_change_quantiles": (calc.mean_absolute_change_quantiles, ("ql", "qh")),
    "mean_autocorrelation": (calc.mean_autocorrelation, ()),
    "mean_second_derivative_central": (calc.mean_second_derivative_central, ()),
    "number_cwt_peaks": (calc.number_cwt_peaks, ("max_width",)),
    "number_peaks": (calc.number_peaks, ("support",)),
    "spectral_welch_density": (calc.welch_density, ("coeff",)),
    "time_reversal_asymmetry_statistic": (calc.time_reversal_asymmetry_statistic, ("lag",)),
}

# Placeholder for "half the series length"; resolved per kind at extraction time.
HALF_LENGTH = "half"

DEFAULT_GRID: dict[str, list[dict]] = {
    "quantile": [{"q": q} for q in _DECILES],
    "binned_entropy": [{"max_bins": m} for m in (5, 10, 50, 100)],
    "mass_quantile": [{"q": q} for q in _DECILES],
    "arima_model_coefficients": [{"i": i, "k": 10} for i in range(11)],
    "continuous_wavelet_coefficients": [{"a": a, "b": b} for a in (2, 5, 10, 20) for b in (0, HALF_LENGTH)],
    "fft_coefficient": [{"k": k} for k in range(10)],
    "lagged_autocorrelation": [{"lag": lag} for lag in range(1, 10)],
    "large_number_of_peaks": [{"support": s, "m": 5} for s in (1, 3, 5)],
    "mean_absolute_change_quantiles": [
        {"ql": 0.2, "qh": 0.8},
        {"ql": 0.1, "qh": 0.9},
        {"ql": 0.25, "qh": 0.75},
    ],
    "number_cwt_peaks": [{"max_width": w} for w in (5, 10)],
    "number_peaks": [{"support": s} for s in (1, 3, 5, 10, 20)],
    "spectral_welch_density": [{"coeff": i} for i in (2, 5, 8)],
    "time_reversal_asymmetry_statistic": [{"lag": lag} for lag in (1, 2, 3)],
}


@dataclass(frozen=True)
class MappingSpec:
    name: str
    params: tuple[tuple[str, object], ...] = ()
    output_arity: int = 1

    def __post_init__(self):
        if self.name not in CATALOG:
            raise ValueError(f"unknown feature mapping {self.name!r}")
        expected = set(CATALOG[self.name][1])
        given = {k for k, _ in self.params}
        if given != expected:
            raise ValueError(f"{self.name}: expected parameters {sorted(expected)}, got {sorted(given)}")

    @property
    def param_dict(self) -> dict:
        return dict(self.params)

    def feature_id(self, kind: str, n_t: int | None = None) -> FeatureId:
        """Column identity; with ``n_t`` the half-length placeholder is resolved."""
        if n_t is None:
            return FeatureId(kind, self.name, self.params)
        return FeatureId(kind, self.name, tuple(_resolve(self.param_dict, n_t).items()))


def _bindings(name: str, value) -> list[dict]:
    names = CATALOG[name][1]
    if not names:
        return [{}]
    if value is None:
        return DEFAULT_GRID[name]
    if isinstance(value, Mapping):
        # {param: [values]} expands to the cartesian product in catalog parameter order
        missing = set(names) - set(value)
        if missing:
            raise ValueError(f"{name}: missing parameter lists for {sorted(missing)}")
        lists = [value[p] if isinstance(value[p], list) else [value[p]] for p in names]
        return [dict(zip(names, combo)) for combo in itertools.product(*lists)]
    return [dict(b) for b in value]


def registry(grid: Mapping | None = None) -> list[MappingSpec]:
    """Ordered list of mapping specs, one per output column.

    ``grid`` maps mapping names to ``None`` (parameterless or default grid), a list
    of parameter dicts, or a dict of parameter lists (cartesian product). Only the
    mappings named in ``grid`` are included; order always follows the catalog.
    """
    if grid is None:
        grid = {name: None for name in CATALOG}
    unknown = set(grid) - set(CATALOG)
    if unknown:
        raise ValueError(f"unknown feature mappings in grid: {sorted(unknown)}")
    specs = []
    for name in CATALOG:
        if name not in grid:
            continue
        names = CATALOG[name][1]
        for binding in _bindings(name, grid[name]):
            specs.append(MappingSpec(name, tuple((p, binding[p]) for p in names if p in binding)))
    return specs


def load_grid(path) -> dict:
    """Read a JSON parameter-grid file (mapping name -> parameter lists)."""
    path = Path(path)
    try:
        grid = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ValueError(f"{path}: cannot read feature config: {exc}") from exc
    if not isinstance(grid, dict):
        raise ValueError(f"{path}: feature config must be a JSON object")
    registry(grid)
    return grid


def _resolve(params: dict, n_t: int) -> dict:
    return {k: (n_t // 2 if v == HALF_LENGTH else v) for k, v in params.items()}


def extract_block(specs, block: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate ``specs`` on every row of ``block``.

    Returns values of shape ``(rows, len(specs))`` and a per-column flag that is set
    when any value was non-finite (and therefore replaced by zero) or a calculator
    raised.
    """
    block = np.atleast_2d(np.asarray(block, dtype=float))
    rows, n_t = block.shape
    out = np.zeros((rows, len(specs)))
    flags = np.zeros(len(specs), dtype=bool)
    groups: dict[str, list[int]] = {}
    for j, spec in enumerate(specs):
        groups.setdefault(spec.name, []).append(j)
    for name, cols in groups.items():
        fn = CATALOG[name][0]
        params = [_resolve(specs[j].param_dict, n_t) for j in cols]
        try:
            with np.errstate(all="ignore"):
                values = np.asarray(fn(block, params), dtype=float).reshape(rows, len(cols))
        except (ValueError, FloatingPointError, np.linalg.LinAlgError):
            values = np.full((rows, len(cols)), np.nan)
        bad = ~np.isfinite(values)
        out[:, cols] = np.where(bad, 0.0, values)
        flags[cols] = bad.any(axis=0)
    return out, flags


def extract_feature(spec: MappingSpec, series) -> np.ndarray:
    """Feature vector (length ``spec.output_arity``) of a single series."""
    values = series.values if isinstance(series, TimeSeriesSample) else np.asarray(series, dtype=float)
    out, _ = extract_block([spec], values[None, :])
    return out[0]
