"""Synthetic data and the statistical / scaling experiments.

All randomness comes from ``numpy.random.Generator(PCG64(seed))``; a given seed
reproduces the same data on any platform with the same numpy major version.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from freshx.features.registry import registry
from freshx.model import DataError, Dataset, FeatureId, FeatureMatrix, SelectionConfig, TargetVector
from freshx.pipeline import extract_all
from freshx.selection import benjamini_yekutieli, build_relevance_table
from freshx.significance import dispatch_test

SIGNAL_KIND = "signal"
NOISE_KIND = "noise"


class InvalidSizeError(DataError):
    pass


def rng_for(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def ar1_block(rng: np.random.Generator, rows: int, n_t: int, coef: float = 0.5) -> np.ndarray:
    """Stationary AR(1) paths s_t = coef * s_(t-1) + eps_t with standard normal noise."""
    eps = rng.standard_normal((rows, n_t))
    out = np.empty((rows, n_t))
    out[:, 0] = eps[:, 0] / math.sqrt(1.0 - coef * coef)
    for t in range(1, n_t):
        out[:, t] = coef * out[:, t - 1] + eps[:, t]
    return out


def gen_two_class(m: int, n_t: int, effect: float, seed: int) -> tuple[Dataset, TargetVector]:
    """Balanced two-class dataset with one informative and one pure-noise kind.

    Both kinds are AR(1); class-1 entities get a constant offset ``effect`` on the
    informative kind only. Class labels are shuffled across entity ids.
    """
    if m < 2 or m % 2 or n_t < 8 or effect < 0:
        raise InvalidSizeError(f"need even m >= 2, n_t >= 8 and effect >= 0 (got m={m}, n_t={n_t}, effect={effect})")
    rng = rng_for(seed)
    labels = rng.permutation(np.repeat([0.0, 1.0], m // 2))
    signal = ar1_block(rng, m, n_t) + effect * labels[:, None]
    noise = ar1_block(rng, m, n_t)
    ids = tuple(f"e{i:05d}" for i in range(m))
    return Dataset(ids, {SIGNAL_KIND: signal, NOISE_KIND: noise}), TargetVector(labels)


@dataclass(frozen=True)
class FerResult:
    fer: float
    standard_error: float
    per_repetition: np.ndarray = field(repr=False)
    mean_selected: float = 0.0


def fer_experiment(
    n_features: int,
    m: int,
    q: float,
    repetitions: int,
    seed: int,
    duplicated: bool = False,
) -> FerResult:
    """Empirical false extraction rate on pure-noise features and a random binary target.

    Every feature is irrelevant, so each repetition's rate is 1 if anything is
    selected and 0 otherwise (0/0 counts as 0). With ``duplicated`` every noise
    column appears twice, a perfectly dependent family.
    """
    if min(n_features, m, repetitions) < 1:
        raise InvalidSizeError("n_features, m and repetitions must be positive")
    rng = rng_for(seed)
    rates = np.zeros(repetitions)
    selected = np.zeros(repetitions)
    for rep in range(repetitions):
        target = rng.permutation(np.arange(m) % 2).astype(float)
        n_draw = (n_features + 1) // 2 if duplicated else n_features
        noise = rng.standard_normal((m, n_draw))
        if duplicated:
            noise = np.repeat(noise, 2, axis=1)[:, :n_features]
        p = [dispatch_test(noise[:, j], target).p_value for j in range(n_features)]
        mask = benjamini_yekutieli(p, q)
        selected[rep] = mask.sum()
        rates[rep] = 1.0 if mask.any() else 0.0
    se = rates.std(ddof=1) / math.sqrt(repetitions) if repetitions > 1 else 0.0
    return FerResult(float(rates.mean()), float(se), rates, float(selected.mean()))


def noise_matrix(m: int, n_features: int, seed: int) -> tuple[FeatureMatrix, TargetVector]:
    rng = rng_for(seed)
    target = rng.permutation(np.arange(m) % 2).astype(float)
    ids = [FeatureId("noise", "column", (("j", j),)) for j in range(n_features)]
    array = rng.standard_normal((m, n_features))
    return FeatureMatrix.from_array([f"e{i}" for i in range(m)], ids, array), TargetVector(target)


def _timed(fn, repeat: int) -> float:
    best = math.inf
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def scaling_experiment(
    axis: str,
    grid,
    jobs: int = 1,
    samples: int = 200,
    length: int = 1000,
    kinds: int = 1,
    repeat: int = 3,
    seed: int = 0,
) -> list[tuple[int, float]]:
    """Best-of-``repeat`` wall time per grid value.

    ``length`` and ``samples`` time feature extraction with the default registry,
    varying n_t or m respectively; ``features`` times the testing and BY tiers on
    a noise matrix with ``samples`` rows and the grid value as column count.
    """
    specs = registry()
    config = SelectionConfig(worker_count=jobs)
    rows = []
    for value in grid:
        value = int(value)
        if axis == "features":
            matrix, target = noise_matrix(samples, value, seed)
            fn = lambda: build_relevance_table(matrix, target, config)  # noqa: E731
        elif axis in ("length", "samples"):
            m, n_t = (samples, value) if axis == "length" else (value, length)
            dataset = synthetic_dataset(m, n_t, kinds, seed)
            fn = lambda: extract_all(dataset, specs, jobs)  # noqa: E731
        else:
            raise ValueError(f"unknown scaling axis {axis!r}")
        fn()  # warm-up: imports, allocator, worker start
        rows.append((value, _timed(fn, repeat)))
    return rows


def synthetic_dataset(m: int, n_t: int, kinds: int, seed: int) -> Dataset:
    rng = rng_for(seed)
    series = {f"k{j}": ar1_block(rng, m, n_t) for j in range(kinds)}
    return Dataset(tuple(f"e{i:05d}" for i in range(m)), series)
