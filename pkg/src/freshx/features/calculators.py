"""Feature calculators operating on blocks of equal-length series.

Every calculator has the signature ``f(x, params) -> ndarray`` where ``x`` is a
``(rows, n_t)`` float array and ``params`` a list of parameter dicts; the result
has shape ``(rows, len(params))``. Parameterless calculators receive ``[{}]``.
Invalid parameter/length combinations yield NaN; the registry turns NaN into a
flagged zero. Index-based outputs use 1-based positions.
"""

from __future__ import annotations

import math

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from freshx.features import wavelets


def _col(values) -> np.ndarray:
    return np.asarray(values, dtype=float)[:, None]


def _centered(x):
    return x - x.mean(axis=1, keepdims=True)


def _var(x):
    d = _centered(x)
    return (d * d).mean(axis=1)


def _empirical_quantile(sorted_x: np.ndarray, q: float) -> np.ndarray:
    # infimum of {z : ECDF(z) >= q}: the k-th order statistic with k minimal s.t. k/n >= q
    n = sorted_x.shape[1]
    k = max(1, math.ceil(q * n))
    while k > 1 and (k - 1) / n >= q:
        k -= 1
    while k < n and k / n < q:
        k += 1
    return sorted_x[:, k - 1]


def _longest_run(mask: np.ndarray) -> np.ndarray:
    counts = np.cumsum(mask, axis=1)
    resets = np.maximum.accumulate(np.where(mask, 0, counts), axis=1)
    return (counts - resets).max(axis=1)


def _count_peaks(x: np.ndarray, support: int) -> np.ndarray:
    n = x.shape[1]
    if n < 2 * support + 1:
        return np.zeros(x.shape[0])
    centre = x[:, support : n - support]
    is_peak = np.ones(centre.shape, dtype=bool)
    for j in range(1, support + 1):
        is_peak &= centre > x[:, support - j : n - support - j]
        is_peak &= centre > x[:, support + j : n - support + j]
    return is_peak.sum(axis=1).astype(float)


def _ols(design: np.ndarray, response: np.ndarray):
    """Row-batched least squares through the normal equations.

    Returns coefficients ``(rows, k)`` and their standard errors; fits whose Gram
    matrix is numerically singular, or that have no residual degrees of freedom,
    give NaN.
    """
    rows, n_obs, k = design.shape
    gram = np.matmul(design.transpose(0, 2, 1), design)
    rhs = np.einsum("rnk,rn->rk", design, response)
    w, v = np.linalg.eigh(gram)
    ok = w[:, 0] > w[:, -1] * 1e-12
    safe_w = np.where(ok[:, None], w, 1.0)
    beta = np.einsum("rkj,rj->rk", v, np.einsum("rkj,rk->rj", v, rhs) / safe_w)
    resid = response - np.einsum("rnk,rk->rn", design, beta)
    dof = n_obs - k
    with np.errstate(divide="ignore", invalid="ignore"):
        sigma2 = (resid * resid).sum(axis=1) / dof if dof > 0 else np.full(rows, np.nan)
        se = np.sqrt(sigma2[:, None] * np.einsum("rkj,rj->rk", v * v, 1.0 / safe_w))
    beta[~ok] = np.nan
    se[~ok] = np.nan
    return beta, se


def maximum(x, params):
    return _col(x.max(axis=1))


def minimum(x, params):
    return _col(x.min(axis=1))


def mean(x, params):
    return _col(x.mean(axis=1))


def var(x, params):
    return _col(_var(x))


def std(x, params):
    return _col(np.sqrt(_var(x)))


def skewness(x, params):
    n = x.shape[1]
    d = _centered(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        m3 = (d**3).sum(axis=1) / n
        s2 = (d * d).sum(axis=1) / (n - 1)
        return _col(n * n / ((n - 1) * (n - 2)) * m3 / s2**1.5)


def kurtosis(x, params):
    d = _centered(x)
    v = (d * d).mean(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        return _col((d**4).mean(axis=1) / (v * v) - 3.0)


def length(x, params):
    return np.full((x.shape[0], 1), float(x.shape[1]))


def median(x, params):
    return _col(np.median(x, axis=1))


def quantile(x, params):
    s = np.sort(x, axis=1)
    return np.column_stack([_empirical_quantile(s, p["q"]) for p in params])


def absolute_energy(x, params):
    return _col((x * x).sum(axis=1))


def augmented_dickey_fuller(x, params):
    """t-statistic of the lagged level in the constant-only ADF regression.

    The number of lagged differences is the integer cube root of n_t - 1.
    """
    rows, n = x.shape
    p = 0
    while (p + 1) ** 3 <= n - 1:
        p += 1
    n_obs = n - 1 - p
    if n_obs <= p + 2:
        return np.full((rows, 1), np.nan)
    dx = np.diff(x, axis=1)
    design = np.empty((rows, n_obs, p + 2))
    design[:, :, 0] = x[:, p : n - 1]
    for j in range(1, p + 1):
        design[:, :, j] = dx[:, p - j : n - 1 - j]
    design[:, :, p + 1] = 1.0
    beta, se = _ols(design, dx[:, p:])
    with np.errstate(divide="ignore", invalid="ignore"):
        return _col(beta[:, 0] / se[:, 0])


def binned_entropy(x, params):
    rows, n = x.shape
    lo = x.min(axis=1, keepdims=True)
    hi = x.max(axis=1, keepdims=True)
    width = hi - lo
    out = np.empty((rows, len(params)))
    for j, p in enumerate(params):
        bins = int(p["max_bins"])
        # same edge arithmetic as numpy.histogram, row by row
        edges = np.arange(bins + 1) * (width / bins) + lo
        edges[:, -1] = hi[:, 0]
        with np.errstate(divide="ignore", invalid="ignore"):
            idx = np.where(width > 0, (x - lo) * (bins / width), 0.0).astype(np.intp)
        idx[idx == bins] -= 1
        idx[x < np.take_along_axis(edges, idx, axis=1)] -= 1
        idx[(x >= np.take_along_axis(edges, idx + 1, axis=1)) & (idx != bins - 1)] += 1
        flat = (idx + bins * np.arange(rows)[:, None]).ravel()
        counts = np.bincount(flat, minlength=rows * bins).reshape(rows, bins)
        prob = counts / n
        with np.errstate(divide="ignore", invalid="ignore"):
            out[:, j] = np.where(prob > 0, prob * np.log(prob), 0.0).sum(axis=1)
    return out


def has_large_standard_deviation(x, params):
    return _col(np.sqrt(_var(x)) > (x.max(axis=1) - x.min(axis=1)) / 2)


def has_variance_larger_than_std(x, params):
    v = _var(x)
    return _col(v > np.sqrt(v))


def is_symmetric_looking(x, params):
    gap = np.abs(x.mean(axis=1) - np.median(x, axis=1))
    return _col(gap < (x.max(axis=1) - x.min(axis=1)) / 2)


def mass_quantile(x, params):
    n = x.shape[1]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.cumsum(x, axis=1) / x.mean(axis=1, keepdims=True)
    out = np.empty((x.shape[0], len(params)))
    for j, p in enumerate(params):
        hit = ratio >= p["q"]
        first = hit.argmax(axis=1) + 1.0
        out[:, j] = np.where(hit.any(axis=1), first / n, np.nan)
    return out


def number_data_points_above_mean(x, params):
    return _col((x > x.mean(axis=1, keepdims=True)).sum(axis=1))


def number_data_points_above_median(x, params):
    return _col((x > np.median(x, axis=1, keepdims=True)).sum(axis=1))


def number_data_points_below_mean(x, params):
    return _col((x < x.mean(axis=1, keepdims=True)).sum(axis=1))


def number_data_points_below_median(x, params):
    return _col((x < np.median(x, axis=1, keepdims=True)).sum(axis=1))


def arima_model_coefficients(x, params):
    """Coefficient phi_i of an AR(k) model with intercept phi_0, fitted by conditional OLS."""
    rows, n = x.shape
    out = np.full((rows, len(params)), np.nan)
    fits = {}
    for j, p in enumerate(params):
        k, i = int(p["k"]), int(p["i"])
        if not 0 <= i <= k or n - k < k + 1:
            continue
        if k not in fits:
            windows = sliding_window_view(x, k + 1, axis=1)
            design = np.empty((rows, n - k, k + 1))
            design[:, :, 0] = 1.0
            design[:, :, 1:] = windows[:, :, k - 1 :: -1] if k > 0 else windows[:, :, :0]
            fits[k], _ = _ols(design, windows[:, :, k])
        out[:, j] = fits[k][:, i]
    return out


def continuous_wavelet_coefficients(x, params):
    return np.column_stack([wavelets.cwt_coefficient(x, p["a"], p["b"]) for p in params])


def fft_coefficient(x, params):
    n = x.shape[1]
    spectrum = np.fft.rfft(x, axis=1)
    cols = []
    for p in params:
        k = int(p["k"]) % n
        if k > n // 2:
            k = n - k
        cols.append(spectrum[:, k].real)
    return np.column_stack(cols)


def first_index_max(x, params):
    return _col((x.argmax(axis=1) + 1.0) / x.shape[1])


def first_index_min(x, params):
    return _col((x.argmin(axis=1) + 1.0) / x.shape[1])


def last_index_max(x, params):
    n = x.shape[1]
    return _col((n - x[:, ::-1].argmax(axis=1)) / n)


def last_index_min(x, params):
    n = x.shape[1]
    return _col((n - x[:, ::-1].argmin(axis=1)) / n)


def lagged_autocorrelation(x, params):
    """Lag-l autocovariance sum divided by the uncorrected variance (no 1/n factor)."""
    n = x.shape[1]
    d = _centered(x)
    v = (d * d).mean(axis=1)
    out = np.full((x.shape[0], len(params)), np.nan)
    for j, p in enumerate(params):
        lag = int(p["lag"])
        if not 0 < lag < n:
            continue
        with np.errstate(divide="ignore", invalid="ignore"):
            out[:, j] = (d[:, : n - lag] * d[:, lag:]).sum(axis=1) / v
    return out


def large_number_of_peaks(x, params):
    return np.column_stack([_count_peaks(x, int(p["support"])) > p["m"] for p in params])


def longest_strike_above_mean(x, params):
    return _col(_longest_run(x >= x.mean(axis=1, keepdims=True)))


def longest_strike_above_median(x, params):
    return _col(_longest_run(x >= np.median(x, axis=1, keepdims=True)))


def longest_strike_below_mean(x, params):
    return _col(_longest_run(x <= x.mean(axis=1, keepdims=True)))


def longest_strike_below_median(x, params):
    return _col(_longest_run(x <= np.median(x, axis=1, keepdims=True)))


def longest_strike_negative(x, params):
    return _col(_longest_run(x < 0))


def longest_strike_positive(x, params):
    return _col(_longest_run(x > 0))


def longest_strike_zero(x, params):
    return _col(_longest_run(x == 0))


def mean_absolute_change(x, params):
    return _col(np.abs(np.diff(x, axis=1)).sum(axis=1) / x.shape[1])


def mean_absolute_change_quantiles(x, params):
    s = np.sort(x, axis=1)
    change = np.abs(np.diff(x, axis=1))
    out = np.empty((x.shape[0], len(params)))
    for j, p in enumerate(params):
        lo = _empirical_quantile(s, p["ql"])[:, None]
        hi = _empirical_quantile(s, p["qh"])[:, None]
        inside = (x >= lo) & (x <= hi)
        both = inside[:, :-1] & inside[:, 1:]
        count = both.sum(axis=1)
        total = np.where(both, change, 0.0).sum(axis=1)
        out[:, j] = np.where(count > 0, total / np.maximum(count, 1), 0.0)
    return out


def mean_autocorrelation(x, params):
    # sum over all lags of sum_nu d_nu d_{nu+l} equals ((sum d)^2 - sum d^2) / 2
    n = x.shape[1]
    d = _centered(x)
    sq = (d * d).sum(axis=1)
    total = d.sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        return _col((total * total - sq) / 2.0 / ((n - 1) * (sq / n)))


def mean_second_derivative_central(x, params):
    n = x.shape[1]
    if n < 3:
        return np.full((x.shape[0], 1), np.nan)
    curv = 0.5 * (x[:, : n - 3] - 2.0 * x[:, 1 : n - 2] + x[:, 2 : n - 1])
    return _col(curv.sum(axis=1) / (n - 2))


def number_cwt_peaks(x, params):
    return wavelets.count_cwt_peaks_block(x, [int(p["max_width"]) for p in params])


def number_peaks(x, params):
    return np.column_stack([_count_peaks(x, int(p["support"])) for p in params])


def welch_density(x, params, max_segment: int = 256):
    """One-sided Welch PSD (Hann window, 50% overlap, per-segment mean removal)."""
    rows, n = x.shape
    nperseg = min(max_segment, n)
    step = nperseg - nperseg // 2
    segments = sliding_window_view(x, nperseg, axis=1)[:, ::step]
    segments = segments - segments.mean(axis=2, keepdims=True)
    window = 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(nperseg) / nperseg)
    power = np.abs(np.fft.rfft(segments * window, axis=2)) ** 2 / (window * window).sum()
    if nperseg % 2:
        power[..., 1:] *= 2.0
    else:
        power[..., 1:-1] *= 2.0
    psd = power.mean(axis=1)
    out = np.full((rows, len(params)), np.nan)
    for j, p in enumerate(params):
        i = int(p["coeff"])
        if 0 <= i < psd.shape[1]:
            out[:, j] = psd[:, i]
    return out


def time_reversal_asymmetry_statistic(x, params):
    n = x.shape[1]
    out = np.full((x.shape[0], len(params)), np.nan)
    for j, p in enumerate(params):
        lag = int(p["lag"])
        span = n - 2 * lag
        if lag < 1 or span < 1:
            continue
        ahead2, ahead1, here = x[:, 2 * lag :], x[:, lag : n - lag], x[:, :span]
        out[:, j] = (ahead2 * ahead2 * ahead1 - ahead1 * here * here).sum(axis=1) / span
    return out
