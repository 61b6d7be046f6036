"""Ricker (Mexican hat) wavelet transform and ridge-line peak counting."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

# Support of the truncated wavelet used for full transforms, in units of the width.
TRUNCATE = 5.0

# Peak acceptance: ridge maximum over this percentile of width-1 magnitudes.
MIN_SNR = 3.0
NOISE_PERC = 10.0


def ricker(offsets, a: float) -> np.ndarray:
    """Ricker wavelet evaluated at integer ``offsets`` (nu - b) for width ``a``."""
    offsets = np.asarray(offsets, dtype=float)
    amp = 2.0 / (math.sqrt(3.0 * a) * math.pi**0.25)
    ratio = offsets**2 / (a * a)
    return amp * (1.0 - ratio) * np.exp(-ratio / 2.0)


def cwt_coefficient(x: np.ndarray, a: float, b: float) -> np.ndarray:
    """Exact coefficient X_w(a, b) for each row of ``x`` (positions are 0-based)."""
    n = x.shape[-1]
    psi = ricker(np.arange(n) - b, a)
    return np.einsum("ij,j->i", np.atleast_2d(x), psi)


def cwt(x: np.ndarray, widths) -> np.ndarray:
    """Transform of a 1-d series for every width, shape ``(len(widths), n)``.

    The wavelet is cut at +-TRUNCATE*a samples, which keeps the cost linear in n.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    out = np.empty((len(widths), n))
    for row, a in enumerate(widths):
        half = min(int(math.ceil(TRUNCATE * a)), n - 1)
        psi = ricker(np.arange(-half, half + 1), a)
        out[row] = np.convolve(x, psi)[half : half + n]
    return out


def _local_maxima(row: np.ndarray) -> np.ndarray:
    inner = row[1:-1]
    return np.flatnonzero((inner > row[:-2]) & (inner > row[2:])) + 1


def _row_percentile(values: np.ndarray, perc: float) -> np.ndarray:
    """Per-row percentile ignoring NaN, linear interpolation between order statistics."""
    ordered = np.sort(values, axis=1)
    count = np.sum(~np.isnan(values), axis=1)
    h = (count - 1) * (perc / 100.0)
    lo = np.floor(h).astype(np.intp)
    hi = np.minimum(lo + 1, count - 1)
    rows = np.arange(values.shape[0])
    return ordered[rows, lo] + (h - lo) * (ordered[rows, hi] - ordered[rows, lo])


@dataclass
class Ridges:
    """Summary of ridge lines: point count, strongest coefficient, column at the smallest width."""

    length: np.ndarray
    peak: np.ndarray
    end_col: np.ndarray


def ridge_lines(coef: np.ndarray, widths, gap_thresh: int = 1) -> Ridges:
    """Link local maxima of ``coef`` across adjacent widths into ridge lines.

    Rows are walked from the largest width down. Each open ridge moves to the
    nearest local maximum within ``ceil(width/4)`` columns; when several ridges
    want the same maximum the closest one (then the leftmost) takes it. A ridge
    is closed after more than ``gap_thresh`` consecutive rows without a match.
    """
    col = np.zeros(0, dtype=np.intp)
    gap = np.zeros(0, dtype=np.intp)
    length = np.zeros(0, dtype=np.intp)
    peak = np.zeros(0)
    done = []
    for row in range(coef.shape[0] - 1, -1, -1):
        maxima = _local_maxima(coef[row])
        max_dist = max(1, math.ceil(widths[row] / 4))
        matched = np.zeros(col.size, dtype=bool)
        claimed = np.zeros(maxima.size, dtype=bool)
        if col.size and maxima.size:
            pos = np.searchsorted(maxima, col)
            left = np.clip(pos - 1, 0, maxima.size - 1)
            right = np.clip(pos, 0, maxima.size - 1)
            d_left = np.abs(maxima[left] - col)
            d_right = np.abs(maxima[right] - col)
            choice = np.where(d_right < d_left, right, left)
            dist = np.minimum(d_left, d_right)
            ok = np.flatnonzero(dist <= max_dist)
            # closest ridge wins a contested maximum; ties go to the leftmost ridge
            order = ok[np.lexsort((col[ok], dist[ok], choice[ok]))]
            _, first = np.unique(choice[order], return_index=True)
            winners = order[first]
            matched[winners] = True
            claimed[choice[winners]] = True
            col[winners] = maxima[choice[winners]]
            length[winners] += 1
            peak[winners] = np.maximum(peak[winners], coef[row, col[winners]])
        gap = np.where(matched, 0, gap + 1)
        closing = gap > gap_thresh
        if closing.any():
            done.append((length[closing], peak[closing], col[closing]))
        keep = ~closing
        fresh = maxima[~claimed]
        col = np.concatenate([col[keep], fresh])
        gap = np.concatenate([gap[keep], np.zeros(fresh.size, dtype=np.intp)])
        length = np.concatenate([length[keep], np.ones(fresh.size, dtype=np.intp)])
        peak = np.concatenate([peak[keep], coef[row, fresh]])
    done.append((length, peak, col))
    return Ridges(
        np.concatenate([d[0] for d in done]),
        np.concatenate([d[1] for d in done]),
        np.concatenate([d[2] for d in done]),
    )


def cwt_block(x: np.ndarray, widths) -> np.ndarray:
    """Row-wise :func:`cwt` of a ``(rows, n)`` block, shape ``(len(widths), rows, n)``."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    n = x.shape[1]
    out = np.empty((len(widths), *x.shape))
    for row, a in enumerate(widths):
        half = min(int(math.ceil(TRUNCATE * a)), n - 1)
        psi = ricker(np.arange(-half, half + 1), a)
        out[row] = ndimage.convolve1d(x, psi, axis=1, mode="constant", cval=0.0)
    return out


def count_cwt_peaks_block(x: np.ndarray, max_widths) -> np.ndarray:
    """Ridge-line peak counts for every row of ``x`` and every entry of ``max_widths``.

    For max width l the transform uses widths 1..l. A ridge counts when it spans
    at least ``ceil(l/4)`` widths and its strongest coefficient is at least
    MIN_SNR times the NOISE_PERC percentile of the width-1 magnitudes within l
    samples of the ridge's end. Rows are laid end to end, separated by NaN
    columns wider than any matching distance, so one ridge pass covers the block.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    rows, n = x.shape
    out = np.zeros((rows, len(max_widths)))
    top = max(max_widths) if len(max_widths) else 0
    if n < 3 or top < 1:
        return out
    coef_all = np.abs(cwt_block(x, np.arange(1, top + 1)))
    pad = top + 1
    stride = n + pad
    for j, max_width in enumerate(max_widths):
        if max_width < 1:
            continue
        widths = np.arange(1, max_width + 1)
        laid = np.full((max_width, rows, stride), np.nan)
        laid[:, :, :n] = coef_all[:max_width]
        laid = laid.reshape(max_width, rows * stride)
        ridges = ridge_lines(laid, widths)
        keep = ridges.length >= math.ceil(max_width / 4)
        cols = ridges.end_col[keep]
        window = cols[:, None] + np.arange(-max_width, max_width + 1)
        base = laid[0, np.clip(window, 0, laid.shape[1] - 1)]
        base[(window < 0) | (window >= laid.shape[1])] = np.nan
        noise = _row_percentile(base, NOISE_PERC)
        signal = ridges.peak[keep]
        with np.errstate(divide="ignore", invalid="ignore"):
            snr = np.where(noise > 0, signal / noise, np.where(signal > 0, np.inf, 0.0))
        out[:, j] = np.bincount(cols[snr >= MIN_SNR] // stride, minlength=rows)
    return out


def count_cwt_peaks(x, max_width: int) -> int:
    """Ridge-line peak count of a single series (see :func:`count_cwt_peaks_block`)."""
    return int(count_cwt_peaks_block(np.asarray(x, dtype=float)[None, :], [max_width])[0, 0])
