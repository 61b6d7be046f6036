"""Feature significance tests and the dispatch rule choosing one per feature.

All p-values are two-sided. The test is picked from the codomain classes of
feature and target:

====================  ===============  =====================================
feature               target           test
====================  ===============  =====================================
binary                binary           Fisher's exact test
binary                continuous       KS on target split by feature value
continuous            binary           KS on feature split by target value
continuous            continuous       Kendall's tau-b
constant              any              not testable
====================  ===============  =====================================
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from freshx.model import CodomainClass, DataError, LengthMismatchError, TestKind, classify_codomain

# Relative slack when comparing table probabilities; absorbs rounding in log-space
# evaluation. Distinct probabilities with N <= 24 differ by far more than this.
FISHER_REL_TOL = 1e-7


class EmptySampleError(DataError):
    pass


class ConstantInputError(DataError):
    pass


@dataclass(frozen=True)
class TestOutcome:
    p_value: float
    statistic: float
    test: TestKind

    __test__ = False


def _binary_levels(values) -> tuple[np.ndarray, np.ndarray]:
    levels = np.unique(values)
    if levels.size != 2:
        raise DataError(f"expected exactly two distinct values, got {levels.size}")
    return levels, values == levels[1]


def hypergeom_log_pmf(k, row1: int, col1: int, total: int) -> np.ndarray:
    """log P(top-left cell = k) for a 2x2 table with fixed margins."""
    k = np.asarray(k, dtype=float)

    def log_comb(n, r):
        return gammaln(n + 1) - gammaln(r + 1) - gammaln(n - r + 1)

    return log_comb(col1, k) + log_comb(total - col1, row1 - k) - log_comb(total, row1)


def fisher_exact_table(table) -> TestOutcome:
    """Two-sided Fisher exact test on a 2x2 table of counts.

    The p-value sums the probabilities of every table with the observed margins
    that is at most as likely as the observed one. A zero margin gives p = 1.
    """
    (a, b), (c, d) = np.asarray(table, dtype=np.int64)
    row1, col1, total = a + b, a + c, a + b + c + d
    if min(row1, c + d, col1, b + d) == 0:
        return TestOutcome(1.0, 1.0, TestKind.FISHER)
    support = np.arange(max(0, row1 + col1 - total), min(row1, col1) + 1)
    log_pmf = hypergeom_log_pmf(support, row1, col1, total)
    observed = log_pmf[a - support[0]]
    pmf = np.exp(log_pmf - observed)
    p = math.exp(observed) * pmf[pmf <= 1.0 + FISHER_REL_TOL].sum()
    return TestOutcome(min(1.0, p), math.exp(observed), TestKind.FISHER)


def fisher_exact(x, y) -> TestOutcome:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise LengthMismatchError("feature and target lengths differ")
    _, xs = _binary_levels(x)
    _, ys = _binary_levels(y)
    table = [[np.sum(~xs & ~ys), np.sum(~xs & ys)], [np.sum(xs & ~ys), np.sum(xs & ys)]]
    return fisher_exact_table(table)


def ks_statistic(a, b) -> float:
    """sup |ECDF_a - ECDF_b| evaluated at every pooled sample point."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    pooled = np.concatenate([a, b])
    count_a = np.searchsorted(a, pooled, side="right").astype(np.int64)
    count_b = np.searchsorted(b, pooled, side="right").astype(np.int64)
    # integer numerator, one rounding: D is the correctly rounded rational sup
    gap = np.max(np.abs(count_a * b.size - count_b * a.size))
    return int(gap) / (a.size * b.size)


def kolmogorov_sf(lam: float) -> float:
    """Asymptotic Kolmogorov tail 2 * sum_k (-1)^(k-1) exp(-2 k^2 lam^2), clamped to [0, 1]."""
    if lam <= 0.0:
        return 1.0
    # last index whose term is still >= 1e-16
    k_max = max(1, int(math.sqrt(-math.log(1e-16) / (2.0 * lam * lam))) + 1)
    k = np.arange(1, k_max + 1, dtype=float)
    terms = np.exp(-2.0 * k * k * lam * lam)
    terms = terms[terms >= 1e-16]
    signs = np.where(np.arange(terms.size) % 2 == 0, 1.0, -1.0)
    return float(min(1.0, max(0.0, 2.0 * np.sum(signs * terms))))


def ks_two_sample(a, b) -> TestOutcome:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size == 0 or b.size == 0:
        raise EmptySampleError("both samples need at least one observation")
    d = ks_statistic(a, b)
    n_eff = a.size * b.size / (a.size + b.size)
    root = math.sqrt(n_eff)
    lam = (root + 0.12 + 0.11 / root) * d
    return TestOutcome(kolmogorov_sf(lam), d, TestKind.KS_BINARY_TARGET)


def count_inversions(r) -> int:
    """Number of pairs i < j with r[i] > r[j], by bottom-up merging.

    Each pass merges adjacent sorted runs with a stable sort (timsort merges
    presorted runs in linear time) and, for every element of a right run, counts
    the left-run elements that land after it.
    """
    r = np.asarray(r, dtype=np.int64).copy()
    m = r.size
    if m < 2:
        return 0
    r -= r.min()
    span = int(r.max()) + 1
    idx = np.arange(m)
    total = 0
    width = 1
    while width < m:
        block = idx // (2 * width)
        is_left = (idx // width) % 2 == 0
        order = np.argsort(block * span + r, kind="stable")
        r = r[order]
        is_left = is_left[order]
        left_cum = np.cumsum(is_left)
        starts = np.arange(0, m, 2 * width)
        left_before = np.concatenate([[0], left_cum[starts[1:] - 1]])
        left_in_block = np.minimum(width, m - starts)
        right_pos = np.flatnonzero(~is_left)
        b = right_pos // (2 * width)
        total += int(np.sum(left_in_block[b] - (left_cum[right_pos] - left_before[b])))
        width *= 2
    return total


def _tie_sums(values) -> tuple[int, int, int]:
    _, counts = np.unique(values, return_counts=True)
    t = counts.astype(np.int64)
    return int(np.sum(t * (t - 1) // 2)), int(np.sum(t * (t - 1) * (t - 2))), int(np.sum(t * (t - 1) * (2 * t + 5)))


def kendall_tau_b(x, y) -> tuple[float, int, int, int, int]:
    """tau-b plus the raw counts (S = C - D, pairs, x ties, y ties)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    m = x.size
    order = np.lexsort((y, x))
    _, y_rank = np.unique(y, return_inverse=True)
    discordant = count_inversions(y_rank[order])
    pairs = m * (m - 1) // 2
    x_ties = _tie_sums(x)[0]
    y_ties = _tie_sums(y)[0]
    _, joint = np.unique(np.column_stack([x, y]), axis=0, return_counts=True)
    joint_ties = int(np.sum(joint * (joint - 1) // 2))
    s = pairs - x_ties - y_ties + joint_ties - 2 * discordant
    tau = s / math.sqrt((pairs - x_ties) * (pairs - y_ties))
    return tau, s, pairs, x_ties, y_ties


def kendall_rank(x, y) -> TestOutcome:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise LengthMismatchError("feature and target lengths differ")
    m = x.size
    if m < 2:
        raise DataError("Kendall's tau needs at least two observations")
    if np.unique(x).size < 2 or np.unique(y).size < 2:
        raise ConstantInputError("Kendall's tau is undefined for constant input")
    tau, s, _, x_ties, y_ties = kendall_tau_b(x, y)
    _, x_t3, x_t5 = _tie_sums(x)
    _, y_t3, y_t5 = _tie_sums(y)
    mm = m * (m - 1.0)
    variance = (mm * (2 * m + 5) - x_t5 - y_t5) / 18.0 + 2.0 * x_ties * y_ties / mm
    if m > 2:
        variance += x_t3 * y_t3 / (9.0 * mm * (m - 2))
    z = s / math.sqrt(variance)
    p = math.erfc(abs(z) / math.sqrt(2.0))
    return TestOutcome(min(1.0, p), tau, TestKind.KENDALL)


def dispatch_test(feature, target) -> TestOutcome | None:
    """Run the test matching the codomains; ``None`` for a constant feature."""
    x = np.asarray(getattr(feature, "values", feature), dtype=float)
    y = np.asarray(getattr(target, "values", target), dtype=float)
    if x.shape != y.shape:
        raise LengthMismatchError(f"feature has {x.size} values, target has {y.size}")
    x_class = classify_codomain(x)
    y_class = classify_codomain(y)
    if x_class is CodomainClass.CONSTANT or y_class is CodomainClass.CONSTANT:
        return None
    if x_class is CodomainClass.BINARY and y_class is CodomainClass.BINARY:
        return fisher_exact(x, y)
    if x_class is CodomainClass.BINARY:
        _, hi = _binary_levels(x)
        out = ks_two_sample(y[~hi], y[hi])
        return TestOutcome(out.p_value, out.statistic, TestKind.KS_BINARY_FEATURE)
    if y_class is CodomainClass.BINARY:
        _, hi = _binary_levels(y)
        out = ks_two_sample(x[~hi], x[hi])
        return TestOutcome(out.p_value, out.statistic, TestKind.KS_BINARY_TARGET)
    return kendall_rank(x, y)
