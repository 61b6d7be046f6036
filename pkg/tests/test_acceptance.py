"""End-to-end acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line that is printed in the terminal summary.
Run with ``pytest tests/test_acceptance.py -s`` to also see them inline.
"""

import itertools
import math
import time
from fractions import Fraction

import numpy as np
import pytest
from scipy import stats

import oracles
from freshx.cli import main
from freshx.data import smoke_paths
from freshx.features import wavelets
from freshx.features.registry import CATALOG
from freshx.model import SelectionConfig
from freshx.pca import fit_pca
from freshx.pipeline import run_fresh
from freshx.selection import benjamini_yekutieli
from freshx.significance import dispatch_test, fisher_exact_table, kendall_tau_b, ks_statistic
from freshx.synth import NOISE_KIND, SIGNAL_KIND, fer_experiment, gen_two_class, scaling_experiment
from test_features import CORPUS, mismatches

SEED = 20160718


def test_criterion_1_fer_control(verdict):
    start = time.perf_counter()
    result = fer_experiment(n_features=250, m=100, q=0.10, repetitions=200, seed=SEED)
    elapsed = time.perf_counter() - start
    bound = 0.10 + 2 * result.standard_error
    ok = result.fer <= bound and elapsed < 120
    verdict(1, ok, f"FER={result.fer:.4f} bound={bound:.4f} runtime={elapsed:.1f}s")
    assert ok


def test_criterion_2_test_oracles(verdict):
    fisher_err = 0.0
    for a, b, c, d in itertools.product(range(13), repeat=4):
        if max(a + b, c + d, a + c, b + d) > 12:
            continue
        want = oracles.fisher_enumeration([[a, b], [c, d]])
        fisher_err = max(fisher_err, abs(fisher_exact_table([[a, b], [c, d]]).p_value - want))

    rng = np.random.default_rng(SEED)
    ks_bad = 0
    for _ in range(1000):
        x = np.round(rng.standard_normal(int(rng.integers(1, 51))), int(rng.integers(0, 3)))
        y = np.round(rng.standard_normal(int(rng.integers(1, 51))) + 0.3, int(rng.integers(0, 3)))
        ks_bad += ks_statistic(x, y) != float(oracles.ks_statistic_bruteforce(x, y))

    tau_err = 0.0
    for _ in range(1000):
        m = int(rng.integers(2, 201))
        x = np.round(rng.standard_normal(m), int(rng.integers(0, 3)))
        y = np.round(0.5 * x + rng.standard_normal(m), int(rng.integers(0, 3)))
        if np.unique(x).size < 2 or np.unique(y).size < 2:
            continue
        tau_err = max(tau_err, abs(kendall_tau_b(x, y)[0] - oracles.kendall_tau_b_pairs(x, y)))

    ok = fisher_err <= 1e-10 and ks_bad == 0 and tau_err <= 1e-12
    verdict(2, ok, f"fisher max err={fisher_err:.2e} ks mismatches={ks_bad} tau max err={tau_err:.2e}")
    assert ok


def null_distance(p_values) -> float:
    return stats.kstest(np.asarray(p_values), "uniform").statistic


def test_criterion_3_null_calibration(verdict):
    m, sims = 100, 10_000
    rng = np.random.default_rng(123)
    kendall, ks, fisher = [], [], []
    for _ in range(sims):
        x, y = rng.standard_normal(m), rng.standard_normal(m)
        bx = rng.integers(0, 2, m).astype(float)
        by = rng.integers(0, 2, m).astype(float)
        kendall.append(dispatch_test(x, y).p_value)
        ks.append(dispatch_test(x, by).p_value)
        fisher.append(dispatch_test(bx, by).p_value)
    d_kendall, d_ks = null_distance(kendall), null_distance(ks)
    fisher = np.asarray(fisher)
    rates = {alpha: float(np.mean(fisher <= alpha)) for alpha in (0.01, 0.05, 0.1)}
    fisher_ok = all(rate <= alpha for alpha, rate in rates.items())
    ok = d_kendall <= 0.02 and d_ks <= 0.02 and fisher_ok
    verdict(
        3,
        ok,
        f"kendall D={d_kendall:.4f} ks D={d_ks:.4f} (limit 0.02) fisher rejection "
        + " ".join(f"{rate:.4f}@{alpha}" for alpha, rate in rates.items()),
    )
    assert ok


def test_criterion_4_feature_oracles(verdict):
    bad = {name: len(mismatches(name)) for name in CATALOG}
    bad = {name: count for name, count in bad.items() if count}

    dft_err = 0.0
    for s in CORPUS:
        n = s.size
        for k in range(n // 2 + 1):
            want = sum(complex(v) * complex(math.cos(2 * math.pi * k * j / n), -math.sin(2 * math.pi * k * j / n))
                       for j, v in enumerate(s))  # fmt: skip
            got = CATALOG["fft_coefficient"][0](s[None, :], [{"k": k}])[0, 0]
            # the feature is the real part of the coefficient
            dft_err = max(dft_err, abs(got - want.real) / max(1.0, abs(want)))

    cwt_err = 0.0
    for s in CORPUS[:25]:
        widths = [1, 2, 5, 10]
        got = wavelets.cwt(s, widths)
        for row, a in enumerate(widths):
            want = oracles.cwt_truncated([float(v) for v in s], a)
            cwt_err = max(cwt_err, float(np.max(np.abs(got[row] - want))) / max(1.0, float(np.abs(want).max())))

    ok = not bad and dft_err <= 1e-9 and cwt_err <= 1e-9
    verdict(4, ok, f"{len(CATALOG)} mappings, failing={bad or 'none'} dft err={dft_err:.1e} cwt err={cwt_err:.1e}")
    assert ok


def test_criterion_5_by_hand_check(verdict):
    p, q = (0.001, 0.02, 0.5), Fraction(1, 10)
    harmonic = sum(Fraction(1, k) for k in range(1, 4))
    thresholds = [k * q / (3 * harmonic) for k in (1, 2, 3)]
    below = [k for k in range(3) if Fraction(p[k]) <= thresholds[k]]
    expected = [k < max(below) + 1 for k in range(3)]
    got = benjamini_yekutieli(p, 0.1).tolist()
    ok = harmonic == Fraction(11, 6) and expected == [True, True, False] and got == expected
    verdict(5, ok, f"rejected={got} thresholds={[float(t) for t in thresholds]}")
    assert ok


def is_location(feature) -> bool:
    return feature.kind == SIGNAL_KIND and feature.mapping in ("mean", "median", "quantile")


def test_criterion_6_power(verdict):
    q, seeds = 0.10, 100
    hits, noise_fraction = 0, []
    for seed in range(seeds):
        dataset, target = gen_two_class(200, 100, 2.0, seed=seed)
        selected, table = run_fresh(dataset, target, SelectionConfig(q=q, worker_count=4))
        hits += any(is_location(f) for f in selected.ids)
        noise_rows = [r for r in table if r.feature.kind == NOISE_KIND]
        noise_fraction.append(sum(r.relevant for r in noise_rows) / len(noise_rows))
    noise_fraction = np.asarray(noise_fraction)
    mean = float(noise_fraction.mean())
    bound = q + 2 * float(noise_fraction.std(ddof=1)) / math.sqrt(seeds)
    ok = hits >= 99 and mean <= bound
    verdict(6, ok, f"location hits={hits}/100 noise fraction={mean:.4f} bound={bound:.4f}")
    assert ok


SWEEPS = {
    "length": dict(grid=[1000, 2000, 4000, 8000], samples=200),
    "samples": dict(grid=[250, 500, 1000, 2000], length=1000),
    "features": dict(grid=[500, 1000, 2000, 4000], samples=1000),
}


@pytest.mark.slow
def test_criterion_7_scaling(verdict):
    details, ok = [], True
    for axis, kwargs in SWEEPS.items():
        start = time.perf_counter()
        rows = scaling_experiment(axis, jobs=1, repeat=2, seed=SEED, **kwargs)
        elapsed = time.perf_counter() - start
        ratios = [b[1] / a[1] for a, b in zip(rows, rows[1:])]
        ok &= all(1.6 <= r <= 2.6 for r in ratios) and elapsed < 300
        details.append(f"{axis}: ratios={'/'.join(f'{r:.2f}' for r in ratios)} sweep={elapsed:.0f}s")
    verdict(7, ok, "; ".join(details))
    assert ok


def test_criterion_8_determinism(verdict, tmp_path):
    data, targets = (str(p) for p in smoke_paths())
    outputs = []
    for jobs in (1, 2, 8):
        out, report = tmp_path / f"out{jobs}.csv", tmp_path / f"report{jobs}.csv"
        code = main(["run", "--data", data, "--targets", targets, "--jobs", str(jobs),
                     "--out", str(out), "--report", str(report)])  # fmt: skip
        assert code == 0
        outputs.append((out.read_bytes(), report.read_bytes()))
    ok = outputs[0] == outputs[1] == outputs[2]
    verdict(8, ok, f"jobs 1/2/8 identical={ok} ({len(outputs[0][0])} + {len(outputs[0][1])} bytes)")
    assert ok


def correlated_pair(rho, m, rng):
    x = rng.standard_normal(m)
    return np.column_stack([x, rho * x + math.sqrt(1 - rho * rho) * rng.standard_normal(m)])


def test_criterion_9_pca(verdict):
    rng = np.random.default_rng(SEED)
    closed_form_err = 0.0
    for rho in (0.8, 0.3, -0.6):
        data = correlated_pair(rho, 500, rng)
        r = float(np.corrcoef(data, rowvar=False)[0, 1])
        want = np.array([1 + abs(r), 1 - abs(r)])
        closed_form_err = max(closed_form_err, float(np.max(np.abs(fit_pca(data).eigenvalues - want))))

    mixing = rng.standard_normal((12, 12))
    data = rng.standard_normal((300, 12)) @ mixing
    fit = fit_pca(data)
    ortho_err = float(np.max(np.abs(fit.loadings.T @ fit.loadings - np.eye(fit.loadings.shape[1]))))
    scores = fit.transform(data)
    cov = np.cov(scores, rowvar=False)
    off_diag = float(np.max(np.abs(cov - np.diag(np.diag(cov)))))
    ratio = fit.explained_variance_ratio
    monotone = bool(np.all(np.diff(ratio) <= 0)) and abs(ratio.sum() - 1) < 1e-12

    ok = closed_form_err <= 1e-10 and ortho_err <= 1e-8 and off_diag <= 1e-8 and monotone
    verdict(9, ok, f"eigen err={closed_form_err:.1e} orthogonality err={ortho_err:.1e} "
                   f"score cov err={off_diag:.1e} monotone={monotone}")  # fmt: skip
    assert ok
