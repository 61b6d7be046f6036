import numpy as np
import pytest

from freshx.synth import (
    NOISE_KIND,
    SIGNAL_KIND,
    InvalidSizeError,
    fer_experiment,
    gen_two_class,
    scaling_experiment,
)


def test_same_seed_same_dataset():
    a, ta = gen_two_class(20, 30, 1.0, seed=5)
    b, tb = gen_two_class(20, 30, 1.0, seed=5)
    assert np.array_equal(a.series[SIGNAL_KIND], b.series[SIGNAL_KIND])
    assert np.array_equal(a.series[NOISE_KIND], b.series[NOISE_KIND])
    assert np.array_equal(ta.values, tb.values)
    c, _ = gen_two_class(20, 30, 1.0, seed=6)
    assert not np.array_equal(a.series[SIGNAL_KIND], c.series[SIGNAL_KIND])


def test_balanced_labels_and_shift():
    ds, target = gen_two_class(2000, 200, 2.0, seed=0)
    assert target.values.sum() == 1000
    means = ds.series[SIGNAL_KIND].mean(axis=1)
    gap = means[target.values == 1].mean() - means[target.values == 0].mean()
    assert gap == pytest.approx(2.0, abs=0.05)
    noise = ds.series[NOISE_KIND].mean(axis=1)
    assert abs(noise[target.values == 1].mean() - noise[target.values == 0].mean()) < 0.05


def test_ar1_coefficient():
    ds, _ = gen_two_class(200, 400, 0.0, seed=1)
    x = ds.series[NOISE_KIND]
    d = x - x.mean(axis=1, keepdims=True)
    lag1 = (d[:, 1:] * d[:, :-1]).sum() / (d * d).sum()
    assert lag1 == pytest.approx(0.5, abs=0.02)


@pytest.mark.parametrize("args", [(3, 10, 1.0), (4, 7, 1.0), (4, 10, -1.0), (0, 10, 1.0)])
def test_invalid_sizes(args):
    with pytest.raises(InvalidSizeError):
        gen_two_class(*args, seed=0)


def test_fer_small_q_selects_nothing():
    result = fer_experiment(50, 60, 1e-9, 20, seed=0)
    assert result.fer == 0 and result.mean_selected == 0


@pytest.mark.parametrize("q", [0.1, 0.01])
@pytest.mark.parametrize("duplicated", [False, True])
def test_fer_controlled(q, duplicated):
    result = fer_experiment(100, 80, q, 100, seed=1, duplicated=duplicated)
    assert result.fer <= q + 2 * result.standard_error


def test_fer_is_seeded():
    a = fer_experiment(30, 40, 0.5, 10, seed=3)
    b = fer_experiment(30, 40, 0.5, 10, seed=3)
    assert np.array_equal(a.per_repetition, b.per_repetition)


def test_scaling_rows():
    rows = scaling_experiment("features", [10, 20], samples=30, repeat=1)
    assert [v for v, _ in rows] == [10, 20] and all(t > 0 for _, t in rows)
    with pytest.raises(ValueError):
        scaling_experiment("bogus", [1])
