import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from freshx.model import FeatureId, FeatureMatrix
from freshx.pca import EmptyAfterConstantDropError, TooFewRowsError, fit_pca, pca_reduce


def correlated_pair(rho, m=500, seed=0):
    """Two columns whose sample correlation is exactly ``rho`` (up to rounding)."""
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal((m, 2))
    raw -= raw.mean(axis=0)
    q, _ = np.linalg.qr(raw)
    u, v = q[:, 0], q[:, 1]
    return np.column_stack([u, rho * u + np.sqrt(1 - rho * rho) * v]) * [3.0, 0.5] + [10.0, -2.0]


def matrix(array):
    ids = [FeatureId("k", "c", (("j", j),)) for j in range(array.shape[1])]
    return FeatureMatrix.from_array([f"e{i}" for i in range(array.shape[0])], ids, array)


class TestClosedForm:
    @pytest.mark.parametrize("rho", [0.8, 0.3, -0.6])
    def test_two_by_two_eigenvalues(self, rho):
        fit = fit_pca(correlated_pair(rho))
        np.testing.assert_allclose(fit.eigenvalues, [1 + abs(rho), 1 - abs(rho)], rtol=0, atol=1e-10)

    def test_fraction_0_9_keeps_one_component(self):
        out = pca_reduce(matrix(correlated_pair(0.8)), 0.9)
        assert out.names == ["pc-1"]

    def test_constant_column_dropped(self):
        x = np.column_stack([np.arange(10.0), np.full(10, 4.0)])
        fit = fit_pca(x)
        assert fit.kept.tolist() == [0] and fit.n_components_for(1.0) == 1
        assert fit.explained_variance_ratio[0] == pytest.approx(1.0)

    def test_full_fraction_keeps_rank(self):
        rng = np.random.default_rng(1)
        assert pca_reduce(matrix(rng.standard_normal((30, 8))), 1.0).n_features == 8
        assert pca_reduce(matrix(rng.standard_normal((6, 20))), 1.0).n_features == 5

    def test_errors(self):
        with pytest.raises(TooFewRowsError):
            fit_pca(np.ones((1, 3)))
        with pytest.raises(EmptyAfterConstantDropError):
            fit_pca(np.ones((5, 3)))
        with pytest.raises(ValueError):
            pca_reduce(matrix(np.eye(3)), 0.0)


def random_data(seed, m, n):
    rng = np.random.default_rng(seed)
    mixing = rng.standard_normal((n, n))
    return rng.standard_normal((m, n)) @ mixing * rng.uniform(0.1, 100, n)


shapes = dict(seed=st.integers(0, 2**32 - 1), m=st.integers(3, 60), n=st.integers(1, 30))


@settings(max_examples=80, deadline=None)
@given(**shapes)
def test_scores_are_orthogonal(seed, m, n):
    scores = pca_reduce(matrix(random_data(seed, m, n)), 0.999).to_array()
    gram = scores.T @ scores
    norms = np.sqrt(np.diag(gram))
    off = gram - np.diag(np.diag(gram))
    assert np.all(np.abs(off) <= 1e-8 * np.outer(norms, norms))


@settings(max_examples=80, deadline=None)
@given(**shapes)
def test_explained_variance_monotone_and_sums_to_one(seed, m, n):
    ratio = fit_pca(random_data(seed, m, n)).explained_variance_ratio
    assert np.all(np.diff(ratio) <= 1e-12)
    assert ratio.sum() == pytest.approx(1.0, abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(**shapes, scale=st.floats(0.01, 100), shift=st.floats(-100, 100), col=st.integers(0, 29))
def test_positive_affine_rescaling_invariance(seed, m, n, scale, shift, col):
    x = random_data(seed, m, n)
    moved = x.copy()
    moved[:, col % n] = moved[:, col % n] * scale + shift
    fit = fit_pca(x)
    # compare only components whose eigenvalue is separated from its neighbours
    gaps = np.abs(np.diff(np.concatenate([[np.inf], fit.eigenvalues, [-np.inf]])))
    stable = np.flatnonzero(np.minimum(gaps[:-1], gaps[1:]) > 1e-3 * fit.eigenvalues[0])
    a = fit.transform(x)[:, stable]
    b = fit_pca(moved).transform(moved)[:, stable]
    np.testing.assert_allclose(b, a, rtol=0, atol=1e-8 * max(1.0, np.abs(a).max()))


def test_sign_convention():
    fit = fit_pca(random_data(3, 40, 6))
    lead = np.abs(fit.loadings).argmax(axis=0)
    assert np.all(fit.loadings[lead, np.arange(fit.loadings.shape[1])] > 0)
