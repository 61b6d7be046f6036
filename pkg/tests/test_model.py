import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from freshx.model import (
    CodomainClass,
    ConstantTargetError,
    DataError,
    Dataset,
    FeatureId,
    FeatureMatrix,
    LengthMismatchError,
    SelectionConfig,
    TargetVector,
    TimeSeriesSample,
    classify_codomain,
)


@pytest.mark.parametrize(
    "values, expected",
    [
        ((1, 1, 1, 1), CodomainClass.CONSTANT),
        ((0, 1, 0, 1), CodomainClass.BINARY),
        ((0.1, 0.2, 0.3), CodomainClass.CONTINUOUS),
    ],
)
def test_classify_codomain(values, expected):
    assert classify_codomain(values) is expected


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=1, max_size=30), st.randoms())
def test_classify_is_permutation_invariant(values, rnd):
    shuffled = list(values)
    rnd.shuffle(shuffled)
    assert classify_codomain(values) is classify_codomain(shuffled)


class TestTimeSeriesSample:
    def test_rejects_empty_and_non_finite(self):
        with pytest.raises(DataError):
            TimeSeriesSample("a", "s", [])
        with pytest.raises(DataError):
            TimeSeriesSample("a", "s", [1.0, np.nan])

    def test_values_are_read_only(self):
        s = TimeSeriesSample("a", "s", [1.0, 2.0])
        with pytest.raises(ValueError):
            s.values[0] = 5.0


class TestDataset:
    def test_from_samples(self):
        samples = [
            TimeSeriesSample("b", "s1", [1, 2, 3]),
            TimeSeriesSample("a", "s1", [4, 5, 6]),
            TimeSeriesSample("a", "s2", [0, 1]),
            TimeSeriesSample("b", "s2", [1, 0]),
        ]
        ds = Dataset.from_samples(samples)
        assert ds.entity_order == ("b", "a")
        assert ds.kinds == ("s1", "s2")
        assert ds.series_length("s1") == 3 and ds.series_length("s2") == 2
        assert ds.sample("a", "s1").values.tolist() == [4, 5, 6]
        assert len(list(ds.samples())) == 4

    def test_ragged_kind(self):
        with pytest.raises(DataError, match="ragged"):
            Dataset.from_samples([TimeSeriesSample("a", "s", [1, 2]), TimeSeriesSample("b", "s", [1])])

    def test_duplicate_pair(self):
        with pytest.raises(DataError, match="duplicate"):
            Dataset.from_samples([TimeSeriesSample("a", "s", [1]), TimeSeriesSample("a", "s", [2])])

    def test_missing_kind_for_entity(self):
        with pytest.raises(DataError, match="missing"):
            Dataset.from_samples(
                [TimeSeriesSample("a", "s", [1]), TimeSeriesSample("b", "s", [1]), TimeSeriesSample("a", "t", [1])]
            )

    @pytest.mark.parametrize("kind", ["a__b", "", "meta"])
    def test_bad_kind_names(self, kind):
        with pytest.raises(DataError):
            Dataset(("x",), {kind: np.ones((1, 3))})

    def test_reorder(self):
        ds = Dataset(("a", "b", "c"), {"s": np.arange(6.0).reshape(3, 2)}, {"w": np.array([1.0, 2.0, 3.0])})
        moved = ds.reorder(["c", "a", "b"])
        assert moved.series["s"].tolist() == [[4, 5], [0, 1], [2, 3]]
        assert moved.meta["w"].tolist() == [3, 1, 2]
        with pytest.raises(DataError):
            ds.reorder(["a", "b"])


class TestTargetVector:
    def test_constant_rejected(self):
        with pytest.raises(ConstantTargetError):
            TargetVector([1.0, 1.0, 1.0])

    def test_classes(self):
        assert TargetVector([0, 1]).codomain_class is CodomainClass.BINARY
        assert TargetVector([0.2, 0.7, 1.1]).codomain_class is CodomainClass.CONTINUOUS


class TestFeatureId:
    @pytest.mark.parametrize(
        "fid, name",
        [
            (FeatureId("s1", "mean"), "s1__mean"),
            (FeatureId("s1", "quantile", (("q", 0.3),)), "s1__quantile__q-0.3"),
            (FeatureId("s1", "arima_model_coefficients", (("i", 2), ("k", 10))), "s1__arima_model_coefficients__i-2__k-10"),
            (FeatureId.meta("alloy"), "meta__alloy"),
            (FeatureId("", "pc-3"), "pc-3"),
        ],
    )
    def test_names_round_trip(self, fid, name):
        assert fid.name == name
        assert FeatureId.parse(name) == fid

    def test_negative_and_string_params(self):
        fid = FeatureId("s", "x", (("a", -0.5), ("b", "half")))
        assert FeatureId.parse(fid.name) == fid


class TestFeatureMatrix:
    ids = [FeatureId("s", "a"), FeatureId("s", "b")]

    def test_from_array_and_select(self):
        fm = FeatureMatrix.from_array(["e1", "e2", "e3"], self.ids, np.arange(6.0).reshape(3, 2), [False, True])
        assert fm.n_entities == 3 and fm.n_features == 2
        assert fm.column("s__b").flagged
        assert fm.select([self.ids[1]]).to_array().tolist() == [[1], [3], [5]]

    def test_length_mismatch(self):
        from freshx.model import FeatureColumn

        with pytest.raises(LengthMismatchError):
            FeatureMatrix(("a", "b"), (FeatureColumn(self.ids[0], [1.0]),))

    def test_duplicate_ids(self):
        with pytest.raises(DataError):
            FeatureMatrix.from_array(["e"], [self.ids[0], self.ids[0]], [[1.0, 2.0]])


class TestSelectionConfig:
    def test_defaults(self):
        cfg = SelectionConfig()
        assert cfg.q == 0.10 and cfg.variance_fraction == 0.95 and cfg.worker_count == 1

    @pytest.mark.parametrize("kwargs", [{"q": 0}, {"q": 1.5}, {"variance_fraction": 0}, {"worker_count": 0}])
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            SelectionConfig(**kwargs)

    def test_string_enums(self):
        cfg = SelectionConfig(pca_placement="after", by_mode="paper")
        assert cfg.pca_placement.value == "after" and cfg.by_mode.value == "paper"
