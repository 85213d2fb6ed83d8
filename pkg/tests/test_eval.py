import json

import numpy as np
import pytest

from docclass.dataset import SynthSpec, generate
from docclass.errors import (
    InsufficientDataError,
    UndefinedImpactError,
    ValidationError,
)
from docclass.evaluate import (
    DEFAULT_WEIGHTS,
    GridSearchResult,
    SelectionReport,
    compute_impacts,
    format_confusion,
    grid_search,
    impact_factor,
    load_weight_table,
    loo_cross_validate,
    select_features,
    time_features,
    validate_weight_table,
    weighted_misclassification,
)
from docclass.features import FEATURE_NAMES, ClassLabel

# Golden confusion matrices with hand-computed weighted scores.
CONF_A = np.array([
    [78, 5, 11, 2, 4],
    [3, 68, 0, 4, 25],
    [5, 0, 94, 1, 0],
    [0, 3, 3, 88, 6],
    [4, 8, 1, 5, 82],
])
CONF_B = np.array([
    [76, 6, 12, 1, 5],
    [4, 72, 0, 9, 15],
    [7, 0, 92, 0, 1],
    [0, 6, 0, 89, 5],
    [3, 14, 1, 6, 76],
])


def overlap_set(seed=17, n_per=5, spread=0.55):
    """Five 2-d classes separated only along feature 0, with overlap."""
    rng = np.random.default_rng(seed)
    X, y = [], []
    for code in range(1, 6):
        f0 = code + rng.normal(0, spread, n_per)
        f1 = rng.normal(0, 1.0, n_per)
        X.append(np.column_stack([f0, f1]))
        y += [code] * n_per
    return np.vstack(X), np.array(y, dtype=np.intp)


class TestWeightedMisclassification:
    def test_golden_tables(self):
        assert weighted_misclassification(CONF_A, DEFAULT_WEIGHTS) == pytest.approx(
            4.67, abs=1e-9)
        assert weighted_misclassification(CONF_B, DEFAULT_WEIGHTS) == pytest.approx(
            5.64, abs=1e-9)

    def test_single_error_hand_case(self):
        conf = np.diag([10, 10, 10, 10, 10]).astype(float)
        conf[0, 0] = 9
        conf[0, 2] = 1   # one mix page called picture, weight 5
        assert weighted_misclassification(conf, DEFAULT_WEIGHTS) == pytest.approx(0.5)
        assert weighted_misclassification(
            conf, DEFAULT_WEIGHTS, normalization="total") == pytest.approx(0.1)

    def test_perfect_diagonal_is_zero(self):
        assert weighted_misclassification(np.eye(5) * 7, DEFAULT_WEIGHTS) == 0.0

    def test_invariant_to_count_scaling(self):
        base = weighted_misclassification(CONF_A, DEFAULT_WEIGHTS)
        assert weighted_misclassification(CONF_A * 3, DEFAULT_WEIGHTS) == pytest.approx(
            base, rel=1e-12)

    def test_non_negative_and_zero_iff_diagonal(self):
        rng = np.random.default_rng(20)
        for _ in range(50):
            conf = rng.integers(0, 30, (5, 5)).astype(float)
            wm = weighted_misclassification(conf, DEFAULT_WEIGHTS)
            assert wm >= 0.0
            off = conf.copy()
            np.fill_diagonal(off, 0.0)
            assert (wm == 0.0) == (off.sum() == 0.0)

    def test_empty_rows_contribute_zero(self):
        conf = np.zeros((5, 5))
        conf[1, 1] = 4
        assert weighted_misclassification(conf, DEFAULT_WEIGHTS) == 0.0
        assert weighted_misclassification(conf, DEFAULT_WEIGHTS, "total") == 0.0

    def test_bad_normalization_rejected(self):
        with pytest.raises(ValidationError):
            weighted_misclassification(CONF_A, DEFAULT_WEIGHTS, "rows")


class TestWeightTable:
    def test_default_table_valid(self):
        validate_weight_table(DEFAULT_WEIGHTS)

    def test_shape_sign_diagonal_checks(self):
        with pytest.raises(ValidationError):
            validate_weight_table(np.zeros((4, 4)))
        bad = DEFAULT_WEIGHTS.copy()
        bad[0, 1] = -1
        with pytest.raises(ValidationError):
            validate_weight_table(bad)
        bad = DEFAULT_WEIGHTS.copy()
        bad[2, 2] = 1
        with pytest.raises(ValidationError):
            validate_weight_table(bad)

    def test_load_plain_and_wrapped(self, tmp_path):
        p = tmp_path / "w.json"
        p.write_text(json.dumps(DEFAULT_WEIGHTS.tolist()))
        assert np.array_equal(load_weight_table(p), DEFAULT_WEIGHTS)
        p.write_text(json.dumps({"w": DEFAULT_WEIGHTS.tolist()}))
        assert np.array_equal(load_weight_table(p), DEFAULT_WEIGHTS)


class TestLooCrossValidate:
    def test_separable_blobs_perfect_diagonal(self, blob_features):
        X, y = blob_features
        conf = loo_cross_validate(X, y, sigma=3.0, box_c=10.0)
        assert conf.sum() == y.size
        assert np.array_equal(conf.sum(axis=1),
                              [np.sum(y == c) for c in range(1, 6)])
        assert np.array_equal(conf, np.diag(conf.sum(axis=1)))

    def test_tiny_class_rejected(self, blob_features):
        X, y = blob_features
        keep = np.flatnonzero(y == 5)[1:]  # leave one highlight sample
        sel = np.r_[np.flatnonzero(y != 5), keep[:1]]
        with pytest.raises(InsufficientDataError):
            loo_cross_validate(X[sel], y[sel], 3.0, 10.0)

    def test_deterministic(self, blob_features):
        X, y = blob_features
        a = loo_cross_validate(X, y, 1.0, 1.0)
        b = loo_cross_validate(X, y, 1.0, 1.0)
        assert np.array_equal(a, b)


class TestGridSearch:
    def test_singleton_grid(self, blob_features):
        X, y = blob_features
        res = grid_search(X, y, sigma_grid=(3.0,), c_grid=(10.0,))
        assert (res.sigma, res.box_c) == (3.0, 10.0)
        assert len(res.sweep) == 1
        conf = loo_cross_validate(X, y, 3.0, 10.0)
        assert res.wm == weighted_misclassification(conf, DEFAULT_WEIGHTS)

    def test_empty_grid_rejected(self, blob_features):
        X, y = blob_features
        with pytest.raises(ValidationError):
            grid_search(X, y, sigma_grid=(), c_grid=(1.0,))

    def test_minimizer_with_smallest_parameter_tiebreak(self, blob_features):
        X, y = blob_features
        res = grid_search(X, y, sigma_grid=(3.0, 1.0), c_grid=(10.0, 1.0))
        assert len(res.sweep) == 4
        best = min(res.sweep, key=lambda t: (t[2], t[0], t[1]))
        assert (res.sigma, res.box_c, res.wm) == best
        assert res.wm == min(t[2] for t in res.sweep)

    def test_result_confusion_matches_reported_point(self, blob_features):
        X, y = blob_features
        res = grid_search(X, y, sigma_grid=(1.0, 3.0), c_grid=(10.0,))
        conf = loo_cross_validate(X, y, res.sigma, res.box_c)
        assert np.array_equal(res.confusion, conf)
        assert isinstance(res, GridSearchResult)


class TestImpactFactor:
    def test_constant_dummy_column_has_zero_impact(self):
        X, y = overlap_set()
        X3 = np.column_stack([X, np.full(y.size, 2.5)])
        impact = impact_factor(X3, y, feature=2, sigma=1.0, box_c=10.0)
        assert impact == 0.0

    def test_informative_feature_has_positive_impact(self):
        X, y = overlap_set()
        impact = impact_factor(X, y, feature=0, sigma=1.0, box_c=10.0)
        assert impact > 0.0

    def test_zero_baseline_undefined(self, blob_features):
        X, y = blob_features
        with pytest.raises(UndefinedImpactError):
            impact_factor(X, y, feature=0, sigma=3.0, box_c=10.0)

    def test_compute_impacts_matches_individual(self):
        X, y = overlap_set()
        impacts, baseline = compute_impacts(X, y, sigma=1.0, box_c=10.0)
        assert impacts.shape == (2,)
        assert baseline > 0.0
        solo = impact_factor(X, y, 1, 1.0, 10.0, baseline_wm=baseline)
        assert impacts[1] == pytest.approx(solo, rel=1e-12)


class TestTimeFeatures:
    def test_per_feature_timings(self):
        from docclass.raster import rgb_to_yuv

        rasters = [rgb_to_yuv(generate(SynthSpec(label=ClassLabel.MIX, width=256,
                                                 height=256, seed=40 + k))[0])
                   for k in range(3)]
        times = time_features(rasters)
        assert times.shape == (len(FEATURE_NAMES),)
        assert (times > 0).all()
        # block ratios do no histogram or edge work: far cheaper than the
        # edge-based features
        assert max(times[6], times[7]) < min(times[2], times[3], times[4])

    def test_larger_raster_costs_more(self):
        from docclass.raster import rgb_to_yuv

        small = rgb_to_yuv(generate(SynthSpec(label=ClassLabel.TEXT, width=128,
                                              height=128, seed=41))[0])
        big = rgb_to_yuv(generate(SynthSpec(label=ClassLabel.TEXT, width=512,
                                            height=512, seed=41))[0])
        assert time_features([big]).sum() > time_features([small]).sum()

    def test_empty_input_rejected(self):
        with pytest.raises(InsufficientDataError):
            time_features([])


class TestSelectFeatures:
    REPORT = SelectionReport(
        impact=np.array([.2461, .1384, .1102, .019, .102, .034, .4843, .1365]),
        times_ms=np.array([12.01, 12.51, 14.97, 73.92, 36.12, 11.45, 0.67, 0.81]),
        baseline_wm=4.67,
    )

    def test_drops_min_impact_feature(self):
        mask = select_features(self.REPORT)
        assert not mask[3]
        assert mask.sum() == 7

    def test_keep_all_policy(self):
        assert select_features(self.REPORT, "keep-all").all()

    def test_unknown_policy(self):
        with pytest.raises(ValidationError):
            select_features(self.REPORT, "drop-everything")

    def test_tie_goes_to_slowest_then_highest_index(self):
        rep = SelectionReport(
            impact=np.array([0.1, 0.02, 0.02, 0.5, 0.5, 0.5, 0.5, 0.5]),
            times_ms=np.array([1, 9, 2, 1, 1, 1, 1, 1], dtype=float),
            baseline_wm=1.0,
        )
        assert not select_features(rep)[1]   # slower of the tied pair
        rep2 = SelectionReport(
            impact=np.array([0.1, 0.02, 0.02, 0.5, 0.5, 0.5, 0.5, 0.5]),
            times_ms=np.ones(8),
            baseline_wm=1.0,
        )
        assert not select_features(rep2)[2]  # highest index among full ties

    def test_report_json_round_trip(self):
        back = SelectionReport.from_json(self.REPORT.to_json())
        assert np.allclose(back.impact, self.REPORT.impact)
        assert np.allclose(back.times_ms, self.REPORT.times_ms)
        assert back.baseline_wm == self.REPORT.baseline_wm
        assert back.names == FEATURE_NAMES

    def test_format_table_lists_all_features(self):
        table = self.REPORT.format_table()
        for name in FEATURE_NAMES:
            assert name in table


def test_format_confusion_shows_class_names():
    text = format_confusion(CONF_A)
    for label in ClassLabel:
        assert label.name.capitalize() in text
    assert "94" in text
