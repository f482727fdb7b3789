import numpy as np
import pytest

from discbench.data import FeatureDataset
from discbench.errors import CapacityError
from discbench.extensions import (
    DsbConfig,
    RdaConfig,
    _run_dsb,
    default_residual_components,
    fit_dsb,
    fit_rda,
    residual_rows,
)
from discbench.reducers import fit_lda
from helpers import make_random_dataset, principal_angles


def overlapping_dataset(seed=0, n_per_class=40, dim=4):
    rng = np.random.default_rng(seed)
    centers = np.zeros((3, dim))
    centers[1, 0] = 1.2
    centers[2, 1] = 1.2
    labels = np.repeat([0, 1, 2], n_per_class)
    feats = centers[labels] + rng.normal(size=(labels.size, dim))
    return FeatureDataset(features=feats, labels=labels, num_classes=3)


# ---------------------------------------------------------------------- rda


def test_rda_config_validation():
    with pytest.raises(ValueError):
        RdaConfig(residual_components=-1)
    with pytest.raises(ValueError):
        RdaConfig(reconstruction="pinv")
    assert RdaConfig().reconstruction == "least_squares"


def test_default_residual_components_rule():
    assert default_residual_components(8) == 20
    assert default_residual_components(1024) == 20
    assert default_residual_components(1025) == 30


def test_rda_zero_components_is_lda_renamed():
    data = overlapping_dataset(seed=1)
    rda = fit_rda(data, RdaConfig(residual_components=0))
    lda = fit_lda(data)
    assert rda.method_name == "rda"
    np.testing.assert_array_equal(rda.weights, lda.weights)
    np.testing.assert_array_equal(rda.center, lda.center)
    np.testing.assert_array_equal(rda.discriminant_values, lda.discriminant_values)
    assert rda.out_dim == lda.out_dim


def test_rda_default_rule_small_dim():
    rng = np.random.default_rng(2)
    data = make_random_dataset(rng, 3, 20, 22, 64, spread=2.0)
    proj = fit_rda(data)
    assert proj.out_dim == 2 + 20


def test_rda_default_rule_large_dim():
    rng = np.random.default_rng(3)
    data = make_random_dataset(rng, 2, 32, 32, 1025, spread=2.0)
    proj = fit_rda(data)
    assert proj.out_dim == 1 + 30


def test_rda_first_block_is_lda_bitwise():
    data = overlapping_dataset(seed=4)
    lda = fit_lda(data)
    rda = fit_rda(data, RdaConfig(residual_components=2))
    np.testing.assert_array_equal(rda.weights[:, : lda.out_dim], lda.weights)
    np.testing.assert_array_equal(
        rda.discriminant_values[: lda.out_dim], lda.discriminant_values
    )
    np.testing.assert_array_equal(rda.center, lda.center)


def test_rda_residual_block_orthogonal_to_lda_span():
    data = overlapping_dataset(seed=5, dim=8)
    lda = fit_lda(data)
    residuals = residual_rows(data.features, lda, "least_squares")
    assert np.abs(residuals @ lda.weights).max() < 1e-8

    rda = fit_rda(data, RdaConfig(residual_components=3))
    res_block = rda.weights[:, lda.out_dim :]
    assert np.abs(res_block.T @ lda.weights).max() < 1e-8


def test_rda_per_block_values_descending():
    data = overlapping_dataset(seed=6, dim=8)
    rda = fit_rda(data, RdaConfig(residual_components=4))
    head = rda.discriminant_values[:2]
    tail = rda.discriminant_values[2:]
    assert np.all(np.diff(head) <= 1e-12)
    assert np.all(np.diff(tail) <= 1e-12)


def test_rda_symmetric_reconstruction_route():
    data = overlapping_dataset(seed=7, dim=6)
    lda = fit_lda(data)
    sym = residual_rows(data.features, lda, "symmetric")
    manual = (data.features - lda.center) - (
        data.features - lda.center
    ) @ lda.weights @ lda.weights.T
    np.testing.assert_allclose(sym, manual, rtol=1e-12, atol=1e-12)
    # lda weights are not orthonormal, so the two routes genuinely differ
    ls = residual_rows(data.features, lda, "least_squares")
    assert np.abs(sym - ls).max() > 1e-6
    proj = fit_rda(data, RdaConfig(residual_components=2, reconstruction="symmetric"))
    assert proj.out_dim == 4


def test_rda_capacity_error():
    rng = np.random.default_rng(8)
    data = make_random_dataset(rng, 3, 8, 10, 6, spread=2.0)
    # max_k = min(D - (C-1), N-1) = 4
    with pytest.raises(CapacityError):
        fit_rda(data, RdaConfig(residual_components=5))
    assert fit_rda(data, RdaConfig(residual_components=4)).out_dim == 6


# ---------------------------------------------------------------------- dsb


def test_dsb_config_validation():
    with pytest.raises(ValueError):
        DsbConfig(rounds=0)
    with pytest.raises(ValueError):
        DsbConfig(weight_growth=1.0)
    assert DsbConfig().rounds == 2
    assert DsbConfig().weight_growth == 2.0


def test_dsb_single_round_is_lda():
    data = overlapping_dataset(seed=9)
    dsb = fit_dsb(data, DsbConfig(rounds=1))
    lda = fit_lda(data)
    assert dsb.method_name == "dsb"
    np.testing.assert_array_equal(dsb.weights, lda.weights)
    np.testing.assert_array_equal(dsb.center, lda.center)


def test_dsb_hand_traced_reweighting():
    # 1-D data: the projection is monotone, so nearest projected centroid is
    # nearest class mean. means: 11/3 and 5, midpoint 4.33; samples 10 and 4
    # land on the wrong side -> m = 2 mistakes out of N = 6
    feats = np.array([[0.0], [1.0], [10.0], [4.0], [5.0], [6.0]])
    labels = np.array([0, 0, 0, 1, 1, 1])
    data = FeatureDataset(features=feats, labels=labels, num_classes=2)
    _, history = _run_dsb(data, DsbConfig(rounds=2, weight_growth=2.0))
    assert len(history) == 2
    np.testing.assert_array_equal(history[0], np.ones(6))
    # wrong samples get 2 N / (N + m), right ones N / (N + m)
    np.testing.assert_allclose(
        history[1], [0.75, 0.75, 1.5, 1.5, 0.75, 0.75], rtol=1e-12
    )


def test_dsb_weights_positive_and_sum_to_n():
    data = overlapping_dataset(seed=10)
    _, history = _run_dsb(data, DsbConfig(rounds=4))
    assert len(history) == 4
    for weights in history:
        assert np.all(weights > 0)
        assert abs(weights.sum() - data.n_samples) < 1e-9


def test_dsb_growth_near_one_matches_lda():
    data = overlapping_dataset(seed=11)
    dsb = fit_dsb(data, DsbConfig(rounds=3, weight_growth=1.0 + 1e-9))
    lda = fit_lda(data)
    angles = principal_angles(dsb.weights, lda.weights)
    assert angles.max() < 1e-6


def test_dsb_all_correct_is_noop():
    rng = np.random.default_rng(12)
    data = make_random_dataset(rng, 3, 15, 18, 4, scale=0.05, spread=10.0)
    projection, history = _run_dsb(data, DsbConfig(rounds=3))
    for weights in history:
        np.testing.assert_array_equal(weights, np.ones(data.n_samples))
    lda = fit_lda(data)
    np.testing.assert_array_equal(projection.weights, lda.weights)


def test_dsb_reweighting_changes_projection():
    data = overlapping_dataset(seed=13)
    _, history = _run_dsb(data, DsbConfig(rounds=2))
    assert not np.array_equal(history[1], history[0])
    dsb = fit_dsb(data, DsbConfig(rounds=2))
    lda = fit_lda(data)
    assert np.abs(dsb.weights - lda.weights).max() > 1e-8
