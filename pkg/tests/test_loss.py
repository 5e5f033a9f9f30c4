import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from glvsim import MOLECULES
from glvsim.channel import ConcentrationTrace
from glvsim.loss import LossModel, LossParameterError, apply_loss, beta_params_from_mean_cv
from glvsim.rng import stream


def trace(n=1000, level=1e-8):
    return ConcentrationTrace({m: np.full(n, level) for m in MOLECULES}, 10.0, (0.15, 0.0, 1.0))


def test_beta_shapes_for_default_loss():
    a, b = beta_params_from_mean_cv(0.85, 0.15)
    assert (a, b) == pytest.approx((5.8167, 1.0265), abs=1e-4)
    assert (a, b) == pytest.approx(oracles.beta_shapes(0.85, 0.15), rel=1e-12)


def test_beta_draws_match_target_moments():
    x = LossModel(0.85, 0.15).sample(stream(0, "loss:HAL"), 1_000_000)
    assert x.mean() == pytest.approx(0.85, rel=5e-3)
    assert x.std() / x.mean() == pytest.approx(0.15, rel=5e-3)


def test_long_run_loss_ratio():
    tr = trace(100_000)
    out = apply_loss(tr, {m: LossModel() for m in MOLECULES}, master_seed=1)
    for m in MOLECULES:
        assert np.mean(out.values[m] / tr.values[m]) == pytest.approx(0.85, rel=5e-3)


@pytest.mark.parametrize("mean,cv", [(0.5, 2.0), (0.0, 0.1), (1.2, 0.1), (0.85, -0.1), (0.9, 0.34)])
def test_infeasible_parameters(mean, cv):
    with pytest.raises(LossParameterError):
        beta_params_from_mean_cv(mean, cv)


def test_zero_cv_is_a_constant_factor():
    out = apply_loss(trace(10), {m: LossModel(0.7, 0.0) for m in MOLECULES}, 3)
    for m in MOLECULES:
        assert np.allclose(out.values[m], 0.7e-8, rtol=1e-15)


def test_disabled_or_missing_model_passes_through():
    tr = trace(10)
    out = apply_loss(tr, {"HAL": LossModel(enabled=False)}, 3)
    for m in MOLECULES:
        assert np.array_equal(out.values[m], tr.values[m])


def test_toggling_one_molecule_leaves_others_unchanged():
    tr = trace(500)
    full = apply_loss(tr, {m: LossModel() for m in MOLECULES}, 42, receiver_index=3)
    partial = apply_loss(tr, {"HAL": LossModel(enabled=False), "HOL": LossModel(), "HAC": LossModel()}, 42, 3)
    assert np.array_equal(full.values["HOL"], partial.values["HOL"])
    assert np.array_equal(full.values["HAC"], partial.values["HAC"])
    other_rx = apply_loss(tr, {m: LossModel() for m in MOLECULES}, 42, receiver_index=4)
    assert not np.array_equal(full.values["HOL"], other_rx.values["HOL"])


def test_rejects_negative_trace():
    tr = ConcentrationTrace({m: np.array([-1.0]) for m in MOLECULES}, 10.0, (0, 0, 0))
    with pytest.raises(ValueError):
        apply_loss(tr, {}, 0)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 0.99), st.floats(0.01, 0.7), st.integers(0, 2**31))
def test_factors_stay_in_unit_interval(mean, frac, seed):
    cv = frac * np.sqrt((1 - mean) / mean)
    tr = ConcentrationTrace({m: np.linspace(0, 1e-6, 200) for m in MOLECULES}, 10.0, (0, 0, 0))
    out = apply_loss(tr, {m: LossModel(mean, cv) for m in MOLECULES}, seed)
    for m in MOLECULES:
        assert np.all(out.values[m] <= tr.values[m])
        assert np.all(out.values[m] >= 0)
        pos = tr.values[m] > 0
        ratio = out.values[m][pos] / tr.values[m][pos]
        a, b = beta_params_from_mean_cv(mean, cv)
        if min(a, b) >= 1:
            assert np.all((ratio > 0) & (ratio < 1))
        else:
            # a shape below 1 piles mass at an end point, where draws can round onto it
            assert np.all((ratio >= 0) & (ratio <= 1))
