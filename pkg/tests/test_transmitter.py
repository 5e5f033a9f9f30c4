import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from glvsim import MOLECULES
from glvsim.transmitter import (EmissionConfig, build_emission_signal, carbon_budget_amplitudes, parse_bits,
                                random_bits)

BASE = {"HAL": 2.76e-11, "HOL": 1.52e-11, "HAC": 1.45e-11}
CARBONS = {"HAL": 6, "HOL": 6, "HAC": 8}

bits_st = st.lists(st.integers(0, 1), min_size=1, max_size=40)


def test_single_bit_gives_twenty_samples_of_hal_amplitude():
    sig = build_emission_signal(EmissionConfig((1,), {"HAL": 2.76e-11}))
    assert len(sig) == 20
    assert np.all(sig.samples["HAL"] == 2.76e-11)
    assert np.all(sig.samples["HOL"] == 0.0)


def test_zero_bits_are_silent():
    sig = build_emission_signal(EmissionConfig((1, 0, 1), BASE))
    q = sig.samples["HOL"]
    assert np.all(q[20:40] == 0) and np.all(q[:20] > 0) and np.all(q[40:] > 0)


@pytest.mark.parametrize("kw", [
    dict(bit_sequence=()),
    dict(bit_sequence=(2,)),
    dict(symbol_period_s=0.0),
    dict(symbol_period_s=0.25),             # 2.5 samples per symbol
    dict(amplitudes={"HAL": -1.0}),
])
def test_invalid_emission_config(kw):
    args = dict(bit_sequence=(1,), amplitudes=BASE)
    args.update(kw)
    with pytest.raises(ValueError):
        EmissionConfig(**args)


def test_carbon_budget_and_single_molecule_amplitudes():
    budget, sc = carbon_budget_amplitudes(BASE, CARBONS)
    assert budget == pytest.approx(3.728e-10, rel=1e-12)
    assert sc["HOL"]["HOL"] == pytest.approx(6.21e-11, rel=1e-3)
    assert sc["HAL"]["HAL"] == pytest.approx(6.21e-11, rel=1e-3)
    assert sc["HAC"]["HAC"] == pytest.approx(4.66e-11, rel=1e-3)
    for m in MOLECULES:
        assert sc[m][m] * CARBONS[m] == pytest.approx(budget, rel=1e-14)
        assert all(sc[m][o] == 0.0 for o in MOLECULES if o != m)


def test_parse_bits():
    assert parse_bits("10 11_0") == (1, 0, 1, 1, 0)
    for bad in ("", "102", "abc"):
        with pytest.raises(ValueError):
            parse_bits(bad)


def test_random_bits_are_seeded_and_balanced():
    a = random_bits(5, 10_000)
    assert a == random_bits(5, 10_000)
    assert a != random_bits(6, 10_000)
    assert abs(np.mean(a) - 0.5) < 0.02
    assert set(random_bits(1, 100, p_one=1.0)) == {1}
    with pytest.raises(ValueError):
        random_bits(1, 0)


@given(bits_st, st.sampled_from([0.5, 1.0, 2.0, 3.0]))
def test_emitted_mass_bookkeeping(bits, period):
    cfg = EmissionConfig(tuple(bits), BASE, symbol_period_s=period)
    sig = build_emission_signal(cfg)
    assert len(sig) == len(bits) * cfg.samples_per_symbol
    for m in MOLECULES:
        q = sig.samples[m]
        assert np.all(q >= 0)
        assert np.sum(q) * sig.dt == pytest.approx(sum(bits) * BASE[m] * period, rel=1e-12, abs=0.0)


@given(bits_st, st.integers(1, 10))
def test_appending_zero_bits_only_extends(bits, extra):
    short = build_emission_signal(EmissionConfig(tuple(bits), BASE))
    long = build_emission_signal(EmissionConfig(tuple(bits) + (0,) * extra, BASE))
    for m in MOLECULES:
        n = len(short)
        assert np.array_equal(long.samples[m][:n], short.samples[m])
        assert np.all(long.samples[m][n:] == 0)


@given(st.dictionaries(st.sampled_from(MOLECULES), st.floats(1e-13, 1e-9), min_size=3, max_size=3),
       st.dictionaries(st.sampled_from(MOLECULES), st.integers(1, 20), min_size=3, max_size=3))
def test_carbon_budget_is_preserved(base, carbons):
    budget, sc = carbon_budget_amplitudes(base, carbons)
    for m in MOLECULES:
        assert sc[m][m] * carbons[m] == pytest.approx(budget, rel=1e-12)
