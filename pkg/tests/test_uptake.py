import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from glvsim import MOLECULES
from glvsim.parameters import LeafParams, default_molecules
from glvsim.uptake import (MissingParameterError, UptakeParams, absorption_rate, absorption_rate_from_air,
                           equilibrium_cytosol, to_cytosolic_rate)
from glvsim.units import Environment

MOLS = default_molecules()
PARAMS = {m: UptakeParams(MOLS[m]) for m in MOLECULES}

# HAL at 1 ppb air and empty cytosol, r_liq = 1e4 placeholder, frozen from the
# straight-line evaluator in tests/oracles.py
HAL_ONE_PPB = 5.835730731560016e-07

conc = st.floats(min_value=0.0, max_value=1e3, allow_nan=False)
mols = st.sampled_from(MOLECULES)


def test_homogeneous_case_is_zero():
    for p in PARAMS.values():
        assert absorption_rate(0.0, 0.0, p) == 0.0


def test_efflux_when_air_is_clean():
    for p in PARAMS.values():
        assert absorption_rate(0.0, 1e-3, p) < 0


def test_hal_reference_value():
    assert absorption_rate(1.0, 0.0, PARAMS["HAL"]) == pytest.approx(HAL_ONE_PPB, rel=1e-12)
    assert oracles.absorption("HAL", 1.0, 0.0) == pytest.approx(HAL_ONE_PPB, rel=1e-12)


@pytest.mark.parametrize("m", MOLECULES)
def test_matches_oracle_for_every_molecule(m):
    for c_a, c_ct in [(1.0, 0.0), (0.0, 2e-3), (37.0, 1e-4)]:
        assert absorption_rate(c_a, c_ct, PARAMS[m]) == pytest.approx(oracles.absorption(m, c_a, c_ct), rel=1e-12)


def test_air_input_in_si_units():
    p = PARAMS["HOL"]
    assert absorption_rate_from_air(1e-9, 0.0, p) == pytest.approx(absorption_rate(oracles.ppb(1e-9), 0.0, p))


def test_cytosolic_rate_conversion():
    assert to_cytosolic_rate(0.0, PARAMS["HAL"]) == 0.0
    assert to_cytosolic_rate(1.0, PARAMS["HAL"]) == pytest.approx(6.111111e6, rel=1e-6)
    assert to_cytosolic_rate(1.0, LeafParams()) == pytest.approx(0.0055 / 0.0009 * 1e6, rel=1e-14)
    assert to_cytosolic_rate(-2.0, PARAMS["HAL"]) == pytest.approx(-2 * 6.111111e6, rel=1e-6)
    with pytest.raises(ValueError):
        to_cytosolic_rate(math.inf, PARAMS["HAL"])


def test_missing_liquid_resistance_names_the_molecule():
    with pytest.raises(MissingParameterError, match="HOL"):
        UptakeParams(default_molecules(r_liq=None)["HOL"])


def test_rejects_negative_concentration():
    with pytest.raises(ValueError):
        absorption_rate(-1.0, 0.0, PARAMS["HAL"])


def test_linear_rates_reproduce_the_balance():
    # the receiver uses alpha * C_air - beta * c; check it against the balance itself
    for m, p in PARAMS.items():
        alpha, beta = p.linear_rates()
        c_air, c_um = 3e-9, 0.4
        direct = to_cytosolic_rate(absorption_rate_from_air(c_air, c_um * 1e-3, p), p)
        assert alpha * c_air - beta * c_um == pytest.approx(direct, rel=1e-12)


@given(mols, conc, conc, st.floats(0.0, 100.0))
def test_absorption_is_affine(m, c_a, c_ct, a):
    p = PARAMS[m]
    f = absorption_rate
    assert f(a * c_a, 0.0, p) == pytest.approx(a * f(c_a, 0.0, p), rel=1e-9, abs=1e-300)
    assert f(c_a, c_ct, p) == pytest.approx(f(c_a, 0.0, p) + f(0.0, c_ct, p), rel=1e-9, abs=1e-15)


@given(mols, conc, conc)
def test_absorption_is_monotone(m, c_a, c_ct):
    p = PARAMS[m]
    h = 1e-3
    assert absorption_rate(c_a + h, c_ct, p) > absorption_rate(c_a, c_ct, p)
    assert absorption_rate(c_a, c_ct + h, p) < absorption_rate(c_a, c_ct, p)


@given(mols, st.floats(1e-6, 1e3), st.floats(250.0, 320.0), st.floats(0.5, 1.5))
def test_equilibrium_cytosol_is_proportional_to_air(m, c_a, T, P):
    env = Environment(T, P)
    p = UptakeParams(MOLS[m], env=env)
    c_star = equilibrium_cytosol(c_a, p)
    assert absorption_rate(c_a, c_star, p) == pytest.approx(0.0, abs=1e-12 * absorption_rate(c_a, 0.0, p))
    rbw, rsw, E, H, Da = oracles.MOLECULE_TABLE[m]
    Dw = oracles.LEAF["d_water"]
    r_g = rbw * (Dw / Da) ** (2 / 3) + rsw * Dw / Da
    slope = (1 / r_g - E / 2) / (1 / r_g + E / 2) * H * P * 1.01325 / 1e3
    assert c_star == pytest.approx(slope * c_a, rel=1e-12)
