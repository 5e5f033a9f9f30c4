"""Stomatal leaf uptake of a volatile and its conversion to a cytosolic rate.

The absorption balance is evaluated literally, with its mixed units: the air
concentration enters in ppb and the cytosolic concentration in mol/m^3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from glvsim.parameters import LeafParams, MoleculeParams
from glvsim.units import Environment, mol_per_m3_to_ppb


class MissingParameterError(ValueError):
    pass


@dataclass(frozen=True)
class UptakeParams:
    molecule: MoleculeParams
    leaf: LeafParams = LeafParams()
    env: Environment = Environment()

    def __post_init__(self):
        if self.molecule.r_liq is None:
            raise MissingParameterError(
                f"r_liq is not set for {self.molecule.name}: the liquid-phase resistance has no "
                "published value and must be supplied per molecule")
        for key, val in self.coefficients().items():
            if not math.isfinite(val):
                raise ValueError(f"{self.molecule.name}: non-finite uptake coefficient {key}")
        if not self.coefficients()["denominator"] > 0:
            raise ValueError(f"{self.molecule.name}: absorption denominator must be > 0")

    @property
    def r_ias(self) -> float:
        lf = self.leaf
        return lf.dl_ias * lf.tortuosity / (self.molecule.diffusivity * lf.f_ias)

    @property
    def r_gas(self) -> float:
        ratio = self.leaf.d_water / self.molecule.diffusivity
        r_b = self.molecule.r_b_w * ratio ** (2.0 / 3.0)
        r_s = self.molecule.r_s_w * ratio
        return r_s + r_b

    def coefficients(self) -> dict:
        """Terms of the linear absorption balance.

        A = (gain * C_a[ppb] - back * C_ct[mol/m^3]) / denominator
        """
        g = 1.0 / self.r_gas
        half_e = self.molecule.transpiration / 2.0
        hp = self.molecule.henry * self.env.pressure_bar
        return {
            "gain": (g - half_e) / (g + half_e),
            "back": 1e3 / hp,
            "denominator": (self.r_ias / self.env.scaling_constant + 1.0 / (g + half_e)
                            + 1e3 * self.molecule.r_liq / hp),
        }

    def linear_rates(self) -> tuple[float, float]:
        """(alpha, beta) with cytosolic uptake rate [uM/s] = alpha * C_air[mol/m^3] - beta * c[uM]."""
        k = self.coefficients()
        per_area = self.leaf.la_fw / self.leaf.v_intra * 1e6
        alpha = k["gain"] * self.env.molar_volume * 1e9 / k["denominator"] * per_area
        beta = k["back"] * 1e-3 / k["denominator"] * per_area
        return alpha, beta


def absorption_rate(c_air_ppb: float, c_cytosol: float, p: UptakeParams) -> float:
    """Absorption rate A in mol m^-2 s^-1; negative values are efflux."""
    if c_air_ppb < 0 or c_cytosol < 0:
        raise ValueError("concentrations must be non-negative")
    k = p.coefficients()
    return (k["gain"] * c_air_ppb - k["back"] * c_cytosol) / k["denominator"]


def absorption_rate_from_air(c_air_mol_m3: float, c_cytosol: float, p: UptakeParams) -> float:
    return absorption_rate(mol_per_m3_to_ppb(c_air_mol_m3, p.env), c_cytosol, p)


def to_cytosolic_rate(a: float, p: UptakeParams | LeafParams) -> float:
    """mol m^-2 s^-1 of leaf area -> uM/s of leaf water."""
    if not math.isfinite(a):
        raise ValueError("absorption rate must be finite")
    leaf = p.leaf if isinstance(p, UptakeParams) else p
    return a * leaf.la_fw / leaf.v_intra * 1e6


def equilibrium_cytosol(c_air_ppb: float, p: UptakeParams) -> float:
    """Cytosolic concentration (mol/m^3) at which net absorption vanishes."""
    k = p.coefficients()
    return k["gain"] * c_air_ppb / k["back"]
