"""Unit conversions and physical constants shared across the pipeline.

Conventions: channel quantities are SI (mol, m, s); cytosolic concentrations
are micromolar and rates micromolar per second. Conversions only happen at
module boundaries, through the functions below.
"""

from __future__ import annotations

from dataclasses import dataclass

# m^3 atm / (mol K), i.e. 8.314462618 / 101325
GAS_CONSTANT = 8.205736608e-5
AVOGADRO = 6.02e23
ATM_TO_BAR = 1.01325
PROTEIN_MOLECULES_PER_FL = 3e6
HEXVIC_MOLAR_MASS = 394.4


@dataclass(frozen=True)
class Environment:
    temperature_kelvin: float = 298.15
    pressure_atm: float = 1.0

    def __post_init__(self):
        if not self.temperature_kelvin > 0:
            raise ValueError(f"temperature_kelvin must be > 0, got {self.temperature_kelvin}")
        if not self.pressure_atm > 0:
            raise ValueError(f"pressure_atm must be > 0, got {self.pressure_atm}")

    @property
    def pressure_bar(self) -> float:
        return self.pressure_atm * ATM_TO_BAR

    @property
    def molar_volume(self) -> float:
        """Ideal-gas molar volume in m^3/mol."""
        return GAS_CONSTANT * self.temperature_kelvin / self.pressure_atm

    @property
    def scaling_constant(self) -> float:
        """The absorption model's F = 273.15 / (T_k * 22.4e-3), used verbatim."""
        return 273.15 / (self.temperature_kelvin * 22.4e-3)


def mol_per_m3_to_ppb(c, env: Environment = Environment()):
    """Convert an air concentration in mol/m^3 to a mole-fraction in ppb.

    Accepts scalars or numpy arrays.
    """
    if _any_negative(c):
        raise ValueError("air concentration must be non-negative")
    return c * (env.molar_volume * 1e9)


def enzyme_total_concentration(abundance_ppm: float, k_e: float = PROTEIN_MOLECULES_PER_FL) -> float:
    """Total enzyme concentration in micromolar from a PaxDb-style abundance.

    ``k_e * A_b * 1e15 / N_A`` with ``A_b`` as the raw ppm number: the ppm
    fraction (1e-6) and the mol -> umol factor (1e6) cancel.
    """
    if abundance_ppm < 0:
        raise ValueError(f"abundance must be non-negative, got {abundance_ppm}")
    if not k_e > 0:
        raise ValueError(f"k_e must be > 0, got {k_e}")
    return k_e * abundance_ppm * 1e15 / AVOGADRO


def alarm_threshold_to_micromolar(threshold: float, mw: float = HEXVIC_MOLAR_MASS,
                                  v_intra: float = 0.0009) -> float:
    """Leaf-content threshold (ug per g fresh weight) to cytosolic micromolar.

    No extra 1e-3 factor: ug/g divided by (g/mol * L/g) is already umol/L.
    """
    if threshold < 0:
        raise ValueError("threshold must be non-negative")
    if not mw > 0 or not v_intra > 0:
        raise ValueError("molar mass and v_intra must be > 0")
    return threshold / (mw * v_intra)


def _any_negative(c) -> bool:
    try:
        return bool((c < 0).any())
    except AttributeError:
        return c < 0
