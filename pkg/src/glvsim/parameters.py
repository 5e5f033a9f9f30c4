"""Biological, chemical and simulation parameter sets with their defaults.

Defaults reproduce the published parameter tables. The one exception is
``r_liq`` (composite liquid-phase resistance), which was never tabulated:
the shipped value is a placeholder and is tagged as such everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from glvsim import MOLECULES
from glvsim.units import PROTEIN_MOLECULES_PER_FL, enzyme_total_concentration

# m^2 s / mol; NOT a published value. Chosen so that the leaf-air exchange
# rate (about 6110 / r_liq per second for every molecule) is fast compared
# with the enzymes but slow enough for RK4 at dt = 0.1 s.
PLACEHOLDER_R_LIQ = 1.0e4


@dataclass(frozen=True)
class MoleculeParams:
    name: str
    molar_mass: float          # g/mol
    diffusivity: float         # m^2/s in air
    henry: float               # mol L^-1 atm^-1
    r_b_w: float               # m^2 s/mol, boundary layer, water vapour
    r_s_w: float               # m^2 s/mol, stomatal, water vapour
    transpiration: float       # mol m^-2 s^-1
    log_kow: float
    carbons: int
    emission_amplitude: float  # mol/s
    r_liq: float | None = None  # m^2 s/mol

    def __post_init__(self):
        for key in ("molar_mass", "diffusivity", "henry", "r_b_w", "r_s_w"):
            if not getattr(self, key) > 0:
                raise ValueError(f"{self.name}.{key} must be > 0")
        if self.transpiration < 0 or self.emission_amplitude < 0:
            raise ValueError(f"{self.name}: transpiration and emission amplitude must be >= 0")
        if self.r_liq is not None and not self.r_liq > 0:
            raise ValueError(f"{self.name}.r_liq must be > 0")


@dataclass(frozen=True)
class LeafParams:
    dl_ias: float = 6.38e-5      # m
    tortuosity: float = 1.57
    f_ias: float = 0.328
    la_fw: float = 0.0055        # m^2 / g FW
    v_intra: float = 0.0009      # L / g FW
    d_water: float = 2.3289e-5   # m^2/s
    molar_mass_water: float = 18.0

    def __post_init__(self):
        if not 0 < self.f_ias < 1:
            raise ValueError("f_ias must lie in (0, 1)")
        for key in ("dl_ias", "tortuosity", "la_fw", "v_intra", "d_water"):
            if not getattr(self, key) > 0:
                raise ValueError(f"leaf.{key} must be > 0")


@dataclass(frozen=True)
class EnzymeParams:
    name: str
    k_cat: float          # 1/s
    k_m: float            # uM
    abundance_ppm: float
    k_e: float = PROTEIN_MOLECULES_PER_FL

    def __post_init__(self):
        if not (self.k_cat > 0 and self.k_m > 0):
            raise ValueError(f"{self.name}: k_cat and k_m must be > 0")
        if self.abundance_ppm < 0:
            raise ValueError(f"{self.name}: abundance must be >= 0")

    @property
    def e_total(self) -> float:
        """Total enzyme concentration, uM."""
        return enzyme_total_concentration(self.abundance_ppm, self.k_e)

    @property
    def v_max(self) -> float:
        return self.k_cat * self.e_total

    def scaled(self, factor: float) -> "EnzymeParams":
        return replace(self, abundance_ppm=self.abundance_ppm * factor)


def default_molecules(r_liq: float | None = PLACEHOLDER_R_LIQ) -> dict[str, MoleculeParams]:
    return {
        "HAL": MoleculeParams("HAL", 98.143, 8.0718e-6, 6.0, 2.58, 21.8, 6e-4, 1.542, 6, 2.76e-11, r_liq),
        "HOL": MoleculeParams("HOL", 100.159, 7.9291e-6, 113.0, 3.23, 26.5, 5.4e-4, 1.335, 6, 1.52e-11, r_liq),
        "HAC": MoleculeParams("HAC", 142.2, 6.7698e-6, 3.1, 2.47, 16.1, 4.5e-4, 1.906, 8, 1.45e-11, r_liq),
    }


# Enzyme roles: CHR HAL->HOL, CXE HAC->HOL, 85A HOL->HEXGlc, 91R HEXGlc->HEXVic.
ENZYME_NAMES = ("CHR", "CXE", "85A", "91R")


def default_enzymes() -> dict[str, EnzymeParams]:
    return {
        "CHR": EnzymeParams("CHR", 13.27, 32.7, 330.0),
        "CXE": EnzymeParams("CXE", 3.78, 5940.0, 122.0),
        "85A": EnzymeParams("85A", 0.35, 18.92, 13.2),
        "91R": EnzymeParams("91R", 0.33, 5.9, 0.09),
    }


@dataclass(frozen=True)
class WindRegime:
    mean: tuple[float, float]
    std: tuple[float, float]


WIND_REGIMES = {
    "directed": WindRegime((0.2, 0.0), (0.01, 0.01)),
    "nondirected_strong": WindRegime((0.0, 0.0), (0.5, 0.5)),
    "nondirected_weak": WindRegime((0.0, 0.0), (0.01, 0.01)),
}


@dataclass(frozen=True)
class SimulationDefaults:
    sample_rate_hz: float = 10.0
    symbol_period_s: float = 2.0
    alarm_threshold_um: float = 1.4
    loss_mean: float = 0.85
    loss_cv: float = 0.15
    tx_position: tuple[float, float, float] = (0.0, 0.0, 1.0)
    rx_position: tuple[float, float, float] = (0.15, 0.0, 1.0)
    rx_position_glv: tuple[float, float, float] = (0.20, 0.0, 1.0)
    carbons: dict = field(default_factory=lambda: {"HAL": 6, "HOL": 6, "HAC": 8})


def amplitudes(molecules: dict[str, MoleculeParams]) -> dict[str, float]:
    return {m: molecules[m].emission_amplitude for m in MOLECULES}
