"""Independent reference computations used by the tests.

These are written straight from the model equations with plain Python and
numpy, without importing the package internals they check.
"""

from __future__ import annotations

import math

import numpy as np

R_ATM = 8.205736608e-5      # m^3 atm / (mol K)
N_A = 6.02e23


def ppb(c_mol_m3: float, T: float = 298.15, P_atm: float = 1.0) -> float:
    return c_mol_m3 * R_ATM * T / P_atm * 1e9


def enzyme_um(abundance_ppm: float, k_e: float = 3e6) -> float:
    # molecules per litre from molecules per fL, ppm -> fraction, mol -> umol
    molecules_per_l = k_e * 1e15 * abundance_ppm * 1e-6
    return molecules_per_l / N_A * 1e6


def beta_shapes(mean: float, cv: float) -> tuple[float, float]:
    var = (mean * cv) ** 2
    common = mean * (1 - mean) / var - 1
    return mean * common, (1 - mean) * common


MOLECULE_TABLE = {
    # r_b_w, r_s_w, E, H, D_air
    "HAL": (2.58, 21.8, 6e-4, 6.0, 8.0718e-6),
    "HOL": (3.23, 26.5, 5.4e-4, 113.0, 7.9291e-6),
    "HAC": (2.47, 16.1, 4.5e-4, 3.1, 6.7698e-6),
}
LEAF = dict(dl_ias=6.38e-5, tau=1.57, f_ias=0.328, d_water=2.3289e-5, la_fw=0.0055, v_intra=0.0009)
ENZYMES = {
    # k_cat, k_m, abundance
    "CHR": (13.27, 32.7, 330.0),
    "CXE": (3.78, 5940.0, 122.0),
    "85A": (0.35, 18.92, 13.2),
    "91R": (0.33, 5.9, 0.09),
}


def absorption(mol: str, c_air_ppb: float, c_ct_mol_m3: float, r_liq: float = 1e4,
               T: float = 298.15, P_atm: float = 1.0) -> float:
    """Absorption balance solved for A, written out term by term."""
    rbw, rsw, E, H, Da = MOLECULE_TABLE[mol]
    Dw = LEAF["d_water"]
    r_b = rbw * (Dw / Da) ** (2.0 / 3.0)
    r_s = rsw * (Dw / Da)
    r_g = r_b + r_s
    r_ias = LEAF["dl_ias"] * LEAF["tau"] / (Da * LEAF["f_ias"])
    F = 273.15 / (T * 22.4e-3)
    Pa = P_atm * 1.01325
    front = (1 / r_g - E / 2) / (1 / r_g + E / 2)
    numerator = front * c_air_ppb - 1e3 / (H * Pa) * c_ct_mol_m3
    denominator = r_ias / F + 1 / (1 / r_g + E / 2) + 1e3 * r_liq / (H * Pa)
    return numerator / denominator


def cytosolic(a: float) -> float:
    return a * LEAF["la_fw"] / LEAF["v_intra"] * 1e6


def receiver_rhs(y, air, enzyme_scale=None):
    """Five-state derivative; ``air`` is (HAL, HOL, HAC) in mol/m^3."""
    scale = enzyme_scale or {}
    vm, km = {}, {}
    for e, (kcat, k_m, ab) in ENZYMES.items():
        vm[e] = kcat * enzyme_um(ab * scale.get(e, 1.0))
        km[e] = k_m
    c_a, c_t, c_o, c_g, _c_v = y
    a_hal = cytosolic(absorption("HAL", ppb(air[0]), c_a * 1e-3))
    a_hol = cytosolic(absorption("HOL", ppb(air[1]), c_o * 1e-3))
    a_hac = cytosolic(absorption("HAC", ppb(air[2]), c_t * 1e-3))

    def mm(e, c):
        return vm[e] * c / (km[e] + c)

    j_ao, j_to, j_og, j_gv = mm("CHR", c_a), mm("CXE", c_t), mm("85A", c_o), mm("91R", c_g)
    return np.array([a_hal - j_ao, a_hac - j_to, a_hol + j_ao + j_to - j_og, j_og - j_gv, j_gv])


def reference_receiver(air: np.ndarray, fs: float = 10.0, substeps: int = 1) -> np.ndarray:
    """Classical RK4 with the input held over each sample. Returns (5, N + 1)."""
    n = air.shape[1]
    dt = 1.0 / (fs * substeps)
    y = np.zeros(5)
    out = np.zeros((5, n + 1))
    for k in range(n):
        u = air[:, k]
        for _ in range(substeps):
            k1 = receiver_rhs(y, u)
            k2 = receiver_rhs(y + 0.5 * dt * k1, u)
            k3 = receiver_rhs(y + 0.5 * dt * k2, u)
            k4 = receiver_rhs(y + dt * k3, u)
            y = y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        out[:, k + 1] = y
    return out


def brute_channel(q: np.ndarray, velocities: np.ndarray, D: float, rel, fs: float = 10.0,
                  substeps: int = 1, n_obs: int | None = None) -> np.ndarray:
    """Sum of recentred Gaussians, one per emission sub-sample, vectorised over sources."""
    dt = 1.0 / fs
    h = dt / substeps
    n_obs = len(q) if n_obs is None else n_obs
    W = np.vstack([np.zeros(2), np.cumsum(velocities[:, :2] * dt, axis=0)])
    src_t, src_m, src_p = [], [], []
    for k, qk in enumerate(q):
        if qk <= 0:
            continue
        for j in range(substeps):
            src_t.append(k * dt + j * h)
            src_m.append(qk * h)
            src_p.append(W[k] + velocities[k, :2] * j * h)
    src_t, src_m, src_p = np.array(src_t), np.array(src_m), np.array(src_p)
    rel = np.asarray(rel, dtype=float)
    out = np.zeros(n_obs)
    for nn in range(n_obs):
        t = nn * dt
        live = src_t < t - 1e-12
        if not live.any():
            continue
        tau = t - src_t[live]
        centre = W[nn] - src_p[live]
        d2 = ((rel[0] - centre[:, 0]) ** 2 + (rel[1] - centre[:, 1]) ** 2 + rel[2] ** 2)
        out[nn] = np.sum(src_m[live] * (4 * math.pi * D * tau) ** -1.5 * np.exp(-d2 / (4 * D * tau)))
    return out
