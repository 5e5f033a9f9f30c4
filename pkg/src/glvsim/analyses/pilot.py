"""Receiver linearity pilots and the enzyme-abundance sensitivity grid.

Pilots skip the channel and the loss stage: air concentrations are
prescribed as a baseline level times an on/off profile, with the chosen
molecules multiplied by a scaling factor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from glvsim import MOLECULES
from glvsim.analyses.common import CampaignResult, parallel_map
from glvsim.receiver import LINEAR_FRACTION_LIMIT, ReceiverParams, integrate_batch

MODES = ("constant", "single_pulse", "periodic")
INPUTS = MOLECULES + ("ALL",)


@dataclass(frozen=True)
class PilotConfig:
    mode: str = "constant"
    inputs: str = "ALL"               # one molecule or ALL
    scaling_factors: tuple = (1.0,)
    duration_s: float = 600.0
    baseline: float = 1e-12           # mol/m^3
    pulse_on_s: float = 10.0
    pulse_off_s: float = 10.0
    sample_rate_hz: float = 10.0
    substeps: int = 1                 # RK4 steps per sample

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown pilot mode {self.mode!r}")
        if self.inputs not in INPUTS:
            raise ValueError(f"unknown pilot input {self.inputs!r}")
        if any(not s > 0 for s in self.scaling_factors):
            raise ValueError("scaling factors must be > 0")
        if not (self.duration_s > 0 and self.baseline > 0 and self.sample_rate_hz > 0):
            raise ValueError("duration, baseline and sample rate must be > 0")
        if not (self.pulse_on_s > 0 and self.pulse_off_s > 0):
            raise ValueError("pulse on/off times must be > 0")
        if self.substeps < 1:
            raise ValueError("substeps must be >= 1")


def input_profile(mode: str, n: int, fs: float, on_s: float = 10.0, off_s: float = 10.0) -> np.ndarray:
    """0/1 gate for the pilot modes, sampled at t = k / fs."""
    t = np.arange(n) / fs
    if mode == "constant":
        return np.ones(n)
    if mode == "single_pulse":
        return (t < on_s).astype(float)
    if mode == "periodic":
        return (np.mod(t, on_s + off_s) < on_s).astype(float)
    raise ValueError(f"unknown pilot mode {mode!r}")


def pilot_air(cfg: PilotConfig, scaling_factor: float) -> np.ndarray:
    """(3, N) air input in mol/m^3."""
    n = int(round(cfg.duration_s * cfg.sample_rate_hz))
    gate = input_profile(cfg.mode, n, cfg.sample_rate_hz, cfg.pulse_on_s, cfg.pulse_off_s)
    air = np.empty((3, n))
    for i, m in enumerate(MOLECULES):
        scale = scaling_factor if cfg.inputs in (m, "ALL") else 1.0
        air[i] = cfg.baseline * scale * gate
    return air


def pilot_fraction(cfg: PilotConfig, scaling_factor: float, params: ReceiverParams) -> float:
    res = integrate_batch(pilot_air(cfg, scaling_factor), params, cfg.sample_rate_hz,
                          substeps=cfg.substeps, store=False)
    return float(res.nonlinear_fraction[0])


def _pilot_cell(job):
    cfg, sf, params = job
    return pilot_fraction(cfg, sf, params)


def run_linearity_pilot(cfgs, params: ReceiverParams | None = None, workers: int = 1) -> CampaignResult:
    """Nonlinear time fraction for every (config, scaling factor) cell."""
    params = params or ReceiverParams()
    if isinstance(cfgs, PilotConfig):
        cfgs = [cfgs]
    jobs = [(cfg, sf, params) for cfg in cfgs for sf in cfg.scaling_factors]
    fractions = parallel_map(_pilot_cell, jobs, workers)
    rows = []
    for (cfg, sf, _), frac in zip(jobs, fractions):
        rows.append((cfg.mode, cfg.inputs, float(sf), float(cfg.duration_s), frac, frac <= LINEAR_FRACTION_LIMIT))
    header = ["mode", "inputs", "scaling_factor", "duration_s", "nonlinear_fraction", "is_linear"]
    return CampaignResult("linearity_pilot", {"linearity_pilot.csv": (header, rows)},
                          {"cells": len(rows), "nonlinear_cells": sum(not r[-1] for r in rows)})


def pilot_table(result: CampaignResult) -> dict:
    """(mode, inputs, duration) -> array of fractions in scaling-factor order."""
    out = {}
    for mode, inputs, _sf, dur, frac, _lin in result.tables["linearity_pilot.csv"][1]:
        out.setdefault((mode, inputs, dur), []).append(frac)
    return {k: np.array(v) for k, v in out.items()}


def classification_flips(linear: np.ndarray) -> tuple[int, int]:
    """Adjacent-cell class changes along axis 0 (85A) and axis 1 (91R)."""
    linear = np.asarray(linear, dtype=bool)
    along_0 = int(np.count_nonzero(linear[1:, :] != linear[:-1, :]))
    along_1 = int(np.count_nonzero(linear[:, 1:] != linear[:, :-1]))
    return along_0, along_1


def _heat_cell(job):
    cfg, sf, params, s85, s91 = job
    return pilot_fraction(cfg, sf, params.with_enzyme_scales({"85A": s85, "91R": s91}))


def run_sensitivity_heatmap(scale_85A, scale_91R, params: ReceiverParams | None = None,
                            cfg: PilotConfig | None = None, scaling_factor: float = 100.0,
                            workers: int = 1) -> CampaignResult:
    """Nonlinear fraction with the 85A and 91R abundances rescaled.

    Rows of the returned matrix follow ``scale_85A`` and columns ``scale_91R``.
    """
    params = params or ReceiverParams()
    cfg = cfg or PilotConfig(mode="periodic", inputs="ALL", duration_s=3600.0)
    if any(not s > 0 for s in list(scale_85A) + list(scale_91R)):
        raise ValueError("enzyme scales must be > 0")
    jobs = [(cfg, scaling_factor, params, a, b) for a in scale_85A for b in scale_91R]
    fr = np.array(parallel_map(_heat_cell, jobs, workers)).reshape(len(scale_85A), len(scale_91R))
    linear = fr <= LINEAR_FRACTION_LIMIT
    flips_85, flips_91 = classification_flips(linear)
    rows = [(float(a), float(b), fr[i, j], bool(linear[i, j]))
            for i, a in enumerate(scale_85A) for j, b in enumerate(scale_91R)]
    header = ["scale_85A", "scale_91R", "nonlinear_fraction", "is_linear"]
    return CampaignResult("sensitivity_heatmap", {"sensitivity_heatmap.csv": (header, rows)},
                          {"flips_along_85A": flips_85, "flips_along_91R": flips_91,
                           "fractions": fr.tolist()})
