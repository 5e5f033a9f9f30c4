"""Small-signal frequency response from one oscillating input to internal HOL."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from glvsim import MOLECULES
from glvsim.analyses.common import CampaignResult, parallel_map
from glvsim.receiver import ReceiverParams, integrate_batch

RESIDUAL_WARNING = 0.2


@dataclass(frozen=True)
class FrequencyPoint:
    molecule: str
    frequency_hz: float
    gain: float          # uM of internal HOL per uM of air concentration
    phase_rad: float
    residual_ratio: float
    n_periods: int
    warning: bool


def default_frequencies(f_min: float = 1e-4, f_max: float = 1.0, n: int = 12) -> np.ndarray:
    return np.geomspace(f_min, f_max, n)


def n_periods_for(f: float, min_periods: int = 20, settle_s: float = 60.0, discard: float = 0.25) -> int:
    # enough periods that the discarded lead-in also covers the settling time
    need = f * settle_s / discard if discard > 0 else 0.0
    return int(max(min_periods, math.ceil(need)))


def fit_sinusoid(t: np.ndarray, y: np.ndarray, f: float) -> tuple[float, float, float, float]:
    """Least-squares y ~ b0 + B cos(2 pi f t + phi); returns (b0, B, phi, rms residual)."""
    w = 2.0 * math.pi * f
    design = np.column_stack([np.ones_like(t), np.cos(w * t), np.sin(w * t)])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    b0, bc, bs = coef
    resid = y - design @ coef
    return float(b0), float(math.hypot(bc, bs)), float(math.atan2(-bs, bc)), float(np.sqrt(np.mean(resid ** 2)))


def response_at(f: float, molecule: str, amplitude: float, params: ReceiverParams, fs: float = 10.0,
                min_periods: int = 20, settle_s: float = 60.0, discard: float = 0.25,
                substeps: int = 1) -> FrequencyPoint:
    if not (amplitude > 0 and f > 0):
        raise ValueError("amplitude and frequency must be > 0")
    if f > fs / 4:
        raise ValueError(f"frequency {f} Hz is above fs/4 = {fs / 4} Hz")
    periods = n_periods_for(f, min_periods, settle_s, discard)
    n = int(math.ceil(periods / f * fs))
    t = np.arange(n) / fs
    air = np.zeros((3, n))
    air[MOLECULES.index(molecule)] = amplitude * (1.0 + np.cos(2.0 * math.pi * f * t))
    res = integrate_batch(air, params, fs, substeps=substeps, store=True)
    c_o = res.states[0, 2, :n]
    keep = slice(int(math.floor(discard * n)), n)
    _b0, b, phi, rms = fit_sinusoid(t[keep], c_o[keep], f)
    # air amplitude in umol/L: 1 mol/m^3 = 1e3 umol/L
    gain = b / (amplitude * 1e3)
    ratio = rms / b if b > 0 else math.inf
    return FrequencyPoint(molecule, float(f), gain, phi, ratio, periods, ratio > RESIDUAL_WARNING)


def _cell(job):
    return response_at(*job)


def run_frequency_response(freqs, molecules=MOLECULES, amplitude: float = 5e-11,
                           params: ReceiverParams | None = None, fs: float = 10.0, min_periods: int = 20,
                           settle_s: float = 60.0, discard: float = 0.25, workers: int = 1,
                           substeps: int = 1) -> CampaignResult:
    params = params or ReceiverParams()
    if isinstance(molecules, str):
        molecules = [molecules]
    jobs = [(float(f), m, amplitude, params, fs, min_periods, settle_s, discard, substeps)
            for m in molecules for f in freqs]
    points = parallel_map(_cell, jobs, workers)
    header = ["molecule", "frequency_hz", "gain", "phase_rad", "residual_ratio", "n_periods", "warning"]
    rows = [(p.molecule, p.frequency_hz, p.gain, p.phase_rad, p.residual_ratio, p.n_periods, p.warning)
            for p in points]
    return CampaignResult("frequency_response", {"frequency_response.csv": (header, rows)},
                          {"warnings": sum(p.warning for p in points)})


def gains_by_molecule(result: CampaignResult) -> dict:
    out = {}
    for m, f, g, *_ in result.tables["frequency_response.csv"][1]:
        out.setdefault(m, ([], []))
        out[m][0].append(f)
        out[m][1].append(g)
    return {m: (np.array(f), np.array(g)) for m, (f, g) in out.items()}
