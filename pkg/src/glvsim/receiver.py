"""Cytosolic enzyme network of a receiving leaf.

Five states (uM): HAL (c_a), HAC (c_t), HOL (c_o), HEXGlc (c_g), HEXVic (c_v).
CHR turns HAL into HOL, CXE turns HAC into HOL, 85A glucosylates HOL and
91R turns the glucoside into HEXVic. Uptake from air feeds the first three.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from glvsim import MOLECULES
from glvsim._rk4 import integrate
from glvsim.channel import ConcentrationTrace
from glvsim.io import write_csv
from glvsim.parameters import ENZYME_NAMES, EnzymeParams, LeafParams, default_enzymes, default_molecules
from glvsim.uptake import UptakeParams
from glvsim.units import Environment

log = logging.getLogger(__name__)

STATE_NAMES = ("c_a", "c_t", "c_o", "c_g", "c_v")
LINEARITY_THRESHOLD = 0.1
LINEAR_FRACTION_LIMIT = 0.02
CLAMP_WARNING_FRACTION = 1e-3


class IntegrationError(ArithmeticError):
    pass


@dataclass(frozen=True)
class ReceiverState:
    c_a: float = 0.0
    c_t: float = 0.0
    c_o: float = 0.0
    c_g: float = 0.0
    c_v: float = 0.0

    def __post_init__(self):
        for name in STATE_NAMES:
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be finite and >= 0, got {v}")

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, k) for k in STATE_NAMES], dtype=float)


@dataclass(frozen=True)
class ReceiverParams:
    enzymes: dict = field(default_factory=default_enzymes)
    uptake: dict = None
    per_stage_absorption: bool = True
    clamp_absorption: bool = False

    def __post_init__(self):
        if self.uptake is None:
            mols = default_molecules()
            object.__setattr__(self, "uptake", {m: UptakeParams(mols[m]) for m in MOLECULES})
        missing = [e for e in ENZYME_NAMES if e not in self.enzymes]
        if missing:
            raise ValueError(f"missing enzyme parameters: {missing}")
        missing = [m for m in MOLECULES if m not in self.uptake]
        if missing:
            raise ValueError(f"missing uptake parameters: {missing}")

    @classmethod
    def build(cls, molecules: dict, enzymes: dict | None = None, leaf: LeafParams = LeafParams(),
              env: Environment = Environment(), **kw) -> "ReceiverParams":
        uptake = {m: UptakeParams(molecules[m], leaf, env) for m in MOLECULES}
        return cls(enzymes=enzymes or default_enzymes(), uptake=uptake, **kw)

    def with_enzyme_scales(self, scales: dict) -> "ReceiverParams":
        enz = dict(self.enzymes)
        for name, s in scales.items():
            enz[name] = enz[name].scaled(s)
        return ReceiverParams(enz, self.uptake, self.per_stage_absorption, self.clamp_absorption)

    def kernel_arrays(self):
        rates = [self.uptake[m].linear_rates() for m in MOLECULES]
        alpha = np.array([a for a, _ in rates])
        beta = np.array([b for _, b in rates])
        vmax = np.array([self.enzymes[e].v_max for e in ENZYME_NAMES])
        km = np.array([self.enzymes[e].k_m for e in ENZYME_NAMES])
        return alpha, beta, vmax, km

    @property
    def k_m(self) -> np.ndarray:
        return np.array([self.enzymes[e].k_m for e in ENZYME_NAMES])


def mm_rate(c, e: EnzymeParams):
    """Michaelis-Menten rate k_cat * E * c / (k_m + c) in uM/s."""
    c = np.asarray(c, dtype=float)
    if np.any(c < 0):
        raise ValueError("substrate concentration must be >= 0")
    out = e.k_cat * e.e_total * c / (e.k_m + c)
    return float(out) if out.ndim == 0 else out


def linearity_ratio(state, k_m) -> np.ndarray | float:
    """max(c_a/k_m_ao, c_t/k_m_to, c_o/k_m_og, c_g/k_m_gv).

    ``state`` is a ReceiverState or an array whose first axis holds at least
    the first four states; ``k_m`` is the enzyme table or the four k_m values.
    """
    if isinstance(k_m, ReceiverParams):
        k_m = k_m.k_m
    elif isinstance(k_m, dict):
        k_m = np.array([k_m[e].k_m for e in ENZYME_NAMES])
    k_m = np.asarray(k_m, dtype=float)
    if isinstance(state, ReceiverState):
        return float(np.max(state.as_array()[:4] / k_m))
    s = np.asarray(state, dtype=float)
    ratios = s[:4] / k_m.reshape((4,) + (1,) * (s.ndim - 1))
    return ratios.max(axis=0)


@dataclass
class Trajectory:
    times: np.ndarray           # (N+1,)
    states: np.ndarray          # (5, N+1) uM
    absorption: np.ndarray      # (3, N+1) uM/s in MOLECULES order
    ratio: np.ndarray           # (N+1,)
    clamp_events: int = 0
    n_steps: int = 0
    max_mass_residual: float = 0.0

    def __getitem__(self, name: str) -> np.ndarray:
        return self.states[STATE_NAMES.index(name)]

    @property
    def final(self) -> ReceiverState:
        return ReceiverState(*map(float, self.states[:, -1]))

    def to_csv(self, path) -> None:
        header = ["time_s", *STATE_NAMES, "r", *(f"A_{m}" for m in MOLECULES)]
        table = np.vstack([self.times, self.states, self.ratio, self.absorption]).T
        write_csv(path, header, (map(float, row) for row in table))


def linearity_fraction(traj) -> float:
    """Share of samples whose saturation ratio is strictly above 0.1."""
    r = traj.ratio if isinstance(traj, Trajectory) else np.asarray(traj)
    if r.size == 0:
        raise ValueError("empty trajectory")
    return float(np.count_nonzero(r > LINEARITY_THRESHOLD)) / r.size


def is_linear(fraction: float) -> bool:
    return fraction <= LINEAR_FRACTION_LIMIT


def alarm_time(traj: Trajectory, c_v0: float) -> float | None:
    hit = np.flatnonzero(traj["c_v"] >= c_v0)
    return float(traj.times[hit[0]]) if hit.size else None


def linearity_time(traj: Trajectory) -> float | None:
    hit = np.flatnonzero(traj.ratio > LINEARITY_THRESHOLD)
    return float(traj.times[hit[0]]) if hit.size else None


def _air_array(inputs) -> np.ndarray:
    if isinstance(inputs, ConcentrationTrace):
        arr = np.stack([np.asarray(inputs.values[m], dtype=float) for m in MOLECULES])
    elif isinstance(inputs, dict):
        arr = np.stack([np.asarray(inputs[m], dtype=float) for m in MOLECULES])
    else:
        arr = np.asarray(inputs, dtype=float)
    if arr.ndim == 2:
        arr = arr[None]
    if arr.ndim != 3 or arr.shape[1] != 3:
        raise ValueError("air input must have shape (n_rx, 3, N) or (3, N)")
    if arr.shape[2] == 0:
        raise ValueError("air input is empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError("air input contains non-finite values")
    return np.ascontiguousarray(arr)


@dataclass
class BatchResult:
    """Summary of a batch run; ``states`` is only full-length when stored."""
    sample_rate_hz: float
    n_samples: int
    states: np.ndarray
    absorption: np.ndarray
    alarm_index: np.ndarray
    linearity_index: np.ndarray
    nonlinear_count: np.ndarray
    clamp_events: np.ndarray
    max_mass_residual: np.ndarray

    def _time(self, idx) -> list:
        return [None if i < 0 else int(i) / self.sample_rate_hz for i in idx]

    @property
    def alarm_times(self) -> list:
        return self._time(self.alarm_index)

    @property
    def linearity_times(self) -> list:
        return self._time(self.linearity_index)

    @property
    def nonlinear_fraction(self) -> np.ndarray:
        return self.nonlinear_count / (self.n_samples + 1)

    def trajectory(self, i: int, k_m) -> Trajectory:
        if self.states.shape[2] != self.n_samples + 1:
            raise ValueError("trajectory was not stored for this batch")
        times = np.arange(self.n_samples + 1) / self.sample_rate_hz
        return Trajectory(times, self.states[i], self.absorption[i], linearity_ratio(self.states[i], k_m),
                          int(self.clamp_events[i]), self.n_samples, float(self.max_mass_residual[i]))


def integrate_batch(air, params: ReceiverParams, sample_rate_hz: float = 10.0, *,
                    initial: ReceiverState = ReceiverState(), substeps: int = 1,
                    store: bool = True, c_v0: float = np.inf) -> BatchResult:
    """RK4 over many receivers. ``air`` is (n_rx, 3, N) in mol/m^3, held per sample."""
    if not sample_rate_hz > 0:
        raise ValueError("sample rate must be > 0")
    if substeps < 1:
        raise ValueError("substeps must be >= 1")
    arr = _air_array(air)
    alpha, beta, vmax, km = params.kernel_arrays()
    out = integrate(arr, initial.as_array(), alpha, beta, vmax, km, float(sample_rate_hz), int(substeps),
                    params.per_stage_absorption, params.clamp_absorption, store, float(c_v0),
                    LINEARITY_THRESHOLD)
    states, absorption, a_idx, l_idx, n_nl, clamps, resid, bad = out
    if np.any(bad >= 0):
        r = int(np.flatnonzero(bad >= 0)[0])
        raise IntegrationError(f"non-finite receiver state at t = {bad[r] / sample_rate_hz:g} s (receiver {r})")
    n_steps = arr.shape[2] * substeps
    for r in np.flatnonzero(clamps > CLAMP_WARNING_FRACTION * n_steps):
        log.warning("receiver %d: %d negative-state clamps in %d steps; consider a smaller step",
                    r, clamps[r], n_steps)
    return BatchResult(float(sample_rate_hz), arr.shape[2], states, absorption, a_idx, l_idx, n_nl,
                       clamps, resid)


def integrate_receiver(inputs, params: ReceiverParams | None = None, sample_rate_hz: float | None = None,
                       *, initial: ReceiverState = ReceiverState(), substeps: int = 1) -> Trajectory:
    """Integrate one receiver and return its full trajectory (N + 1 samples)."""
    params = params or ReceiverParams()
    if sample_rate_hz is None:
        sample_rate_hz = inputs.sample_rate_hz if isinstance(inputs, ConcentrationTrace) else 10.0
    elif isinstance(inputs, ConcentrationTrace) and not math.isclose(inputs.sample_rate_hz, sample_rate_hz):
        raise ValueError("integration rate must match the input trace sample rate")
    res = integrate_batch(inputs, params, sample_rate_hz, initial=initial, substeps=substeps)
    traj = res.trajectory(0, params.k_m)
    traj.n_steps = res.n_samples * substeps
    return traj
