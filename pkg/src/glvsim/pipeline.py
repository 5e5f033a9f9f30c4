"""End-to-end chain: emission, wind, channel, loss and receiver kinetics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from glvsim import MOLECULES
from glvsim.channel import ConcentrationTrace, propagate, propagate_grid
from glvsim.config import Setup
from glvsim.loss import apply_loss
from glvsim.receiver import BatchResult, Trajectory, alarm_time, integrate_batch, integrate_receiver, linearity_time
from glvsim.transmitter import EmissionConfig, EmissionSignal, build_emission_signal, parse_bits, random_bits
from glvsim.wind import WindPath, sample_wind_path


def n_samples(setup: Setup, horizon_s: float) -> int:
    return int(round(horizon_s * setup.sample_rate_hz))


def emission(setup: Setup, horizon_s: float, amplitudes: dict | None = None) -> EmissionSignal:
    """Pulse train covering the whole horizon.

    Configured bits are used as given (then zero-padded); otherwise one random
    bit per symbol period is drawn so the transmitter keeps signalling until
    the horizon.
    """
    tx = setup.raw["transmitter"]
    n = n_samples(setup, horizon_s)
    if tx["bits"] is not None:
        bits = parse_bits(tx["bits"])
    else:
        bits = random_bits(setup.seed, max(1, math.ceil(horizon_s / tx["symbol_period_s"])), tx["p_one"])
    cfg = EmissionConfig(bits, amplitudes or setup.amplitudes(), tx["symbol_period_s"], setup.sample_rate_hz)
    return build_emission_signal(cfg).padded(n)


def wind(setup: Setup, horizon_s: float, regime: str | None = None) -> WindPath:
    return sample_wind_path(setup.wind_model(regime), n_samples(setup, horizon_s))


def air_at(setup: Setup, signal: EmissionSignal, path: WindPath, horizon_s: float, positions,
           first_index: int = 0) -> list[ConcentrationTrace]:
    """Lossy air traces at ``positions``; receiver ``i`` uses loss stream ``first_index + i``."""
    traces = propagate(signal, path, setup.channel_config(horizon_s), positions)
    models = setup.loss_models()
    return [apply_loss(tr, models, setup.seed, first_index + i) for i, tr in enumerate(traces)]


@dataclass
class PointResult:
    air: ConcentrationTrace
    trajectory: Trajectory
    alarm_time: float | None
    linearity_time: float | None


def run_point(setup: Setup, position, horizon_s: float, regime: str | None = None,
              amplitudes: dict | None = None, path: WindPath | None = None,
              receiver_index: int = 0) -> PointResult:
    signal = emission(setup, horizon_s, amplitudes)
    path = path if path is not None else wind(setup, horizon_s, regime)
    air = air_at(setup, signal, path, horizon_s, [position], receiver_index)[0]
    traj = integrate_receiver(air, setup.receiver_params(), setup.sample_rate_hz,
                              substeps=setup.raw["receiver"]["substeps"])
    return PointResult(air, traj, alarm_time(traj, setup.c_v0), linearity_time(traj))


def _stack(traces) -> np.ndarray:
    return np.stack([np.stack([tr.values[m] for m in MOLECULES]) for tr in traces])


def receivers_summary(setup: Setup, traces, store: bool = False, substeps: int | None = None) -> BatchResult:
    substeps = substeps or setup.raw["receiver"]["substeps"]
    return integrate_batch(_stack(traces), setup.receiver_params(), setup.sample_rate_hz,
                           substeps=substeps, store=store, c_v0=setup.c_v0)


def grid_rows_summary(setup: Setup, signal: EmissionSignal, path: WindPath, horizon_s: float,
                      xs, ys, z: float, first_index: int, tree_eps: float | None = None,
                      substeps: int | None = None) -> BatchResult:
    """Channel, loss and receivers for a block of grid rows (row-major cell numbering)."""
    cfg = setup.channel_config(horizon_s, tree_eps)
    field = propagate_grid(signal, path, cfg, xs, ys, z)
    models = setup.loss_models()
    traces = []
    for j, y in enumerate(ys):
        for i, x in enumerate(xs):
            tr = ConcentrationTrace({m: field[m][j, i] for m in MOLECULES}, cfg.sample_rate_hz, (x, y, z))
            traces.append(apply_loss(tr, models, setup.seed, first_index + j * len(xs) + i))
    del field
    return receivers_summary(setup, traces, substeps=substeps)
