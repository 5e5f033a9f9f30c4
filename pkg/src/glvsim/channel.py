"""Diffusion-advection channel between a point transmitter and receivers.

With a spatially uniform wind, a unit puff released at time s and observed
at time t is the free-space diffusion Gaussian recentred by the wind
displacement accumulated over (s, t). Air concentration at a receiver is the
superposition of all puffs released before the observation time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from glvsim import MOLECULES, _kernels
from glvsim.io import write_csv
from glvsim.transmitter import EmissionSignal
from glvsim.wind import WindPath

MIN_SEPARATION = 1e-3          # m


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class ChannelConfig:
    tx_position: tuple[float, float, float] = (0.0, 0.0, 1.0)
    diffusivity: dict = field(default_factory=lambda: {"HAL": 8.0718e-6, "HOL": 7.9291e-6, "HAC": 6.7698e-6})
    sample_rate_hz: float = 10.0
    horizon_s: float = 60.0
    # puffs per emission sample; 1 reproduces the plain sample-rate sum
    emission_substeps: int = 1
    # "exact" is the direct O(N^2) sum; "tree" skips negligible subtrees and,
    # with tree_eps > 0, merges compact distant ones into one Gaussian
    method: str = "exact"
    tree_eps: float = 0.0
    # tree skips puffs whose Gaussian factor is below this at every receiver
    truncation: float = 1e-18

    def __post_init__(self):
        if any(not d > 0 for d in self.diffusivity.values()):
            raise ValueError("diffusivities must be > 0")
        if not (self.horizon_s > 0 and self.sample_rate_hz > 0):
            raise ValueError("horizon_s and sample_rate_hz must be > 0")
        if self.emission_substeps < 1:
            raise ValueError("emission_substeps must be >= 1")
        if self.method not in ("exact", "tree"):
            raise ValueError(f"unknown channel method {self.method!r}")
        if self.tree_eps < 0:
            raise ValueError("tree_eps must be >= 0")
        if not 0 < self.truncation < 1:
            raise ValueError("truncation must lie in (0, 1)")

    @property
    def truncation_cut(self) -> float:
        return -math.log(self.truncation)

    @property
    def n_samples(self) -> int:
        return int(round(self.horizon_s * self.sample_rate_hz))


@dataclass(frozen=True)
class ConcentrationTrace:
    """Air concentration (mol/m^3) per molecule at one receiver, c[n] at t = n / fs."""
    values: dict
    sample_rate_hz: float
    position: tuple[float, float, float]

    def __len__(self):
        return len(next(iter(self.values.values())))

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self)) / self.sample_rate_hz

    def to_csv(self, path) -> None:
        cols = [self.values[m] for m in MOLECULES]
        rows = ([float(t)] + [float(c[n]) for c in cols] for n, t in enumerate(self.times))
        write_csv(path, ["time_s"] + [f"c_{m}" for m in MOLECULES], rows)


def read_trace_csv(path, position=(np.nan, np.nan, np.nan)) -> ConcentrationTrace:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    fs = 1.0 / (data[1, 0] - data[0, 0]) if len(data) > 1 else 1.0
    return ConcentrationTrace({m: data[:, i + 1] for i, m in enumerate(MOLECULES)}, fs, tuple(position))


def impulse_response(delta_t, offset, D: float):
    """Free-space Gaussian kernel (1/m^3) for a unit mass after ``delta_t`` seconds.

    ``offset`` is receiver minus puff centre, shape (..., 3).
    """
    delta_t = np.asarray(delta_t, dtype=float)
    if np.any(delta_t <= 0):
        raise ValueError("delta_t must be > 0")
    offset = np.asarray(offset, dtype=float)
    r2 = np.sum(offset * offset, axis=-1)
    var2 = 4.0 * D * delta_t
    return (np.pi * var2) ** -1.5 * np.exp(-r2 / var2)


@dataclass(frozen=True)
class Sources:
    ticks: np.ndarray
    mass: np.ndarray
    px: np.ndarray
    py: np.ndarray
    substeps: int
    dt: float

    @property
    def h(self) -> float:
        return self.dt / self.substeps


def emission_sources(q: np.ndarray, wind: WindPath, substeps: int = 1) -> Sources:
    """Split a zero-order-hold emission into puffs at sub-sample release times.

    Within sample k the wind velocity is constant, so the release-time
    displacement of sub-puff j is exactly ``W[k] + v[k] * j * dt / substeps``.
    """
    q = np.asarray(q, dtype=float)
    if np.any(q < 0):
        raise ValueError("emission must be non-negative")
    dt = wind.dt
    k = np.flatnonzero(q > 0)
    if k.size and k[-1] >= len(wind):
        raise ValueError("wind path shorter than the emission signal")
    j = np.arange(substeps)
    ticks = (k[:, None] * substeps + j[None, :]).ravel()
    frac = np.broadcast_to(j[None, :] * (dt / substeps), (k.size, substeps))
    px = (wind.displacement[k, 0][:, None] + wind.velocities[k, 0][:, None] * frac).ravel()
    py = (wind.displacement[k, 1][:, None] + wind.velocities[k, 1][:, None] * frac).ravel()
    mass = np.repeat(q[k] * (dt / substeps), substeps)
    return Sources(ticks.astype(np.int64), mass, px, py, substeps, dt)


def _check_inputs(signal: EmissionSignal, wind: WindPath, cfg: ChannelConfig) -> int:
    n = cfg.n_samples
    for name, fs in (("signal", signal.sample_rate_hz), ("wind", wind.sample_rate_hz)):
        if not math.isclose(fs, cfg.sample_rate_hz):
            raise ValueError(f"{name} sample rate {fs} != channel sample rate {cfg.sample_rate_hz}")
    if len(wind) < n:
        raise ValueError(f"wind path has {len(wind)} samples, horizon needs {n}")
    if len(signal) > n:
        raise ValueError(f"emission signal ({len(signal)} samples) longer than horizon ({n})")
    return n


def _check_geometry(rel: np.ndarray) -> None:
    d = np.sqrt(np.sum(rel * rel, axis=-1))
    bad = np.flatnonzero(d <= MIN_SEPARATION)
    if bad.size:
        raise GeometryError(f"receiver(s) {bad.tolist()} within {MIN_SEPARATION} m of the transmitter")


def _species_groups(signal: EmissionSignal) -> list[tuple[np.ndarray, list, np.ndarray]]:
    """Group molecules whose emissions are one gate times a constant.

    Returns (gate, molecules, amplitudes) triples. The transmitter produces a
    single shared gate, so normally one group covers all three molecules.
    """
    groups = []
    left = list(MOLECULES)
    while left:
        ref = np.asarray(signal.samples[left[0]], dtype=float)
        on = ref > 0
        members, amps = [left[0]], [1.0]
        for m in left[1:]:
            q = np.asarray(signal.samples[m], dtype=float)
            if not on.any():
                ok = not np.any(q > 0)
                ratio = 0.0
            else:
                with np.errstate(over="ignore"):
                    ratio = q[on][0] / ref[on][0]
                ok = np.isfinite(ratio) and (not np.any(q[~on] > 0)) and np.allclose(q[on], ratio * ref[on], rtol=1e-12, atol=0.0)
            if ok:
                members.append(m)
                amps.append(ratio)
        groups.append((ref, members, np.array(amps)))
        left = [m for m in left if m not in members]
    return groups


def _tree_grid(signal, wind, cfg, n, xs, ys, dz) -> dict:
    wx = np.ascontiguousarray(wind.displacement[:n, 0])
    wy = np.ascontiguousarray(wind.displacement[:n, 1])
    out = {}
    for gate, members, amps in _species_groups(signal):
        src = emission_sources(gate, wind, cfg.emission_substeps)
        tree = _kernels.build_tree(src.ticks, src.mass, src.px, src.py)
        Ds = np.array([cfg.diffusivity[m] for m in members])
        res = _kernels.tree_traces(tree, src.h, src.substeps, Ds, amps, wx, wy, n,
                                   np.ascontiguousarray(xs, dtype=float), np.ascontiguousarray(ys, dtype=float),
                                   float(dz), cfg.truncation_cut, cfg.tree_eps)
        for i, m in enumerate(members):
            out[m] = res[i]
    return out


def propagate(signal: EmissionSignal, wind: WindPath, cfg: ChannelConfig, rx_positions) -> list[ConcentrationTrace]:
    """Air-concentration traces at each receiver for every molecule."""
    n = _check_inputs(signal, wind, cfg)
    rx_positions = np.atleast_2d(np.asarray(rx_positions, dtype=float))
    rel = rx_positions - np.asarray(cfg.tx_position, dtype=float)
    _check_geometry(rel)
    per_rx = [dict() for _ in rel]
    if cfg.method == "exact":
        wx = np.ascontiguousarray(wind.displacement[:n, 0])
        wy = np.ascontiguousarray(wind.displacement[:n, 1])
        for m in MOLECULES:
            src = emission_sources(signal.samples[m], wind, cfg.emission_substeps)
            out = _kernels.exact_traces(src.ticks, src.mass, src.px, src.py, src.h, src.substeps,
                                        cfg.diffusivity[m], wx, wy, n,
                                        rel[:, 0].copy(), rel[:, 1].copy(), rel[:, 2].copy())
            for r in range(len(rel)):
                per_rx[r][m] = out[r]
    elif np.all(rel[:, 1:] == rel[0, 1:]) and len(np.unique(rel[:, 0])) == len(rel):
        # receivers on one line parallel to x share a single traversal
        order = np.argsort(rel[:, 0])
        res = _tree_grid(signal, wind, cfg, n, rel[order, 0], rel[:1, 1], rel[0, 2])
        for slot, r in enumerate(order):
            for m in MOLECULES:
                per_rx[r][m] = res[m][0, slot]
    else:
        for r, (x, y, z) in enumerate(rel):
            res = _tree_grid(signal, wind, cfg, n, np.array([x]), np.array([y]), z)
            for m in MOLECULES:
                per_rx[r][m] = res[m][0, 0]
    traces = [ConcentrationTrace(v, cfg.sample_rate_hz, tuple(p)) for v, p in zip(per_rx, rx_positions)]
    for tr in traces:
        for m, c in tr.values.items():
            # the kernel is positive; a negative value means a bug, not noise
            assert not np.any(c < 0), f"negative concentration for {m}"
    return traces


def propagate_grid(signal: EmissionSignal, wind: WindPath, cfg: ChannelConfig,
                   xs, ys, z: float) -> dict:
    """Traces on the rectilinear receiver grid ``xs x ys`` at height ``z``.

    Returns molecule -> array (len(ys), len(xs), n). Grid points on top of the
    transmitter are rejected.
    """
    n = _check_inputs(signal, wind, cfg)
    xs = np.asarray(xs, dtype=float) - cfg.tx_position[0]
    ys = np.asarray(ys, dtype=float) - cfg.tx_position[1]
    if np.any(np.diff(xs) <= 0) or np.any(np.diff(ys) <= 0):
        raise ValueError("grid coordinates must be strictly increasing")
    dz = float(z) - cfg.tx_position[2]
    gx, gy = np.meshgrid(xs, ys)
    if np.any(np.sqrt(gx ** 2 + gy ** 2 + dz ** 2) <= MIN_SEPARATION):
        raise GeometryError("grid contains a point at the transmitter")
    if cfg.method == "tree":
        return _tree_grid(signal, wind, cfg, n, xs, ys, dz)
    wx = np.ascontiguousarray(wind.displacement[:n, 0])
    wy = np.ascontiguousarray(wind.displacement[:n, 1])
    out = {}
    for m in MOLECULES:
        src = emission_sources(signal.samples[m], wind, cfg.emission_substeps)
        flat = _kernels.exact_traces(src.ticks, src.mass, src.px, src.py, src.h, src.substeps,
                                     cfg.diffusivity[m], wx, wy, n,
                                     gx.ravel().copy(), gy.ravel().copy(), np.full(gx.size, dz))
        out[m] = flat.reshape(len(ys), len(xs), n)
    return out


@dataclass(frozen=True)
class OracleEstimate:
    """Particle-count concentration estimates at probe sample indices."""
    indices: np.ndarray
    times: np.ndarray
    values: dict            # molecule -> estimate (mol/m^3)
    stderr: dict            # molecule -> standard error
    counts: dict            # molecule -> particles inside the kernel sphere
    position: tuple


def _allocate(weights: np.ndarray, n: int) -> np.ndarray:
    """Integer split of ``n`` proportional to ``weights`` (largest remainder)."""
    share = weights / weights.sum() * n
    base = np.floor(share).astype(np.int64)
    rest = n - base.sum()
    if rest > 0:
        order = np.argsort(-(share - base), kind="stable")
        base[order[:rest]] += 1
    return base


def particle_oracle(signal: EmissionSignal, wind: WindPath, cfg: ChannelConfig, rx_position,
                    n_particles: int = 100_000, kernel_radius: float = 0.02, probe_indices=None,
                    seed: int = 0) -> OracleEstimate:
    """Monte Carlo estimate of the channel by random-walking particles.

    Particles leave the source at the same release instants and in
    proportion to the same masses as the analytic sources. Each step moves a
    particle by ``v dt + sqrt(2 D dt) xi`` with standard normal ``xi``; the
    walk is advanced directly between probe instants since a sum of Gaussian
    steps is itself Gaussian with the summed variance. Concentration is the
    particle count in a sphere around the receiver times the mass per
    particle over the sphere volume.
    """
    from glvsim.rng import stream

    if not kernel_radius > 0:
        raise ValueError("kernel_radius must be > 0")
    if n_particles < 1:
        raise ValueError("n_particles must be >= 1")
    n = _check_inputs(signal, wind, cfg)
    rel = np.asarray(rx_position, dtype=float) - np.asarray(cfg.tx_position, dtype=float)
    _check_geometry(rel[None])
    probes = np.arange(n) if probe_indices is None else np.asarray(probe_indices, dtype=np.int64)
    if probes.size == 0 or np.any(np.diff(probes) <= 0) or probes[0] < 0 or probes[-1] >= n:
        raise ValueError("probe indices must be increasing and inside the horizon")
    volume = 4.0 / 3.0 * math.pi * kernel_radius ** 3
    W = wind.displacement
    values, stderr, counts = {}, {}, {}
    for m in MOLECULES:
        q = np.asarray(signal.samples[m], dtype=float)
        src = emission_sources(q, wind, cfg.emission_substeps)
        est = np.zeros(probes.size)
        se = np.zeros(probes.size)
        cnt = np.zeros(probes.size, dtype=np.int64)
        if src.mass.sum() > 0:
            rng = stream(seed, f"oracle:{m}")
            per_src = _allocate(src.mass, n_particles)
            keep = per_src > 0
            ticks = np.repeat(src.ticks[keep], per_src[keep])
            start = np.column_stack([np.repeat(src.px[keep], per_src[keep]),
                                     np.repeat(src.py[keep], per_src[keep])])
            m_p = src.mass.sum() / n_particles
            D = cfg.diffusivity[m]
            pos = np.zeros((ticks.size, 3))       # diffusive part of the offset from tx
            t_prev = ticks * src.h                # time of the last update (release at first)
            for k, idx in enumerate(probes):
                t_now = idx / cfg.sample_rate_hz
                alive = ticks < idx * src.substeps
                dt = t_now - t_prev[alive]
                pos[alive] += rng.standard_normal((int(alive.sum()), 3)) * np.sqrt(2.0 * D * dt)[:, None]
                t_prev[alive] = t_now
                drift = W[idx, :2][None, :] - start[alive]
                d = pos[alive].copy()
                d[:, :2] += drift
                d -= rel
                inside = int(np.count_nonzero(np.einsum("ij,ij->i", d, d) <= kernel_radius ** 2))
                cnt[k] = inside
                est[k] = inside * m_p / volume
                se[k] = math.sqrt(max(inside, 1)) * m_p / volume
        values[m], stderr[m], counts[m] = est, se, cnt
    return OracleEstimate(probes, probes / cfg.sample_rate_hz, values, stderr, counts, tuple(rx_position))
