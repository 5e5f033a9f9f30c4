"""Seeded realisations of the spatially uniform, white Gaussian wind."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from glvsim.parameters import WIND_REGIMES
from glvsim.rng import stream


@dataclass(frozen=True)
class WindModel:
    mean_mps: tuple[float, float] = (0.0, 0.0)
    std_mps: tuple[float, float] = (0.0, 0.0)
    sample_rate_hz: float = 10.0
    seed: int = 0

    def __post_init__(self):
        if any(s < 0 for s in self.std_mps):
            raise ValueError("wind std must be >= 0")
        if not self.sample_rate_hz > 0:
            raise ValueError("sample_rate_hz must be > 0")

    @classmethod
    def from_regime(cls, name: str, sample_rate_hz: float = 10.0, seed: int = 0) -> "WindModel":
        try:
            regime = WIND_REGIMES[name]
        except KeyError:
            raise ValueError(f"unknown wind regime {name!r}; known: {sorted(WIND_REGIMES)}") from None
        return cls(regime.mean, regime.std, sample_rate_hz, seed)


@dataclass(frozen=True)
class WindPath:
    """Velocities v[n] (held over [n dt, (n+1) dt)) and displacement W[n].

    ``displacement`` has one more row than ``velocities``: W[0] = 0 and
    W[n] = sum_{k<n} v[k] dt, so the last row is the position at the horizon.
    """
    velocities: np.ndarray      # (n, 3)
    displacement: np.ndarray    # (n + 1, 3)
    sample_rate_hz: float

    def __len__(self):
        return len(self.velocities)

    @property
    def dt(self) -> float:
        return 1.0 / self.sample_rate_hz


def path_from_velocities(velocities: np.ndarray, sample_rate_hz: float) -> WindPath:
    v = np.array(velocities, dtype=float, copy=True)
    if v.ndim != 2 or v.shape[1] != 3:
        raise ValueError("velocities must have shape (n, 3)")
    w = np.zeros((len(v) + 1, 3))
    np.cumsum(v * (1.0 / sample_rate_hz), axis=0, out=w[1:])
    v.flags.writeable = False
    w.flags.writeable = False
    return WindPath(v, w, sample_rate_hz)


def sample_wind_path(model: WindModel, n_samples: int) -> WindPath:
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    rng = stream(model.seed, "wind")
    v = np.zeros((n_samples, 3))
    # x and y drawn as one (n, 2) block so the path depends only on (seed, n)
    v[:, :2] = rng.normal(model.mean_mps, model.std_mps, size=(n_samples, 2))
    return path_from_velocities(v, model.sample_rate_hz)


def still_air(n_samples: int, sample_rate_hz: float = 10.0) -> WindPath:
    return path_from_velocities(np.zeros((n_samples, 3)), sample_rate_hz)
