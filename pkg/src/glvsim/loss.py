"""Receiver-side random multiplicative loss with moment-matched Beta factors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from glvsim import MOLECULES
from glvsim.channel import ConcentrationTrace
from glvsim.rng import stream


class LossParameterError(ValueError):
    pass


def beta_params_from_mean_cv(mean: float, cv: float) -> tuple[float, float]:
    """Shape parameters (alpha, beta) of the Beta law with the given mean and CV.

    Raises LossParameterError when no Beta law has these moments. ``cv == 0``
    has no finite shape parameters; callers treat it as a constant factor.
    """
    if not 0 < mean <= 1:
        raise LossParameterError(f"loss mean must lie in (0, 1], got {mean}")
    if cv < 0:
        raise LossParameterError(f"loss cv must be >= 0, got {cv}")
    if cv == 0:
        return float("inf"), float("inf")
    bound = (1 - mean) / mean
    if not cv * cv < bound:
        raise LossParameterError(
            f"infeasible Beta loss: cv^2 = {cv * cv:.6g} must be < (1 - mean) / mean = {bound:.6g}")
    var = (mean * cv) ** 2
    nu = mean * (1 - mean) / var - 1
    return mean * nu, (1 - mean) * nu


@dataclass(frozen=True)
class LossModel:
    mean: float = 0.85
    cv: float = 0.15
    enabled: bool = True

    def __post_init__(self):
        beta_params_from_mean_cv(self.mean, self.cv)

    @property
    def deterministic(self) -> bool:
        return self.cv == 0

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.deterministic:
            return np.full(n, float(self.mean))
        a, b = beta_params_from_mean_cv(self.mean, self.cv)
        return rng.beta(a, b, size=n)


def apply_loss(trace: ConcentrationTrace, models: dict, master_seed: int,
               receiver_index: int = 0) -> ConcentrationTrace:
    """Multiply each molecule's trace by i.i.d. per-sample loss factors.

    ``models`` maps molecule -> LossModel. Each molecule draws from its own
    substream ("loss:HAL", ...) indexed by receiver, so molecules and
    receivers never share or shift each other's draws.
    """
    out = {}
    for m in MOLECULES:
        c = np.asarray(trace.values[m], dtype=float)
        if not np.all(np.isfinite(c)) or np.any(c < 0):
            raise ValueError(f"{m} trace must be finite and non-negative")
        model = models.get(m)
        if model is None or not model.enabled:
            out[m] = c.copy()
            continue
        factors = model.sample(stream(master_seed, f"loss:{m}", receiver_index), len(c))
        out[m] = c * factors
    return ConcentrationTrace(out, trace.sample_rate_hz, trace.position)
