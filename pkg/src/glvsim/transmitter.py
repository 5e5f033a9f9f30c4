"""Rectangular pulse-train emission from a bitten transmitter plant."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from glvsim import MOLECULES
from glvsim.rng import stream


@dataclass(frozen=True)
class EmissionConfig:
    bit_sequence: tuple[int, ...]
    amplitudes: dict            # molecule -> mol/s
    symbol_period_s: float = 2.0
    sample_rate_hz: float = 10.0

    def __post_init__(self):
        if len(self.bit_sequence) == 0:
            raise ValueError("bit sequence is empty")
        if any(b not in (0, 1) for b in self.bit_sequence):
            raise ValueError("bits must be 0 or 1")
        if not (self.symbol_period_s > 0 and self.sample_rate_hz > 0):
            raise ValueError("symbol period and sample rate must be > 0")
        if any(a < 0 for a in self.amplitudes.values()):
            raise ValueError("emission amplitudes must be >= 0")
        self.samples_per_symbol  # validates integrality

    @property
    def samples_per_symbol(self) -> int:
        spb = self.symbol_period_s * self.sample_rate_hz
        n = int(round(spb))
        if n < 1 or abs(spb - n) > 1e-9 * max(1.0, spb):
            raise ValueError(f"symbol_period_s * sample_rate_hz must be a positive integer, got {spb}")
        return n


@dataclass(frozen=True)
class EmissionSignal:
    samples: dict               # molecule -> ndarray of mol/s
    sample_rate_hz: float

    def __len__(self):
        return len(next(iter(self.samples.values())))

    @property
    def dt(self) -> float:
        return 1.0 / self.sample_rate_hz

    def scaled(self, factor: float) -> "EmissionSignal":
        return EmissionSignal({m: q * factor for m, q in self.samples.items()}, self.sample_rate_hz)

    def padded(self, n_samples: int) -> "EmissionSignal":
        """Zero-pad (or truncate) every molecule to ``n_samples``."""
        out = {}
        for m, q in self.samples.items():
            buf = np.zeros(n_samples)
            k = min(n_samples, len(q))
            buf[:k] = q[:k]
            out[m] = buf
        return EmissionSignal(out, self.sample_rate_hz)


def build_emission_signal(cfg: EmissionConfig) -> EmissionSignal:
    spb = cfg.samples_per_symbol
    gate = np.repeat(np.asarray(cfg.bit_sequence, dtype=float), spb)
    samples = {m: gate * float(cfg.amplitudes.get(m, 0.0)) for m in MOLECULES}
    return EmissionSignal(samples, cfg.sample_rate_hz)


def random_bits(master_seed: int, n_bits: int, p_one: float = 0.5) -> tuple[int, ...]:
    """Bernoulli(p_one) bits drawn from the "bits" substream."""
    if n_bits < 1:
        raise ValueError("n_bits must be >= 1")
    rng = stream(master_seed, "bits")
    return tuple(int(b) for b in (rng.random(n_bits) < p_one))


def parse_bits(text: str) -> tuple[int, ...]:
    """Bits from a config string such as ``"1011"``; whitespace and '_' ignored."""
    cleaned = "".join(ch for ch in text if not ch.isspace() and ch != "_")
    if not cleaned or set(cleaned) - {"0", "1"}:
        raise ValueError(f"bit string must contain only 0/1 characters, got {text!r}")
    return tuple(int(ch) for ch in cleaned)


def carbon_budget_amplitudes(base: dict, carbons: dict) -> tuple[float, dict]:
    """Single-molecule scenarios with the same total carbon emission rate.

    Returns ``(budget, scenarios)`` where budget is mol C / s and
    ``scenarios[m]`` emits only molecule m at ``budget / carbons[m]``.
    """
    for m in MOLECULES:
        if not (base[m] > 0 and carbons[m] > 0):
            raise ValueError("base amplitudes and carbon counts must be > 0")
    budget = sum(base[m] * carbons[m] for m in MOLECULES)
    scenarios = {
        active: {m: (budget / carbons[m] if m == active else 0.0) for m in MOLECULES}
        for active in MOLECULES
    }
    return budget, scenarios
