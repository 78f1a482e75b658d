"""System configuration, seeded channel sampling, and the cut-set bound.

The channel is a K x L real matrix H whose row k carries the fading
coefficients from the L users to relay k. Draws are i.i.d. standard normal
from a counter-based generator keyed by (seed, trial), so any worker can
regenerate trial t without coordinating with the others and results do not
depend on execution order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["RNG_ID", "SystemConfig", "cutset_sum_rate", "sample_channel"]

SEARCH_METHODS = ("exhaustive", "lll")

# recorded in sweep metadata so outputs can be regenerated exactly
RNG_ID = "numpy.random.Philox(key=(seed, trial))"


@dataclass(frozen=True)
class SystemConfig:
    """Dimensions and physical parameters of one system instance.

    snr is the linear transmit-power to noise-power ratio (dB conversion
    happens at the CLI boundary only). backhaul holds the K per-relay link
    capacities in bits per channel use.
    """

    users: int
    relays: int
    snr: float
    backhaul: tuple[float, ...]
    epsilon: float = 1e-6
    lll_delta: float = 0.75
    search: str = "exhaustive"
    seed: int = 0
    trials: int = 1

    def __post_init__(self):
        object.__setattr__(self, "backhaul", tuple(float(c) for c in self.backhaul))
        if self.users < 1:
            raise ValueError(f"users must be >= 1, got {self.users}")
        if self.relays < 1:
            raise ValueError(f"relays must be >= 1, got {self.relays}")
        if not self.snr > 0.0:
            raise ValueError(f"snr must be positive, got {self.snr}")
        if len(self.backhaul) != self.relays:
            raise ValueError(
                f"backhaul has {len(self.backhaul)} entries for {self.relays} relays"
            )
        if any(c < 0.0 for c in self.backhaul):
            raise ValueError("backhaul capacities must be >= 0")
        if not self.epsilon > 0.0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if not 0.25 < self.lll_delta <= 1.0:
            raise ValueError(f"lll_delta must lie in (0.25, 1], got {self.lll_delta}")
        if self.search not in SEARCH_METHODS:
            raise ValueError(f"search must be one of {SEARCH_METHODS}, got {self.search!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")


def sample_channel(cfg: SystemConfig, trial: int) -> np.ndarray:
    """K x L matrix of i.i.d. standard normal fading coefficients.

    Pure in (cfg.seed, trial): repeated calls return bit-identical draws.
    """
    if trial < 0:
        raise ValueError(f"trial index must be >= 0, got {trial}")
    rng = np.random.Generator(np.random.Philox(key=[cfg.seed, trial]))
    return rng.standard_normal((cfg.relays, cfg.users))


def cutset_sum_rate(h_matrix, snr: float, backhaul) -> float:
    """Upper bound: min of the receiver-cut MAC capacity and total backhaul.

    Equals min( 0.5*log2 det(I_K + snr*H H^T), sum_k C_k ).
    """
    h = np.asarray(h_matrix, dtype=float)
    if not snr > 0.0:
        raise ValueError(f"snr must be positive, got {snr}")
    k = h.shape[0]
    _, logdet = np.linalg.slogdet(np.eye(k) + snr * (h @ h.T))
    receiver_cut = 0.5 * logdet / math.log(2.0)
    return min(receiver_cut, float(sum(backhaul)))
