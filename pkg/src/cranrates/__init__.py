"""Achievable sum-rates for uplink C-RAN with finite-capacity backhaul.

Five schemes over a real Gaussian multiple-access channel observed by K
relays connected to a central processor through error-free links of C_k
bits per channel use: quantized compute-and-forward (qcof), jointly
quantized compute-and-forward (jqcof), multi-equation compute-and-forward
(baselines.cof_multi_equation), successive Wyner-Ziv (baselines.
swz_sum_rate), and the cut-set upper bound (channel.cutset_sum_rate).
"""

__version__ = "0.1.0"

from .channel import SystemConfig, cutset_sum_rate, sample_channel
from .baselines import cof_multi_equation, swz_sum_rate
from .jqcof import JqcofEvaluation, jqcof_evaluate, jqcof_optimize, waterfill
from .lattice import (
    best_equation_lll,
    effective_basis,
    enumerate_equations,
    lll_reduce,
    successive_equations,
)
from .numerics import cholesky_lower, log2_plus, sym_eig2
from .qcof import (
    QcofEvaluation,
    compression_noises,
    computational_rate,
    qcof_evaluate,
    qcof_optimize,
)

__all__ = [
    "JqcofEvaluation",
    "QcofEvaluation",
    "SystemConfig",
    "__version__",
    "best_equation_lll",
    "cholesky_lower",
    "cof_multi_equation",
    "compression_noises",
    "computational_rate",
    "cutset_sum_rate",
    "effective_basis",
    "enumerate_equations",
    "jqcof_evaluate",
    "jqcof_optimize",
    "lll_reduce",
    "log2_plus",
    "qcof_evaluate",
    "qcof_optimize",
    "sample_channel",
    "successive_equations",
    "swz_sum_rate",
    "sym_eig2",
    "waterfill",
]
