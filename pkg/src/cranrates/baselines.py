"""Reference schemes: multi-equation compute-and-forward and successive
Wyner-Ziv signal forwarding.

Both are pure functions of (H, snr, backhaul). The CoF scheme lets relay k
decode m_k integer equations (the first m_k successive minima of its
effective lattice) with the counts chosen by exhaustive search over all
ways to split L equations across K relays; SWZ compresses each relay's raw
received signal in index order with previously forwarded signals as side
information.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .lattice import DEFAULT_CAP, integer_rank, successive_equations
from .qcof import computational_rate

__all__ = [
    "cof_multi_equation",
    "cof_prepare",
    "cof_from_tables",
    "cof_tables_from_chains",
    "swz_sum_rate",
]


def _check_inputs(h, snr, backhaul):
    if not snr > 0.0:
        raise ValueError(f"snr must be positive, got {snr}")
    if len(backhaul) != h.shape[0]:
        raise ValueError(f"backhaul has {len(backhaul)} entries for {h.shape[0]} relays")
    for c in backhaul:
        if not c >= 0.0:
            raise ValueError(f"backhaul capacities must be nonnegative, got {c}")


def swz_sum_rate(h_matrix, snr: float, backhaul) -> float:
    """Sum-rate of successive Wyner-Ziv forwarding of the raw signals.

    Relay k's signal y_k (variance snr*|h_k|^2 + 1) is quantized with test
    channel noise q_k = v_k / (2^(2 C_k) - 1), where v_k is its variance
    conditioned on the previously forwarded signals; C_k = 0 makes the
    relay inactive. The receiver then decodes all users jointly:
    0.5*log2 det(I + snr * H^T diag(1/(1+q))_active H).
    """
    h = np.asarray(h_matrix, dtype=float)
    relays, users = h.shape
    _check_inputs(h, snr, backhaul)
    # posterior precision of x given the signals forwarded so far
    s = np.eye(users) / snr
    w = np.zeros(relays)
    for k in range(relays):
        v = float(h[k] @ np.linalg.inv(s) @ h[k]) + 1.0
        gain = 2.0 ** (2.0 * float(backhaul[k])) - 1.0
        if gain <= 0.0:
            continue
        q = v / gain
        w[k] = 1.0 / (1.0 + q)
        s += w[k] * np.outer(h[k], h[k])
    sign, logdet = np.linalg.slogdet(np.eye(users) + snr * (h.T * w) @ h)
    return 0.5 * logdet / math.log(2.0) if sign > 0 else 0.0


def cof_prepare(h_matrix, snr: float, cap: int = DEFAULT_CAP) -> list[tuple[float, np.ndarray]]:
    """Backhaul-independent tables for every feasible equation split.

    Returns one (sum_rate, per-relay loads) pair per composition of L
    equations over the K relays whose stacked matrix has full rank; the
    loads are the bits each relay must forward when every equation carries
    its largest participating user rate. Order follows the lexicographic
    composition enumeration, so downstream tie-breaks are deterministic.
    """
    h = np.asarray(h_matrix, dtype=float)
    relays, users = h.shape
    if not snr > 0.0:
        raise ValueError(f"snr must be positive, got {snr}")
    chains = [successive_equations(h[k], snr, users, cap) for k in range(relays)]
    return cof_tables_from_chains(h, snr, chains)


def cof_tables_from_chains(h_matrix, snr: float, chains) -> list[tuple[float, np.ndarray]]:
    """cof_prepare on precomputed per-relay successive-minima chains."""
    h = np.asarray(h_matrix, dtype=float)
    relays, users = h.shape
    rates = [
        np.array([computational_rate(h[k], a, snr) for a in chains[k]]) for k in range(relays)
    ]
    tables: list[tuple[float, np.ndarray]] = []
    for counts in itertools.product(range(users + 1), repeat=relays):
        if sum(counts) != users:
            continue
        stacked = [vec for k in range(relays) for vec in chains[k][: counts[k]]]
        if integer_rank(np.vstack(stacked)) < users:
            continue
        r = np.full(users, np.inf)
        for k in range(relays):
            for i in range(counts[k]):
                covered = chains[k][i] != 0
                r[covered] = np.minimum(r[covered], rates[k][i])
        loads = np.zeros(relays)
        for k in range(relays):
            for i in range(counts[k]):
                covered = chains[k][i] != 0
                loads[k] += r[covered].max()
        tables.append((float(r.sum()), loads))
    return tables


def cof_from_tables(tables: list[tuple[float, np.ndarray]], backhaul) -> float:
    """Best CoF sum-rate over prepared allocation tables for one backhaul.

    A relay whose load exceeds its capacity forces a uniform scaling of
    every user rate by rho = min_k C_k / load_k (capped at 1), the largest
    factor restoring feasibility.
    """
    best = 0.0
    c = np.asarray(backhaul, dtype=float)
    for sum_rate, loads in tables:
        rho = 1.0
        for k in range(len(loads)):
            if loads[k] > 0.0:
                rho = min(rho, c[k] / loads[k])
        value = max(rho, 0.0) * sum_rate
        if value > best:
            best = value
    return best


def cof_multi_equation(h_matrix, snr: float, backhaul, cap: int = DEFAULT_CAP) -> float:
    """Sum-rate of multi-equation compute-and-forward.

    Every split of L equations across the K relays is tried (relay k
    decoding the first m_k successive minima of its effective lattice);
    splits whose stacked matrix is rank deficient are skipped. Returns 0
    when no split is decodable.
    """
    h = np.asarray(h_matrix, dtype=float)
    _check_inputs(h, snr, backhaul)
    return cof_from_tables(cof_prepare(h, snr, cap), backhaul)
