"""Quantized compute-and-forward rate evaluation and coefficient search.

Each relay k decodes one integer combination a_k of the user signals, then
Wyner-Ziv-compresses the decoded equation at its backhaul rate C_k. The
central processor decompresses the equations in index order (each step
aided by the previously recovered ones) and recovers the users by MMSE
successive cancellation. Per-user rates:

    r_l = min( min_{k: a_kl != 0} rco_k , 0.5*log2 g_ll^2 )

where rco_k is the computational rate of relay k's equation and g is the
lower Cholesky factor of I + snr * A^T Sigma^-1 A with Sigma the diagonal
of compression noise variances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lattice import DEFAULT_CAP, DEFAULT_DELTA, best_equation_lll, enumerate_equations
from .numerics import cholesky_lower, log2_plus

__all__ = [
    "QcofEvaluation",
    "ZeroCoefficient",
    "compression_noises",
    "computational_rate",
    "qcof_evaluate",
    "qcof_optimize",
]

_CHUNK = 1 << 17


class ZeroCoefficient(ValueError):
    """An all-zero coefficient vector where an equation is required."""


@dataclass(frozen=True)
class QcofEvaluation:
    """Rates and intermediate quantities for one equation matrix.

    sigma holds the per-relay compression noise variances (+inf where
    C_k = 0), nu the equation MMSEs they derive from, g_diag the successive
    cancellation Cholesky diagonal, and rco the per-relay computational
    rates.
    """

    a: np.ndarray
    r: np.ndarray
    sum_rate: float
    sigma: np.ndarray
    nu: np.ndarray
    g_diag: np.ndarray
    rco: np.ndarray


def computational_rate(h, a, snr: float) -> float:
    """Highest rate at which the combination a is decodable from channel h.

    Evaluates 0.5*log2+( snr / (a^T (snr^-1 I + h h^T)^-1 a) ) through the
    rank-1 inverse identity, so no matrix is ever formed.
    """
    h = np.asarray(h, dtype=float)
    a = np.asarray(a, dtype=float)
    if not np.any(a):
        raise ZeroCoefficient("coefficient vector is all zero")
    if not snr > 0.0:
        raise ValueError(f"snr must be positive, got {snr}")
    denom = snr * float(a @ a) - snr**2 * float(h @ a) ** 2 / (1.0 + snr * float(h @ h))
    return 0.5 * log2_plus(snr / denom)


def _rco_many(h, cands: np.ndarray, snr: float) -> np.ndarray:
    """computational_rate for every row of cands, vectorized."""
    af = cands.astype(float)
    denom = snr * np.einsum("ij,ij->i", af, af)
    denom -= snr**2 * (af @ h) ** 2 / (1.0 + snr * float(h @ h))
    arg = snr / denom
    return 0.5 * np.where(arg > 1.0, np.log2(np.maximum(arg, 1.0)), 0.0)


def compression_noises(a_matrix, snr: float, backhaul) -> tuple[np.ndarray, np.ndarray]:
    """Wyner-Ziv noise variances sigma_k^2 and the equation MMSEs nu_k.

    Decompression runs in fixed order 1..K; every recovered equation
    sharpens the side information for the next, so nu_k is taken against
    the running posterior of the user signals given equations 1..k-1.
    sigma_k^2 = nu_k / (2^(2 C_k) - 1); C_k = 0 gives an infinite variance
    and the relay drops out of the running update.
    """
    a = np.asarray(a_matrix, dtype=np.int64)
    relays, users = a.shape
    if len(backhaul) != relays:
        raise ValueError(f"backhaul has {len(backhaul)} entries for {relays} relays")
    if not snr > 0.0:
        raise ValueError(f"snr must be positive, got {snr}")
    for k in range(relays):
        if not np.any(a[k]):
            raise ZeroCoefficient(f"row {k} of the equation matrix is all zero")
    af = a.astype(float)
    # running inverse of (snr^-1 I + sum_j a_j a_j^T / sigma_j^2)
    p = snr * np.eye(users)
    nu = np.zeros(relays)
    sigma = np.zeros(relays)
    for k in range(relays):
        pa = p @ af[k]
        nu[k] = float(af[k] @ pa)
        gain = 2.0 ** (2.0 * float(backhaul[k])) - 1.0
        if gain <= 0.0:
            sigma[k] = math.inf
            continue
        sigma[k] = nu[k] / gain
        p -= np.outer(pa, pa) / (sigma[k] + nu[k])
    return sigma, nu


def qcof_evaluate(h_matrix, a_matrix, snr: float, backhaul) -> QcofEvaluation:
    """Rates achieved by the given equation matrix.

    A may be rank deficient; a user covered by no equation is limited only
    by its successive-cancellation term (which collapses to zero when its
    column is all zero).
    """
    h = np.asarray(h_matrix, dtype=float)
    a = np.asarray(a_matrix, dtype=np.int64)
    relays, users = a.shape
    sigma, nu = compression_noises(a, snr, backhaul)
    rco = np.array([computational_rate(h[k], a[k], snr) for k in range(relays)])
    af = a.astype(float)
    finite = np.isfinite(sigma)
    # Diagonal of the lower Cholesky factor of I + snr * A^T Sigma^-1 A,
    # read off a QR factorization of the stacked square root
    # [sqrt(snr/sigma) A; I]. Squaring into the normal matrix first would
    # square its conditioning, which grows like 2^(2 max C).
    b = np.sqrt(snr / sigma[finite])[:, None] * af[finite]
    stacked = np.vstack([b, np.eye(users)])
    g_diag = np.abs(np.diag(np.linalg.qr(stacked, mode="r")))
    # g_ll >= 1 holds exactly; the clamp only strips float dust
    sic = np.maximum(np.log2(g_diag), 0.0)
    eq_cap = np.full(users, np.inf)
    for l in range(users):
        involved = np.nonzero(a[:, l])[0]
        if involved.size:
            eq_cap[l] = rco[involved].min()
    r = np.minimum(eq_cap, sic)
    return QcofEvaluation(
        a=a,
        r=r,
        sum_rate=float(r.sum()),
        sigma=sigma,
        nu=nu,
        g_diag=g_diag,
        rco=rco,
    )


def _flat_to_choice(flat: np.ndarray, sizes: list[int]) -> list[np.ndarray]:
    """Decompose row-major flat product indices (last axis fastest)."""
    out: list[np.ndarray] = [None] * len(sizes)
    rem = flat
    for k in reversed(range(len(sizes))):
        out[k] = rem % sizes[k]
        rem = rem // sizes[k]
    return out


def _product_search(h, snr, backhaul, cands, rcos, chunk=_CHUNK):
    """Argmax of the batch sum-rate over the Cartesian candidate product.

    Per-chunk vectorized replay of the compression_noises/qcof_evaluate
    recursion (Sherman-Morrison running inverses, batched Cholesky). Ties
    keep the first flat index, i.e. first in enumeration order. Returns
    the winning (K, L) integer matrix.
    """
    relays, users = len(cands), h.shape[1]
    sizes = [len(c) for c in cands]
    total = math.prod(sizes)
    gains = [2.0 ** (2.0 * float(c)) - 1.0 for c in backhaul]
    eye = np.eye(users)
    best_val = -math.inf
    best_flat = -1
    for start in range(0, total, chunk):
        flat = np.arange(start, min(start + chunk, total), dtype=np.int64)
        choice = _flat_to_choice(flat, sizes)
        n = flat.size
        p = np.broadcast_to(snr * eye, (n, users, users)).copy()
        scaled_rows = []
        eq_cap = np.full((n, users), np.inf)
        for k in range(relays):
            rows = cands[k][choice[k]]
            af = rows.astype(float)
            pa = np.einsum("nij,nj->ni", p, af)
            nu = np.einsum("ni,ni->n", af, pa)
            if gains[k] > 0.0:
                sigma = nu / gains[k]
                p -= pa[:, :, None] * pa[:, None, :] / (sigma + nu)[:, None, None]
                scaled_rows.append(np.sqrt(snr / sigma)[:, None, None] * af[:, None, :])
            rk = rcos[k][choice[k]]
            eq_cap = np.where(rows != 0, np.minimum(eq_cap, rk[:, None]), eq_cap)
        # Same stacked-square-root Cholesky diagonal as qcof_evaluate.
        stacked = np.concatenate(
            scaled_rows + [np.broadcast_to(eye, (n, users, users))], axis=1
        )
        rfac = np.linalg.qr(stacked, mode="r")
        sic = np.maximum(
            np.log2(np.abs(np.diagonal(rfac, axis1=1, axis2=2))), 0.0
        )
        vals = np.minimum(eq_cap, sic).sum(axis=1)
        local = int(np.argmax(vals))
        if vals[local] > best_val:
            best_val = float(vals[local])
            best_flat = start + local
    choice = _flat_to_choice(np.array([best_flat]), sizes)
    return np.stack([cands[k][int(choice[k][0])] for k in range(relays)])


def qcof_optimize(
    h_matrix,
    snr: float,
    backhaul,
    method: str = "exhaustive",
    cap: int = DEFAULT_CAP,
    delta: float = DEFAULT_DELTA,
) -> QcofEvaluation:
    """Best equation matrix for the channel under the chosen search.

    exhaustive: every per-relay candidate inside the rate-positive ball,
    scored over the full Cartesian product (first-in-order tie-break).
    lll: one reduction per relay, a single evaluation.
    """
    h = np.asarray(h_matrix, dtype=float)
    relays = h.shape[0]
    if method == "lll":
        a = np.stack([best_equation_lll(h[k], snr, delta) for k in range(relays)])
        return qcof_evaluate(h, a, snr, backhaul)
    if method != "exhaustive":
        raise ValueError(f"unknown search method {method!r}")
    cands = [enumerate_equations(h[k], snr, cap) for k in range(relays)]
    rcos = [_rco_many(h[k], cands[k], snr) for k in range(relays)]
    a = _product_search(h, snr, backhaul, cands, rcos)
    return qcof_evaluate(h, a, snr, backhaul)
