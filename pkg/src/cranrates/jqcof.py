"""Joint quantized compute-and-forward: equation plus signal forwarding.

Each relay k forms the 2xL stacked observation

    hbar_k = [ a_k / sqrt(epsilon) ;  h_k ]

(a noiseless scaled copy of its decoded integer equation on top of its raw
received signal) and Wyner-Ziv-compresses the pair within backhaul C_k,
splitting the budget across the two eigen-streams of the conditional
covariance K_theta by water-filling. The central processor accumulates the
compressed observations and recovers the users by MMSE successive
cancellation; setting every a_k = 0 recovers plain successive Wyner-Ziv
forwarding of the raw signals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lattice import DEFAULT_CAP, DEFAULT_DELTA, best_equation_lll, enumerate_equations
from .numerics import cholesky_lower, sym_eig2
from .qcof import _flat_to_choice, _rco_many, computational_rate

__all__ = [
    "JqcofEvaluation",
    "jqcof_evaluate",
    "jqcof_optimize",
    "waterfill",
]

_CHUNK = 1 << 17


@dataclass(frozen=True)
class JqcofEvaluation:
    """Rates and per-relay compression quantities for one equation matrix.

    For each relay: lam are the eigenvalues of K_theta (descending), eta
    the inverse quantization-noise levels per eigen-stream, u the 2x2
    eigenvector matrix, split the backhaul spent per stream, mu the water
    level. rco holds the equation decoding rates (+inf for zero rows).
    """

    a: np.ndarray
    r: np.ndarray
    sum_rate: float
    lam: np.ndarray
    eta: np.ndarray
    u: np.ndarray
    split: np.ndarray
    g_diag: np.ndarray
    mu: np.ndarray
    rco: np.ndarray


def _waterfill_batch(lam: np.ndarray, c: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized water-filling over rows of lam (n, 2) with budgets c (n,).

    Solves sum_j 0.5*log2(1 + eta_j lam_j) = c for the water level mu with
    eta_j(mu) = ((1/mu)(1 - 1/lam_j) - 1)+. Substituting x_j = 1 + eta_j
    lam_j turns the active-stream equations into x_j = (lam_j - 1)(1-mu)/mu,
    so the problem has a closed form: with T = 2^(2c),

      both streams active:  x_j = (lam_j - 1) * s,  s = sqrt(T / prod_j (lam_j - 1))
      one stream active:    x_big = T

    and the stronger stream carries everything exactly when T*(lam_min - 1)
    <= lam_max - 1. Solving for x rather than mu keeps the result accurate
    for the huge eigenvalues the scaled equation component produces, where
    mu sits within 1e-8 of 1 and no representable mu could meet the budget.
    Rows with c = 0 or both lam <= 1 are inactive: eta = 0, mu = 1.
    """
    lam = np.maximum(np.asarray(lam, dtype=float), 1.0)
    c = np.asarray(c, dtype=float)
    big = lam.max(axis=1)
    small = lam.min(axis=1)
    active = (c > 0.0) & (big > 1.0)
    target_m1 = np.expm1(2.0 * c * math.log(2.0))
    target = target_m1 + 1.0
    both = active & (target * (small - 1.0) > big - 1.0)
    # one active stream: 1 + eta*lam_max = T, water level from eta
    eta_big_one = target_m1 / big
    mu_one = (big - 1.0) / (big + target_m1)
    # two active streams: x_j - 1 = (lam_j - 1)*s - 1 > 0 on this branch
    denom = np.where(both, (big - 1.0) * (small - 1.0), 1.0)
    s = np.sqrt(target / denom)
    eta_big_two = np.maximum((big - 1.0) * s - 1.0, 0.0) / big
    eta_small_two = np.maximum((small - 1.0) * s - 1.0, 0.0) / small
    mu_two = 1.0 / (1.0 + s)
    eta_big = np.where(active, np.where(both, eta_big_two, eta_big_one), 0.0)
    eta_small = np.where(both, eta_small_two, 0.0)
    mu = np.where(active, np.where(both, mu_two, mu_one), 1.0)
    first_is_big = lam[:, 0] >= lam[:, 1]
    eta = np.where(
        first_is_big[:, None],
        np.stack([eta_big, eta_small], axis=1),
        np.stack([eta_small, eta_big], axis=1),
    )
    return eta, mu


def waterfill(lam, c: float) -> tuple[np.ndarray, float]:
    """Backhaul split across the two eigen-streams of one relay.

    lam entries below 1 are clamped to 1 (a stream carrying no signal
    variance gets nothing). Returns (eta, mu) with eta_j >= 0 and
    sum_j 0.5*log2(1 + eta_j lam_j) equal to c up to rounding whenever any
    stream is active.
    """
    lam = np.asarray(lam, dtype=float)
    if lam.shape != (2,):
        raise ValueError(f"lam must be a pair, got shape {lam.shape}")
    if not np.all(np.isfinite(lam)):
        raise ValueError(f"lam must be finite, got {lam}")
    if not (np.isfinite(c) and c >= 0.0):
        raise ValueError(f"backhaul must be finite and nonnegative, got {c}")
    eta, mu = _waterfill_batch(lam[None, :], np.array([c]))
    return eta[0], float(mu[0])


def jqcof_evaluate(h_matrix, a_matrix, snr: float, backhaul, epsilon: float) -> JqcofEvaluation:
    """Rates achieved by the given equation matrix (rows may be zero).

    Forward recursion in relay index order: each relay's K_theta is taken
    against the running posterior covariance of the users given all
    previously compressed observations, so later relays spend their
    backhaul on what is still unknown.
    """
    h = np.asarray(h_matrix, dtype=float)
    a = np.asarray(a_matrix, dtype=np.int64)
    relays, users = a.shape
    if h.shape != (relays, users):
        raise ValueError(f"channel shape {h.shape} does not match equations {a.shape}")
    if not snr > 0.0:
        raise ValueError(f"snr must be positive, got {snr}")
    if not epsilon > 0.0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if len(backhaul) != relays:
        raise ValueError(f"backhaul has {len(backhaul)} entries for {relays} relays")
    root_eps = math.sqrt(epsilon)
    lam = np.zeros((relays, 2))
    eta = np.zeros((relays, 2))
    u = np.zeros((relays, 2, 2))
    mu = np.zeros(relays)
    acc = np.zeros((users, users))
    kx = snr * np.eye(users)
    for k in range(relays):
        hbar = np.vstack([a[k].astype(float) / root_eps, h[k]])
        k_theta = hbar @ kx @ hbar.T + np.eye(2)
        u[k], lam[k] = sym_eig2(k_theta)
        eta[k], mu[k] = waterfill(lam[k], float(backhaul[k]))
        w = (u[k] * (eta[k] / (1.0 + eta[k]))) @ u[k].T
        acc += hbar.T @ w @ hbar
        kx = np.linalg.inv(np.eye(users) / snr + acc)
    m = np.eye(users) + snr * acc
    g = cholesky_lower(m)
    g_diag = np.diag(g).copy()
    sic = np.maximum(np.log2(g_diag), 0.0)
    rco = np.full(relays, np.inf)
    eq_cap = np.full(users, np.inf)
    for k in range(relays):
        if np.any(a[k]):
            rco[k] = computational_rate(h[k], a[k], snr)
            covered = a[k] != 0
            eq_cap[covered] = np.minimum(eq_cap[covered], rco[k])
    r = np.minimum(eq_cap, sic)
    split = 0.5 * np.log2(1.0 + eta * np.maximum(lam, 1.0))
    return JqcofEvaluation(
        a=a,
        r=r,
        sum_rate=float(r.sum()),
        lam=lam,
        eta=eta,
        u=u,
        split=split,
        g_diag=g_diag,
        mu=mu,
        rco=rco,
    )


def _eig2_w_batch(t00, t01, t11):
    """Unit eigenvector pairs for batched symmetric 2x2 matrices.

    Returns (v1, v2), each (n, 2), ordered to match the descending
    eigenvalue convention used by the water-fill.
    """
    gap = 0.5 * (t00 - t11)
    rad = np.hypot(gap, t01)
    x = np.where(gap >= 0.0, gap + rad, t01)
    y = np.where(gap >= 0.0, t01, rad - gap)
    norm = np.hypot(x, y)
    # isotropic blocks have no preferred basis; any orthonormal pair works
    flat = norm == 0.0
    x = np.where(flat, 1.0, x / np.where(flat, 1.0, norm))
    y = np.where(flat, 0.0, y / np.where(flat, 1.0, norm))
    return np.stack([x, y], axis=1), np.stack([-y, x], axis=1)


def _jqcof_product_search(h, snr, backhaul, epsilon, cands, rcos, chunk=_CHUNK):
    """Argmax of the batched sum-rate over the Cartesian candidate product.

    Replays the evaluation recursion with the posterior covariance kept as
    a running inverse: each relay contributes two rank-1 Sherman-Morrison
    updates, one per eigen-stream of its compression weight matrix. Ties
    keep the first flat index. Returns the winning (K, L) integer matrix.
    """
    relays, users = len(cands), h.shape[1]
    sizes = [len(c) for c in cands]
    total = math.prod(sizes)
    root_eps = math.sqrt(epsilon)
    eye = np.eye(users)
    best_val = -math.inf
    best_flat = -1
    for start in range(0, total, chunk):
        flat = np.arange(start, min(start + chunk, total), dtype=np.int64)
        choice = _flat_to_choice(flat, sizes)
        n = flat.size
        kx = np.broadcast_to(snr * eye, (n, users, users)).copy()
        s = np.zeros((n, users, users))
        eq_cap = np.full((n, users), np.inf)
        cvec = np.empty(n)
        for k in range(relays):
            rows = cands[k][choice[k]]
            ak = rows.astype(float) / root_eps
            hk = h[k]
            kx_a = np.einsum("nij,nj->ni", kx, ak)
            kx_h = kx @ hk
            t00 = np.einsum("ni,ni->n", ak, kx_a) + 1.0
            t01 = kx_a @ hk
            t11 = kx_h @ hk + 1.0
            mean = 0.5 * (t00 + t11)
            rad = np.hypot(0.5 * (t00 - t11), t01)
            lam = np.stack([mean + rad, mean - rad], axis=1)
            cvec[:] = float(backhaul[k])
            eta, _ = _waterfill_batch(lam, cvec)
            wgt = eta / (1.0 + eta)
            v1, v2 = _eig2_w_batch(t00, t01, t11)
            for j, v in enumerate((v1, v2)):
                z = v[:, 0:1] * ak + v[:, 1:2] * hk
                wj = wgt[:, j]
                s += wj[:, None, None] * z[:, :, None] * z[:, None, :]
                kz = np.einsum("nij,nj->ni", kx, z)
                denom = 1.0 + wj * np.einsum("ni,ni->n", z, kz)
                kx -= (wj / denom)[:, None, None] * kz[:, :, None] * kz[:, None, :]
            rk = rcos[k][choice[k]]
            eq_cap = np.where(rows != 0, np.minimum(eq_cap, rk[:, None]), eq_cap)
        g = np.linalg.cholesky(eye + snr * s)
        sic = np.maximum(np.log2(np.diagonal(g, axis1=1, axis2=2)), 0.0)
        vals = np.minimum(eq_cap, sic).sum(axis=1)
        local = int(np.argmax(vals))
        if vals[local] > best_val:
            best_val = float(vals[local])
            best_flat = start + local
    choice = _flat_to_choice(np.array([best_flat]), sizes)
    return np.stack([cands[k][int(choice[k][0])] for k in range(relays)])


def jqcof_optimize(
    h_matrix,
    snr: float,
    backhaul,
    epsilon: float,
    method: str = "exhaustive",
    cap: int = DEFAULT_CAP,
    delta: float = DEFAULT_DELTA,
) -> JqcofEvaluation:
    """Best equation matrix for the channel under the chosen search.

    exhaustive: per-relay candidates are the zero row (pure signal
    forwarding) followed by every vector inside the rate-positive ball,
    scored over the full Cartesian product with a first-in-order tie-break.
    lll: one reduction per relay, compared against the all-zero matrix so
    the result is never worse than plain signal forwarding.
    """
    h = np.asarray(h_matrix, dtype=float)
    relays, users = h.shape
    if method == "lll":
        a = np.stack([best_equation_lll(h[k], snr, delta) for k in range(relays)])
        best = jqcof_evaluate(h, a, snr, backhaul, epsilon)
        fallback = jqcof_evaluate(h, np.zeros_like(a), snr, backhaul, epsilon)
        return fallback if fallback.sum_rate > best.sum_rate else best
    if method != "exhaustive":
        raise ValueError(f"unknown search method {method!r}")
    cands = []
    rcos = []
    for k in range(relays):
        nonzero = enumerate_equations(h[k], snr, cap)
        cands.append(np.vstack([np.zeros((1, users), dtype=np.int64), nonzero]))
        rcos.append(np.concatenate([[np.inf], _rco_many(h[k], nonzero, snr)]))
    a = _jqcof_product_search(h, snr, backhaul, epsilon, cands, rcos)
    return jqcof_evaluate(h, a, snr, backhaul, epsilon)
