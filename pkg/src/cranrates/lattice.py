"""Integer equation-coefficient machinery.

A relay decoding the integer combination sum_l a_l x_l of the user signals
pays a noise penalty governed by the lattice metric |F^T a|, where F is the
lower Cholesky factor of (I + snr h h^T)^-1. This module builds F, reduces
bases with LLL, enumerates every coefficient vector inside the rate-positive
ball |a|^2 <= 1 + snr |h|^2, and extracts successive minima of the metric.

Coefficient vectors are int64 arrays in canonical sign form (first nonzero
entry positive): a and -a always achieve the same rate, so only one
representative per sign class is ever produced.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .numerics import cholesky_lower

__all__ = [
    "Basis",
    "BoundTooLarge",
    "InsufficientIndependentVectors",
    "SingularBasis",
    "best_equation_lll",
    "effective_basis",
    "enumerate_equations",
    "lll_reduce",
    "successive_equations",
]

DEFAULT_DELTA = 0.75
DEFAULT_CAP = 10_000_000

# Gram-Schmidt norms below this signal a numerically dependent basis
_GS_NORM_FLOOR = 1e-14


class SingularBasis(ValueError):
    """Basis rows are numerically linearly dependent."""


class BoundTooLarge(RuntimeError):
    """Exhaustive enumeration would exceed the candidate cap."""


class InsufficientIndependentVectors(RuntimeError):
    """The enumeration ball holds fewer independent vectors than requested."""


@dataclass(frozen=True)
class Basis:
    """Reduced lattice basis: rows of b are the basis vectors, and t is the
    accumulated integer unimodular transform with b = t @ original."""

    b: np.ndarray
    t: np.ndarray


def canonical_sign(a) -> np.ndarray:
    """Flip a so its first nonzero entry is positive."""
    a = np.asarray(a, dtype=np.int64).copy()
    for x in a:
        if x != 0:
            if x < 0:
                a = -a
            break
    return a


def effective_basis(h, snr: float) -> np.ndarray:
    """Lower-triangular F with F F^T = (I + snr h h^T)^-1.

    The inverse is a rank-1 downdate of the identity (Sherman-Morrison),
    well-conditioned for every h.
    """
    h = np.asarray(h, dtype=float)
    if not snr > 0.0:
        raise ValueError(f"snr must be positive, got {snr}")
    scale = snr / (1.0 + snr * float(h @ h))
    return cholesky_lower(np.eye(h.size) - scale * np.outer(h, h))


def _gram_schmidt(b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = b.shape[0]
    bstar = np.zeros_like(b)
    mu = np.zeros((n, n))
    norms2 = np.zeros(n)
    for i in range(n):
        v = b[i].copy()
        for j in range(i):
            mu[i, j] = (b[i] @ bstar[j]) / norms2[j]
            v -= mu[i, j] * bstar[j]
        bstar[i] = v
        norms2[i] = float(v @ v)
        if norms2[i] < _GS_NORM_FLOOR**2:
            raise SingularBasis(f"Gram-Schmidt norm underflow at row {i}")
    return norms2, mu


def lll_reduce(basis, delta: float = DEFAULT_DELTA) -> Basis:
    """LLL-reduce the lattice spanned by the rows of `basis`.

    Returns Basis(b, t) with t integer unimodular and b = t @ basis exactly.
    The output is size-reduced (|mu_ij| <= 1/2) and satisfies the Lovasz
    condition with the given delta. Deterministic: size reduction rounds
    half-up and swaps always happen at the lowest violating index.
    """
    if not 0.25 < delta <= 1.0:
        raise ValueError(f"delta must lie in (0.25, 1], got {delta}")
    original = np.array(basis, dtype=float)
    if original.ndim != 2 or original.shape[0] > original.shape[1]:
        raise ValueError(f"basis rows must be independent vectors, got shape {original.shape}")
    b = original.copy()
    n = b.shape[0]
    t = np.eye(n, dtype=np.int64)
    norms2, mu = _gram_schmidt(b)
    k = 1
    steps = 0
    max_steps = 4096 * n * n + 4096
    while k < n:
        steps += 1
        if steps > max_steps:
            # only reachable at delta ~ 1 where float noise can stall progress
            raise RuntimeError("LLL failed to converge")
        for j in range(k - 1, -1, -1):
            q = math.floor(mu[k, j] + 0.5)
            if q:
                b[k] -= q * b[j]
                t[k] -= q * t[j]
                mu[k, :j] -= q * mu[j, :j]
                mu[k, j] -= q
        if norms2[k] >= (delta - mu[k, k - 1] ** 2) * norms2[k - 1]:
            k += 1
        else:
            b[[k - 1, k]] = b[[k, k - 1]]
            t[[k - 1, k]] = t[[k, k - 1]]
            norms2, mu = _gram_schmidt(b)
            k = max(k - 1, 1)
    return Basis(b=t.astype(float) @ original, t=t)


def best_equation_lll(h, snr: float, delta: float = DEFAULT_DELTA) -> np.ndarray:
    """Approximately shortest coefficient vector under the metric |F^T a|.

    Reduces the rows of F (whose row span is isometric to the lattice
    {F^T a : a integer}) and reads the coefficients off the integer
    transform, so no float-to-integer rounding is involved. Ties are broken
    by smaller integer norm, then lexicographically.
    """
    f = effective_basis(h, snr)
    reduced = lll_reduce(f, delta)
    metrics = np.einsum("ij,ij->i", reduced.b, reduced.b)
    best_key = None
    best = None
    for i in range(reduced.t.shape[0]):
        cand = canonical_sign(reduced.t[i])
        key = (
            float(metrics[i]),
            int(cand @ cand),
            tuple(int(x) for x in cand),
        )
        if best_key is None or key < best_key:
            best_key = key
            best = cand
    return best


def _ball(dim: int, bound: float, cap: int) -> list[tuple[int, tuple[int, ...]]]:
    """Sign-class representatives a with 0 < |a|^2 <= bound.

    Returns (|a|^2, a) pairs, unsorted. The squared norm is an exact integer
    compared directly against the float bound, so no candidate on the
    boundary is ever lost to rounding.
    """
    if bound < 1.0:
        return []
    radius = math.isqrt(int(bound))
    box = (2 * radius + 1) ** dim
    if (box - 1) // 2 > cap:
        raise BoundTooLarge(
            f"about {(box - 1) // 2} candidates exceed the cap of {cap}"
        )
    found: list[tuple[int, tuple[int, ...]]] = []
    prefix = [0] * dim

    def walk(pos: int, sumsq: int, seen_nonzero: bool) -> None:
        if pos == dim:
            if seen_nonzero:
                found.append((sumsq, tuple(prefix)))
            return
        r = math.isqrt(int(bound - sumsq))
        lo = 0 if not seen_nonzero else -r
        for v in range(lo, r + 1):
            s2 = sumsq + v * v
            if s2 <= bound:
                prefix[pos] = v
                walk(pos + 1, s2, seen_nonzero or v != 0)
        prefix[pos] = 0

    walk(0, 0, False)
    return found


def enumerate_equations(h, snr: float, cap: int = DEFAULT_CAP) -> np.ndarray:
    """All coefficient candidates with |a|^2 <= 1 + snr |h|^2.

    Returns an (n, L) int64 array: one representative per sign class,
    sorted by (|a|^2, lexicographic). Vectors outside this ball always have
    zero computational rate, so the search space is complete.
    """
    h = np.asarray(h, dtype=float)
    if not snr > 0.0:
        raise ValueError(f"snr must be positive, got {snr}")
    bound = 1.0 + snr * float(h @ h)
    found = _ball(h.size, bound, cap)
    found.sort()
    return np.array([vec for _, vec in found], dtype=np.int64).reshape(len(found), h.size)


def _reduce_against(rows: list[list[Fraction]], vec) -> list[Fraction] | None:
    """Eliminate vec against an echelon set of Fraction rows.

    Returns the nonzero remainder (vec is independent) or None. Exact over
    the rationals, so integer candidates are never misjudged by float rank.
    """
    v = [Fraction(int(x)) for x in vec]
    for row in rows:
        lead = next(i for i, x in enumerate(row) if x != 0)
        if v[lead] != 0:
            factor = v[lead] / row[lead]
            v = [a - factor * b for a, b in zip(v, row)]
    if any(x != 0 for x in v):
        return v
    return None


def successive_equations(h, snr: float, m: int, cap: int = DEFAULT_CAP) -> list[np.ndarray]:
    """Greedy successive minima of the metric |F^T a|.

    Walks the candidate ball in increasing metric and keeps the next vector
    linearly independent (over the rationals) of those already kept, until m
    vectors are found. Ties are broken by (integer norm, lexicographic).
    """
    h = np.asarray(h, dtype=float)
    if not 1 <= m <= h.size:
        raise ValueError(f"need 1 <= m <= {h.size}, got {m}")
    f = effective_basis(h, snr)
    base_bound = 1.0 + snr * float(h @ h)
    for bound in (base_bound, 2.0 * base_bound):
        found = _ball(h.size, bound, cap)
        cands = np.array([vec for _, vec in found], dtype=np.int64).reshape(len(found), h.size)
        metrics = np.einsum("ij,ij->i", cands.astype(float) @ f, cands.astype(float) @ f)
        order = sorted(
            range(len(found)),
            key=lambda i: (float(metrics[i]), found[i][0], found[i][1]),
        )
        chosen: list[np.ndarray] = []
        echelon: list[list[Fraction]] = []
        for i in order:
            remainder = _reduce_against(echelon, cands[i])
            if remainder is not None:
                echelon.append(remainder)
                chosen.append(canonical_sign(cands[i]))
                if len(chosen) == m:
                    return chosen
    raise InsufficientIndependentVectors(
        f"found {len(chosen)} independent vectors, needed {m}"
    )


def integer_rank(matrix) -> int:
    """Rank of an integer matrix over the rationals, computed exactly."""
    echelon: list[list[Fraction]] = []
    for row in np.asarray(matrix, dtype=np.int64):
        remainder = _reduce_against(echelon, row)
        if remainder is not None:
            echelon.append(remainder)
    return len(echelon)
