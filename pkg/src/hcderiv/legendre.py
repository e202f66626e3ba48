"""Orthonormal Legendre polynomials on [-1, 1].

The basis is phi_k(t) = sqrt(k + 1/2) * P_k(t) with P_k the classical
Legendre polynomial, so that the phi_k are orthonormal in L2(-1, 1).
This module provides pointwise evaluation of phi_k and its derivatives,
stable series summation, and exact coefficient-space differentiation:
phi_k' expands over the lower-index phi_l of opposite parity,

    phi_k'(t) = 2 sqrt(k + 1/2) * sum_{l < k, k + l odd} sqrt(l + 1/2) phi_l(t),

which turns d/dt into a sparse linear map on coefficient sequences.

One-dimensional coefficient sequences are plain ``{index: value}`` dicts
with non-negative integer keys and finite float values; zero entries may
be present or omitted interchangeably.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

Coeffs1D = dict[int, float]

__all__ = [
    "Coeffs1D",
    "eval_phi",
    "eval_phi_derivative",
    "muller_differentiate",
    "muller_differentiate_iterated",
    "clenshaw_eval",
    "phi_vandermonde",
]


@lru_cache(maxsize=None)
def _w(k: int) -> float:
    """sqrt(k + 1/2), cached per index."""
    return math.sqrt(k + 0.5)


def _check_point(t: float) -> None:
    if not -1.0 <= t <= 1.0:
        raise ValueError(f"evaluation point {t!r} lies outside [-1, 1]")


def eval_phi(k: int, t: float) -> float:
    """Evaluate the orthonormal Legendre polynomial phi_k at t.

    Parameters
    ----------
    k : int
        Polynomial index, k >= 0.
    t : float
        Point in [-1, 1].

    Returns
    -------
    float
        phi_k(t) = sqrt(k + 1/2) P_k(t), computed by the three-term
        recurrence (i+1) P_{i+1} = (2i+1) t P_i - i P_{i-1}.
    """
    _check_point(t)
    if k < 0:
        raise ValueError("index k must be >= 0")
    if k == 0:
        return _w(0)
    p_prev, p = 1.0, t
    for i in range(1, k):
        p_prev, p = p, ((2 * i + 1) * t * p - i * p_prev) / (i + 1)
    return _w(k) * p


def eval_phi_derivative(k: int, r: int, t: float) -> float:
    """Evaluate the r-th derivative of phi_k at t.

    Marches the r-times differentiated three-term recurrence

        (i+1) P_{i+1}^(q) = (2i+1) (t P_i^(q) + q P_i^(q-1)) - i P_{i-1}^(q)

    for q = 0..r, which stays valid on the closed interval including the
    endpoints t = +-1.  Identically zero when k < r.
    """
    _check_point(t)
    if r < 1:
        raise ValueError("derivative order r must be >= 1")
    if k < 0:
        raise ValueError("index k must be >= 0")
    if k < r:
        return 0.0
    prev = [0.0] * (r + 1)
    cur = [0.0] * (r + 1)
    cur[0] = 1.0
    for i in range(k):
        nxt = [0.0] * (r + 1)
        for q in range(r + 1):
            term = t * cur[q] + (q * cur[q - 1] if q else 0.0)
            nxt[q] = ((2 * i + 1) * term - i * prev[q]) / (i + 1)
        prev, cur = cur, nxt
    return _w(k) * cur[r]


def muller_differentiate(a: Coeffs1D) -> Coeffs1D:
    """Differentiate a coefficient sequence once, exactly.

    Given f = sum_k a_k phi_k, returns the sequence b of f' = sum_l b_l phi_l,

        b_l = 2 sqrt(l + 1/2) * sum_{k > l, k + l odd} sqrt(k + 1/2) a_k,

    for 0 <= l < max index of ``a``.  Exact zeros are omitted from the
    result.  An empty input yields an empty output.
    """
    if not a:
        return {}
    kmax = max(a)
    if kmax == 0:
        return {}
    scaled = np.zeros(kmax + 1)
    for k, v in a.items():
        if k < 0:
            raise ValueError("coefficient indices must be >= 0")
        if not math.isfinite(v):
            raise ValueError(f"coefficient at index {k} is not finite: {v!r}")
        scaled[k] = _w(k) * v
    out: Coeffs1D = {}
    tail_even = 0.0
    tail_odd = 0.0
    # march l downward so the opposite-parity tail sums accumulate in O(kmax)
    for l in range(kmax - 1, -1, -1):
        k = l + 1
        if k % 2 == 0:
            tail_even += scaled[k]
        else:
            tail_odd += scaled[k]
        tail = tail_odd if l % 2 == 0 else tail_even
        if tail != 0.0:
            out[l] = float(2.0 * _w(l) * tail)
    return dict(sorted(out.items()))


def muller_differentiate_iterated(a: Coeffs1D, r: int) -> Coeffs1D:
    """Apply :func:`muller_differentiate` r times (r >= 1)."""
    if r < 1:
        raise ValueError("derivative order r must be >= 1")
    for _ in range(r):
        a = muller_differentiate(a)
    return a


def clenshaw_eval(a: Coeffs1D, t: float) -> float:
    """Evaluate sum_k a_k phi_k(t) by backward recurrence.

    Uses the Clenshaw scheme for the orthonormal recurrence
    phi_{k+1} = alpha_k t phi_k - c_k phi_{k-1}.
    """
    _check_point(t)
    if not a:
        return 0.0
    n = max(a)
    if n == 0:
        return a.get(0, 0.0) * _w(0)
    dense = np.zeros(n + 1)
    for k, v in a.items():
        dense[k] = v

    def alpha(k: int) -> float:
        return (2 * k + 1) / (k + 1) * _w(k + 1) / _w(k)

    def c(k: int) -> float:
        return k / (k + 1) * _w(k + 1) / _w(k - 1)

    b1 = 0.0
    b2 = 0.0
    for k in range(n, 0, -1):
        b1, b2 = dense[k] + alpha(k) * t * b1 - c(k + 1) * b2, b1
    return float((dense[0] - c(1) * b2) * _w(0) + b1 * _w(1) * t)


def phi_vandermonde(kmax: int, t: np.ndarray) -> np.ndarray:
    """Matrix V with V[i, k] = phi_k(t_i) for 0 <= k <= kmax."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if kmax < 0:
        raise ValueError("kmax must be >= 0")
    V = np.empty((t.size, kmax + 1))
    V[:, 0] = 1.0
    if kmax >= 1:
        V[:, 1] = t
    for i in range(1, kmax):
        V[:, i + 1] = ((2 * i + 1) * t * V[:, i] - i * V[:, i - 1]) / (i + 1)
    return V * np.array([_w(k) for k in range(kmax + 1)])
