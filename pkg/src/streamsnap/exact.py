"""Exact finite-n distribution of the snapshot age ``K_n`` and of ``L_n = n + 1 - K_n``.

Products of keep-probabilities ``1 - alpha_i`` are accumulated as sums of
``log1p(-alpha_i)``; a factor with ``alpha_i >= 1`` makes the product exactly
zero.  Single queries cost O(k); the ``*_table`` helpers return every ``k``
in one O(n) sweep.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError
from .sampler import Schedule, _check_index


def _check_k(n: int, k: int) -> tuple[int, int]:
    n = _check_index(n)
    if isinstance(k, bool) or int(k) != k or not 1 <= k <= n:
        raise DomainError(f"k must be an integer in [1, {n}], got {k!r}")
    return n, int(k)


def _keep_product(schedule: Schedule, lo: int, hi: int) -> float:
    """``prod_{i=lo}^{hi} (1 - alpha_i)``; empty product is 1."""
    logs = []
    for i in range(lo, hi + 1):
        a = schedule.alpha_at(i)
        if a >= 1.0:
            return 0.0
        logs.append(math.log1p(-a))
    return math.exp(math.fsum(logs))


def pmf(schedule: Schedule, n: int, k: int) -> float:
    """``Pr[K_n = k] = alpha_{n-k+1} * prod_{i=n-k+2}^{n} (1 - alpha_i)``."""
    n, k = _check_k(n, k)
    return schedule.alpha_at(n - k + 1) * _keep_product(schedule, n - k + 2, n)


def survival(schedule: Schedule, n: int, k: int) -> float:
    """``Pr[K_n >= k] = prod_{i=n-k+2}^{n} (1 - alpha_i)``."""
    n, k = _check_k(n, k)
    return _keep_product(schedule, n - k + 2, n)


def pmf_l(schedule: Schedule, n: int, k: int) -> float:
    """``Pr[L_n = k] = alpha_k * prod_{i=0}^{n-k-1} (1 - alpha_{n-i})``."""
    n, k = _check_k(n, k)
    return schedule.alpha_at(k) * _keep_product(schedule, k + 1, n)


def _log_keep(alphas: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        out = np.log1p(-np.minimum(alphas, 1.0))
    out[alphas >= 1.0] = -np.inf
    return out


def survival_table(schedule: Schedule, n: int) -> np.ndarray:
    """``S[k-1] = Pr[K_n >= k]`` for ``k = 1..n+1`` (last entry is 0)."""
    n = _check_index(n)
    lk = _log_keep(schedule.alphas(n))
    # log S(k) = sum_{i=n-k+2}^{n} log(1 - alpha_i): suffix sums of lk[1:]
    suffix = np.cumsum(lk[:0:-1])
    out = np.empty(n + 1)
    out[0] = 1.0
    out[1:n] = np.exp(suffix)
    out[n] = 0.0
    return out


def pmf_table(schedule: Schedule, n: int) -> np.ndarray:
    """``P[k-1] = Pr[K_n = k]`` for ``k = 1..n``."""
    n = _check_index(n)
    surv = survival_table(schedule, n)
    # alpha_{n-k+1} for k = 1..n is the alpha table reversed
    return schedule.alphas(n)[::-1] * surv[:n]


def pmf_l_table(schedule: Schedule, n: int) -> np.ndarray:
    """``P[k-1] = Pr[L_n = k]`` for ``k = 1..n``."""
    return pmf_table(schedule, n)[::-1].copy()


def expected_k_sequence(schedule: Schedule, n: int) -> np.ndarray:
    """``[E K_1, ..., E K_n]`` from ``E K_{m+1} = 1 + (1 - alpha_{m+1}) E K_m``."""
    n = _check_index(n)
    al = schedule.alphas(n)
    out = np.empty(n)
    e = 1.0
    out[0] = e
    for m in range(1, n):
        e = 1.0 + (1.0 - al[m]) * e
        out[m] = e
    return out


def expected_l_sequence(schedule: Schedule, n: int) -> np.ndarray:
    """``[E L_1, ..., E L_n]``.

    Uses ``E L_{m+1} = (m+1) alpha_{m+1} + (1 - alpha_{m+1}) E L_m``, which is
    the K recurrence rewritten for ``L = n + 1 - K``.  It avoids the
    cancellation in ``(n+1) - E K_n`` when ``E K_n`` is close to ``n``.
    """
    n = _check_index(n)
    al = schedule.alphas(n)
    out = np.empty(n)
    e = 1.0
    out[0] = e
    for m in range(1, n):
        a = al[m]
        e = (m + 1) * a + (1.0 - a) * e
        out[m] = e
    return out


def expected_k(schedule: Schedule, n: int) -> float:
    return float(expected_k_sequence(schedule, n)[-1])


def expected_l(schedule: Schedule, n: int) -> float:
    return float(expected_l_sequence(schedule, n)[-1])
