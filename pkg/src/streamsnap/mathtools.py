"""Harmonic numbers and the Riemann zeta function."""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError

EULER_GAMMA = 0.5772156649015329

_ZETA_TERMS = 10**6


def harmonic(n: int) -> float:
    """``H_n = sum_{i=1}^{n} 1/i`` (``H_0 = 0``)."""
    if n < 0:
        raise DomainError(f"harmonic number needs n >= 0, got {n}")
    if n == 0:
        return 0.0
    return math.fsum(1.0 / np.arange(1, n + 1, dtype=np.float64))


def harmonic_pow(n: int, a: float) -> float:
    """``H_{n,a} = sum_{i=1}^{n} i**-a``."""
    if n < 0:
        raise DomainError(f"harmonic number needs n >= 0, got {n}")
    if n == 0:
        return 0.0
    return math.fsum(np.arange(1, n + 1, dtype=np.float64) ** -float(a))


def zeta(s: float) -> float:
    """Riemann zeta for real ``s > 1``.

    Direct sum of the first 10**6 - 1 terms plus an Euler-Maclaurin tail
    ``sum_{k>=N} k**-s`` with three correction terms; the neglected term is
    below 1e-30 at N = 10**6 for any ``s > 1``.
    """
    s = float(s)
    if not s > 1.0:
        raise DomainError(f"zeta(s) needs s > 1, got {s}")
    N = _ZETA_TERMS
    head = math.fsum(np.arange(1, N, dtype=np.float64) ** -s)
    Nf = float(N)
    tail = (
        Nf ** (1.0 - s) / (s - 1.0)
        + 0.5 * Nf**-s
        + s * Nf ** (-s - 1.0) / 12.0
        - s * (s + 1.0) * (s + 2.0) * Nf ** (-s - 3.0) / 720.0
    )
    return head + tail
