"""Batch simulation kernels returning the retained position of many samplers.

Two interchangeable engines:

``literal``
    Replays the update rule item by item.  Stream ``j`` replaces at item
    ``i`` iff ``rng.uniform(keys[j], i) < alpha_i``, which is exactly what
    :class:`~streamsnap.sampler.SnapshotSampler` and
    :class:`~streamsnap.ensemble.Ensemble` do, so results are bit-identical to
    running those objects.  Cost O(n * streams).

``event``
    Jumps from one replacement to the next.  With ``c(m) = sum log(1 - alpha_i)``
    the next replacement after ``t`` is the first ``m`` with
    ``c(m) - c(t) < log V`` for a fresh uniform ``V``, which has the same law
    as stepping.  Cost O(replacements * log n) per stream.  Draws use a
    different counter layout, so only the distribution (not the sample path)
    matches the literal engine.

Both start at the last index with ``alpha_i >= 1``: every stream replaces
there, so nothing earlier can influence the final state.
"""

from __future__ import annotations

import numpy as np

from . import rng
from .errors import DomainError
from .sampler import Schedule

ENGINES = ("literal", "event")

_CHUNK = 1 << 16


def last_forced_index(alphas: np.ndarray) -> int:
    """Largest 1-based index with ``alpha >= 1`` (at least 1)."""
    forced = np.flatnonzero(alphas >= 1.0)
    return int(forced[-1]) + 1 if forced.size else 1


def _check(n: int, keys: np.ndarray) -> np.ndarray:
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    return np.ascontiguousarray(keys, dtype=np.uint64)


def literal_positions(schedule: Schedule, n: int, keys: np.ndarray) -> np.ndarray:
    """Retained 1-based positions after ``n`` items, stepping every item."""
    keys = _check(n, keys)
    al = schedule.alphas(n)
    start = last_forced_index(al)
    # (r >> 11) < t  <=>  r < t << 11, valid while t < 2**53 (alpha < 1)
    thresholds = [rng.threshold53(float(a)) << 11 for a in al]
    out = np.empty(keys.shape[0], dtype=np.int64)
    for lo in range(0, keys.shape[0], _CHUNK):
        ks = keys[lo : lo + _CHUNK]
        pos = np.full(ks.shape[0], start, dtype=np.int64)
        z = np.empty_like(ks)
        hit = np.empty(ks.shape[0], dtype=bool)
        for i in range(start + 1, n + 1):
            t = thresholds[i - 1]
            if t == 0:
                continue
            rng.raw64_array(ks, i, out=z)
            np.less(z, np.uint64(t), out=hit)
            pos[hit] = i
        out[lo : lo + _CHUNK] = pos
    return out


def event_positions(schedule: Schedule, n: int, keys: np.ndarray) -> np.ndarray:
    """Retained 1-based positions after ``n`` items, jumping between replacements."""
    keys = _check(n, keys)
    al = schedule.alphas(n)
    start = last_forced_index(al)
    with np.errstate(divide="ignore"):
        steps = -np.log1p(-al[start:n])
    # neg_c[j] = -sum_{i=start+1}^{start+j} log(1 - alpha_i); non-decreasing
    neg_c = np.concatenate(([0.0], np.cumsum(steps)))
    horizon = n - start

    offset = np.zeros(keys.shape[0], dtype=np.int64)
    active = np.arange(keys.shape[0])
    draw = 0
    while active.size:
        draw += 1
        u = rng.uniform_array(keys[active], draw)
        target = neg_c[offset[active]] - np.log1p(-u)
        nxt = np.searchsorted(neg_c, target, side="right")
        hit = nxt <= horizon
        active = active[hit]
        offset[active] = nxt[hit]
    return offset + start


def positions(schedule: Schedule, n: int, keys: np.ndarray, engine: str = "literal") -> np.ndarray:
    if engine == "literal":
        return literal_positions(schedule, n, keys)
    if engine == "event":
        return event_positions(schedule, n, keys)
    raise ValueError(f"unknown engine {engine!r}; expected one of {ENGINES}")
