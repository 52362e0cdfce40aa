"""Ensembles of independent snapshot samplers over one stream.

With ``M`` samplers on the uniform schedule the retained positions are ``M``
independent uniform points of the history, so every fraction ``f`` of the
stream has a snapshot near ``f * n`` with high probability.
:func:`coverage_size` picks ``M`` and :func:`quality` measures the worst gap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Sequence

import numpy as np

from . import engines, rng
from .errors import DomainError
from .sampler import Schedule, SnapshotState

DECILES = tuple(k / 10 for k in range(1, 10))


@dataclass(frozen=True)
class TargetSet:
    """Fractions of the stream length that snapshots should approximate."""

    fractions: tuple[float, ...] = DECILES

    def __post_init__(self) -> None:
        fr = tuple(float(f) for f in self.fractions)
        if not fr:
            raise DomainError("target set must not be empty")
        if any(not 0.0 < f < 1.0 for f in fr):
            raise DomainError(f"target fractions must lie in (0, 1), got {fr}")
        if any(b <= a for a, b in zip(fr, fr[1:])):
            raise DomainError(f"target fractions must be strictly increasing, got {fr}")
        object.__setattr__(self, "fractions", fr)

    @classmethod
    def parse(cls, text: str) -> "TargetSet":
        """Parse ``"0.1,0.5"`` or ``"1/10,5/10"`` style lists."""
        parts = [p.strip() for p in text.split(",") if p.strip()]
        try:
            values = [float(Fraction(p)) for p in parts]
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"bad target list {text!r}: {exc}") from None
        return cls(tuple(values))

    def __len__(self) -> int:
        return len(self.fractions)

    def __iter__(self):
        return iter(self.fractions)


def quality(positions: Sequence[int] | np.ndarray, n: int, targets: TargetSet = TargetSet()) -> float:
    """``Q = max_f min_j |f n - position_j| / n``.

    0 means every target is hit exactly; values near 0 mean every target
    fraction has a snapshot close by.
    """
    if n < 1:
        raise DomainError(f"quality needs n >= 1, got {n}")
    pos = np.sort(np.asarray(positions, dtype=np.float64))
    if pos.size == 0:
        raise DomainError("quality needs at least one snapshot")
    want = np.asarray(targets.fractions) * n
    idx = np.searchsorted(pos, want)
    right = pos[np.minimum(idx, pos.size - 1)]
    left = pos[np.maximum(idx - 1, 0)]
    gap = np.minimum(np.abs(want - left), np.abs(right - want))
    return float(gap.max() / n)


def coverage_size(epsilon: float, eta: float, num_targets: int = 9) -> int:
    """Smallest ``M >= 1`` with ``num_targets * (1 - 2 epsilon)**M <= eta``."""
    if not 0.0 < epsilon < 0.5:
        raise DomainError(f"epsilon must lie in (0, 1/2), got {epsilon}")
    if not 0.0 < eta < 1.0:
        raise DomainError(f"eta must lie in (0, 1), got {eta}")
    if isinstance(num_targets, bool) or int(num_targets) != num_targets or num_targets < 1:
        raise DomainError(f"num_targets must be a positive integer, got {num_targets}")
    q = 1.0 - 2.0 * epsilon

    def ok(m: int) -> bool:
        return num_targets * q**m <= eta

    m = max(1, math.ceil(math.log(eta / num_targets) / math.log(q)))
    # guard the float ceiling against off-by-one in either direction
    while m > 1 and ok(m - 1):
        m -= 1
    while not ok(m):
        m += 1
    return m


def uncovered_targets(positions: np.ndarray, n: int, epsilon: float, targets: TargetSet = TargetSet()) -> int:
    """Number of targets with no position ``a`` satisfying ``|a/n - f| < epsilon``."""
    pos = np.sort(np.asarray(positions, dtype=np.float64))
    missed = 0
    for f in targets:
        lo = np.searchsorted(pos, (f - epsilon) * n, side="right")
        hi = np.searchsorted(pos, (f + epsilon) * n, side="left")
        missed += hi <= lo
    return int(missed)


class Ensemble:
    """``M`` snapshot samplers sharing a schedule, advanced in lockstep.

    Member ``j`` draws from sub-stream ``(seed, j)``, using the item index as
    the counter.  Its trajectory is identical to
    ``SnapshotSampler(schedule, seed, j)`` fed the same items.
    """

    def __init__(self, schedule: Schedule, size: int, seed: int):
        if isinstance(size, bool) or int(size) != size or size < 1:
            raise DomainError(f"ensemble size must be a positive integer, got {size}")
        self.schedule = schedule
        self.seed = seed
        self.keys = rng.stream_keys(seed, int(size), "member")
        self.n = 0
        self.k = np.zeros(int(size), dtype=np.int64)
        self.payloads: list[Any] = [None] * int(size)
        self._z = np.empty_like(self.keys)
        self._hit = np.empty(int(size), dtype=bool)

    def __len__(self) -> int:
        return self.keys.shape[0]

    def update(self, item: Any) -> "Ensemble":
        """Advance every member by one item; returns ``self``."""
        n = self.n + 1
        a = self.schedule.alpha_at(n)
        if a >= 1.0:
            self._hit[:] = True
        else:
            rng.raw64_array(self.keys, n, out=self._z)
            np.less(self._z, np.uint64(rng.threshold53(a) << 11), out=self._hit)
        self.k += 1
        self.k[self._hit] = 1
        for j in np.flatnonzero(self._hit):
            self.payloads[j] = item
        self.n = n
        return self

    def extend(self, items: Iterable[Any]) -> "Ensemble":
        for item in items:
            self.update(item)
        return self

    @property
    def positions(self) -> np.ndarray:
        return self.n - self.k + 1

    @property
    def members(self) -> list[SnapshotState]:
        if self.n == 0:
            return [SnapshotState() for _ in range(len(self))]
        return [SnapshotState(self.n, int(k), p) for k, p in zip(self.k, self.payloads)]

    def quality(self, targets: TargetSet = TargetSet()) -> float:
        return quality(self.positions, self.n, targets)

    def records(self) -> list[dict]:
        """``{member, n, k, position, payload}`` rows in member order."""
        rows = []
        for j, state in enumerate(self.members):
            row = state.to_record(encode=_payload_bytes)
            rows.append({"member": j, **row})
        return rows


def _payload_bytes(payload: Any) -> bytes:
    if isinstance(payload, bytes):
        return payload
    return str(payload).encode("utf-8")


def ensemble_update(e: Ensemble, item: Any) -> Ensemble:
    return e.update(item)


@dataclass
class FinalPositions:
    """Retained positions of many independent ensembles after ``n`` items."""

    n: int
    positions: np.ndarray  # shape (runs, members)
    seeds: list[int] = field(default_factory=list)

    def qualities(self, targets: TargetSet = TargetSet()) -> np.ndarray:
        return np.array([quality(row, self.n, targets) for row in self.positions])


def simulate_ensembles(
    schedule: Schedule,
    n: int,
    size: int,
    seeds: Sequence[int],
    engine: str = "literal",
) -> FinalPositions:
    """Final member positions of one ensemble per seed.

    With ``engine="literal"`` row ``i`` equals
    ``Ensemble(schedule, size, seeds[i])`` fed ``n`` items.
    """
    domain = "member" if engine == "literal" else "member-event"
    keys = np.concatenate([rng.stream_keys(s, size, domain) for s in seeds])
    pos = engines.positions(schedule, n, keys, engine)
    return FinalPositions(n=n, positions=pos.reshape(len(seeds), size), seeds=list(seeds))
