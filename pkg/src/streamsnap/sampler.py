"""The on-line snapshot algorithm.

A sampler keeps one element of a stream together with its age ``k``.  When
the ``n``-th element arrives it replaces the stored one with probability
``alpha_n``; otherwise the age grows by one.  The schedule ``alpha_n``
decides where in the history the retained element tends to sit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Any, Iterable

import numpy as np

from . import rng
from .errors import DomainError, ScheduleRangeError


def _check_index(n: int) -> int:
    if isinstance(n, bool) or int(n) != n:
        raise DomainError(f"stream index must be an integer, got {n!r}")
    n = int(n)
    if n < 1:
        raise DomainError(f"stream index must be >= 1, got {n}")
    return n


class Schedule:
    """Replacement-probability schedule ``alpha_n``.

    Subclasses implement :meth:`_alpha` for ``n >= 2``; ``alpha_at(1)`` is
    always 1 so the first item is always retained.
    """

    def alpha_at(self, n: int) -> float:
        n = _check_index(n)
        if n == 1:
            return 1.0
        return self._alpha(n)

    def _alpha(self, n: int) -> float:  # pragma: no cover - abstract
        raise NotImplementedError

    def alphas(self, n: int) -> np.ndarray:
        """``[alpha_1, ..., alpha_n]`` as a read-only float array.

        Values are bit-identical to :meth:`alpha_at`.
        """
        if n < 0:
            raise DomainError(f"length must be >= 0, got {n}")
        return _alpha_table(self, int(n))

    @property
    def spec(self) -> str:  # pragma: no cover - abstract
        raise NotImplementedError

    def __str__(self) -> str:
        return self.spec


_ALPHA_TABLES: dict[Schedule, np.ndarray] = {}
_MAX_TABLES = 64


def _alpha_table(schedule: Schedule, n: int) -> np.ndarray:
    table = _ALPHA_TABLES.get(schedule)
    if table is None or table.shape[0] < n:
        size = max(n, 2 * table.shape[0]) if table is not None else n
        table = np.fromiter((schedule.alpha_at(i) for i in range(1, size + 1)), dtype=np.float64, count=size)
        table.setflags(write=False)
        if len(_ALPHA_TABLES) >= _MAX_TABLES:
            _ALPHA_TABLES.pop(next(iter(_ALPHA_TABLES)))
        _ALPHA_TABLES[schedule] = table
    return table[:n]


@dataclass(frozen=True)
class Uniform(Schedule):
    """``alpha_n = 1/n``: the retained element is uniform over the history."""

    def _alpha(self, n: int) -> float:
        return 1.0 / n

    @property
    def spec(self) -> str:
        return "uniform"


@dataclass(frozen=True)
class Constant(Schedule):
    """``alpha_n = 1/a`` for ``n > 1``; keeps an element a fixed distance back."""

    a: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.a) and self.a > 1):
            raise ScheduleRangeError(f"constant schedule needs a > 1, got a={self.a}")

    def _alpha(self, n: int) -> float:
        return 1.0 / self.a

    @property
    def spec(self) -> str:
        return f"constant:{self.a!r}"


@dataclass(frozen=True)
class PowerLaw(Schedule):
    """``alpha_n = min(1, g / n**alpha)`` (forced to 1 at ``n = 1``)."""

    g: float
    alpha: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.g) and self.g > 0):
            raise ScheduleRangeError(f"power schedule needs g > 0, got g={self.g}")
        if not (math.isfinite(self.alpha) and self.alpha >= 0):
            raise ScheduleRangeError(f"power schedule needs alpha >= 0, got alpha={self.alpha}")

    def _alpha(self, n: int) -> float:
        return min(1.0, self.g / n**self.alpha)

    @property
    def spec(self) -> str:
        return f"power:{self.g!r},{self.alpha!r}"


def alpha_at(schedule: Schedule, n: int) -> float:
    return schedule.alpha_at(n)


@dataclass(frozen=True)
class SnapshotState:
    """Sampler state after ``n`` items.

    ``k`` is the age of the retained element (1 means the latest item is
    held); ``payload`` is the retained element itself.
    """

    n: int = 0
    k: int = 0
    payload: Any = None

    def __post_init__(self) -> None:
        if self.n < 0:
            raise DomainError(f"n must be >= 0, got {self.n}")
        if self.n == 0:
            if self.k != 0 or self.payload is not None:
                raise DomainError("empty state must have k = 0 and no payload")
        elif not 1 <= self.k <= self.n:
            raise DomainError(f"k must lie in [1, n={self.n}], got {self.k}")

    @property
    def position(self) -> int:
        """1-based stream index of the retained element (0 when empty)."""
        return self.n - self.k + 1 if self.n else 0

    @property
    def l(self) -> int:
        """``n + 1 - k``; equals :attr:`position`."""
        return self.n + 1 - self.k if self.n else 0

    def to_record(self, encode=None) -> dict:
        """Serialisable ``{n, k, position, payload}`` record.

        ``encode`` maps the payload to bytes; by default ``str`` payloads are
        UTF-8 encoded and ``bytes`` are passed through.  Bytes are emitted as
        hex so the record is JSON friendly.
        """
        if self.payload is None:
            data = None
        else:
            raw = encode(self.payload) if encode else _default_bytes(self.payload)
            data = raw.hex()
        return {"n": self.n, "k": self.k, "position": self.position, "payload": data}

    @classmethod
    def from_record(cls, record: dict, decode=None) -> "SnapshotState":
        data = record.get("payload")
        payload = None
        if data is not None:
            raw = bytes.fromhex(data)
            payload = decode(raw) if decode else raw
        state = cls(n=int(record["n"]), k=int(record["k"]), payload=payload)
        if "position" in record and int(record["position"]) != state.position:
            raise DomainError("record position disagrees with n and k")
        return state


def _default_bytes(payload: Any) -> bytes:
    if isinstance(payload, bytes):
        return payload
    if isinstance(payload, str):
        return payload.encode("utf-8")
    raise TypeError(f"no default byte encoding for {type(payload).__name__}; pass encode=")


def update(schedule: Schedule, state: SnapshotState, item: Any, u: float) -> SnapshotState:
    """Consume one item given a uniform draw ``u`` in [0, 1).

    The item replaces the snapshot when ``u < alpha_{n+1}``; ``alpha >= 1``
    replaces unconditionally.
    """
    n = state.n + 1
    a = schedule.alpha_at(n)
    if a >= 1.0 or u < a:
        return SnapshotState(n=n, k=1, payload=item)
    return replace(state, n=n, k=state.k + 1)


class SnapshotSampler:
    """Stateful wrapper around :func:`update` with its own random stream.

    The draw for the ``n``-th item is ``rng.uniform(key, n)``, so a sampler
    built from ``(seed, stream_id)`` reproduces member ``stream_id`` of an
    :class:`~streamsnap.ensemble.Ensemble` with the same seed exactly.
    """

    def __init__(self, schedule: Schedule, seed: int, stream_id: int = 0, *, domain: str = "member"):
        self.schedule = schedule
        self.key = rng.stream_key(seed, stream_id, domain)
        self.state = SnapshotState()

    def feed(self, item: Any) -> SnapshotState:
        u = rng.uniform(self.key, self.state.n + 1)
        self.state = update(self.schedule, self.state, item, u)
        return self.state

    def feed_many(self, items: Iterable[Any]) -> SnapshotState:
        for item in items:
            self.feed(item)
        return self.state

    @property
    def n(self) -> int:
        return self.state.n

    @property
    def k(self) -> int:
        return self.state.k

    @property
    def payload(self) -> Any:
        return self.state.payload
