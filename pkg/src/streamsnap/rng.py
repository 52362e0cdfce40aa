"""Counter-based SplitMix64 random streams.

Every random draw is a pure function of ``(key, counter)``:

    u = (mix64(key + counter * GOLDEN) >> 11) * 2**-53

so a stream can be evaluated at any counter without replaying earlier draws,
and a batch of streams can be evaluated together with numpy.  Stream keys are
derived from ``(seed, domain, stream_id)``; the seed and domain are hashed
with BLAKE2b and the stream id is mixed in with a second SplitMix round.

The scalar (pure Python) and vectorised (numpy) paths produce bit-identical
values; the test suite checks this.
"""

from __future__ import annotations

import hashlib

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
# odd constant, distinct from GOLDEN, so stream ids and counters do not alias
STREAM_GAMMA = 0xD1B54A32D192ED03
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_INV_2_53 = 1.0 / (1 << 53)

_U_GOLDEN = np.uint64(GOLDEN)
_U_STREAM = np.uint64(STREAM_GAMMA)
_U_M1 = np.uint64(_M1)
_U_M2 = np.uint64(_M2)
_S11 = np.uint64(11)
_S27 = np.uint64(27)
_S30 = np.uint64(30)
_S31 = np.uint64(31)


def mix64(z: int) -> int:
    """SplitMix64 finaliser on a Python int (taken mod 2**64)."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def mix64_array(z: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
    """Vectorised :func:`mix64` over a uint64 array (wrapping arithmetic)."""
    if out is None:
        out = np.array(z, dtype=np.uint64, copy=True)
    elif out is not z:
        np.copyto(out, z)
    tmp = np.empty_like(out)
    np.right_shift(out, _S30, out=tmp)
    np.bitwise_xor(out, tmp, out=out)
    np.multiply(out, _U_M1, out=out)
    np.right_shift(out, _S27, out=tmp)
    np.bitwise_xor(out, tmp, out=out)
    np.multiply(out, _U_M2, out=out)
    np.right_shift(out, _S31, out=tmp)
    np.bitwise_xor(out, tmp, out=out)
    return out


def seed_base(seed: int, domain: str) -> int:
    """64-bit base key for a (seed, domain) pair."""
    h = hashlib.blake2b(digest_size=8, person=b"streamsnap")
    h.update(domain.encode("utf-8"))
    h.update(b"\x00")
    h.update(str(int(seed)).encode("ascii"))
    return int.from_bytes(h.digest(), "little")


def stream_key(seed: int, stream_id: int, domain: str = "member") -> int:
    """Key of sub-stream ``stream_id`` under ``seed``."""
    return mix64(seed_base(seed, domain) + (stream_id + 1) * STREAM_GAMMA)


def stream_keys(seed: int, count: int, domain: str = "member", start: int = 0) -> np.ndarray:
    """Keys of sub-streams ``start .. start + count - 1`` as a uint64 array."""
    ids = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    z = np.uint64(seed_base(seed, domain)) + ids * _U_STREAM
    return mix64_array(z, out=z)


def raw64(key: int, counter: int) -> int:
    return mix64(key + counter * GOLDEN)


def uniform(key: int, counter: int) -> float:
    """Uniform double in [0, 1) for ``(key, counter)``."""
    return (raw64(key, counter) >> 11) * _INV_2_53


def raw64_array(keys: np.ndarray, counter: int | np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
    """Raw 64-bit outputs for many keys at one counter (or per-key counters)."""
    if np.isscalar(counter):
        offset = np.uint64((int(counter) * GOLDEN) & MASK64)
        if out is None:
            out = np.empty(keys.shape, dtype=np.uint64)
        np.add(keys, offset, out=out)
    else:
        z = np.asarray(counter, dtype=np.uint64) * _U_GOLDEN
        out = np.add(keys, z, out=out if out is not None else z)
    return mix64_array(out, out=out)


def uniform_array(keys: np.ndarray, counter: int | np.ndarray) -> np.ndarray:
    """Vectorised :func:`uniform`; bit-identical to the scalar path."""
    z = raw64_array(keys, counter)
    return (z >> _S11).astype(np.float64) * _INV_2_53


def threshold53(p: float) -> int:
    """Smallest integer t with ``(r >> 11) < t  <=>  uniform < p``.

    Lets vectorised code compare raw draws against a probability without
    converting every draw to float.
    """
    if p <= 0.0:
        return 0
    if p >= 1.0:
        return 1 << 53
    # p * 2**53 is exact in binary floating point
    scaled = p * float(1 << 53)
    t = int(scaled)
    return t if t == scaled else t + 1


class CounterRNG:
    """A single counter-based stream; ``next()`` draws at an internal counter."""

    def __init__(self, key: int, counter: int = 0):
        self.key = key & MASK64
        self.counter = counter

    @classmethod
    def from_seed(cls, seed: int, stream_id: int = 0, domain: str = "member") -> "CounterRNG":
        return cls(stream_key(seed, stream_id, domain))

    def at(self, counter: int) -> float:
        return uniform(self.key, counter)

    def next(self) -> float:
        self.counter += 1
        return uniform(self.key, self.counter)


def derive_seed(seed: int, *labels: object) -> int:
    """Deterministic 63-bit child seed for ``seed`` and a label path."""
    h = hashlib.blake2b(digest_size=8, person=b"streamsnap-seed")
    h.update(str(int(seed)).encode("ascii"))
    for label in labels:
        h.update(b"/")
        h.update(str(label).encode("utf-8"))
    return int.from_bytes(h.digest(), "little") >> 1
