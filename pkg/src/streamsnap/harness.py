"""Monte-Carlo engine, brute-force oracles and statistical checks.

Finite-n tolerances here are engineering choices: the limit theorems being
checked give no convergence rates.  Reports carry a note saying so.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from . import engines, exact, rng
from .errors import DomainError, PreconditionError
from .sampler import PowerLaw, Schedule

DEFAULT_TRIALS = 10**5
KS_ALLOWANCE = 0.01


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Histogram of terminal ``K_n`` values over ``trials`` runs."""

    counts: dict[int, int]
    trials: int
    n: int

    def __post_init__(self) -> None:
        if sum(self.counts.values()) != self.trials:
            raise DomainError("counts do not sum to trials")
        if any(not 1 <= k <= self.n for k in self.counts):
            raise DomainError(f"outcomes must lie in [1, {self.n}]")

    @classmethod
    def from_samples(cls, samples: Iterable[int] | np.ndarray, n: int) -> "EmpiricalDistribution":
        values, counts = np.unique(np.asarray(samples, dtype=np.int64), return_counts=True)
        return cls({int(v): int(c) for v, c in zip(values, counts)}, int(counts.sum()), n)

    def outcomes(self) -> np.ndarray:
        return np.array(sorted(self.counts), dtype=np.int64)

    def frequencies(self) -> np.ndarray:
        """Relative frequency of ``k = 1..n`` as a dense array."""
        out = np.zeros(self.n)
        for k, c in self.counts.items():
            out[k - 1] = c
        return out / self.trials

    def mean(self) -> float:
        return sum(k * c for k, c in self.counts.items()) / self.trials

    def moment(self, fn: Callable[[int], float]) -> float:
        return sum(fn(k) * c for k, c in self.counts.items()) / self.trials


@dataclass(frozen=True)
class TestReport:
    """Outcome of one check; ``passed`` iff ``observed <= threshold``."""

    __test__ = False  # not a pytest class

    name: str
    observed: float
    threshold: float
    passed: bool
    trials: int = 0
    seed: int | None = None
    note: str = ""

    @classmethod
    def check(cls, name: str, observed: float, threshold: float, **kw) -> "TestReport":
        return cls(name, float(observed), float(threshold), bool(observed <= threshold), **kw)

    def to_line(self) -> str:
        """``name<TAB>observed<TAB>threshold<TAB>PASS|FAIL<TAB>seed[<TAB>trials=..][<TAB># note]``."""
        fields = [
            self.name,
            repr(self.observed),
            repr(self.threshold),
            "PASS" if self.passed else "FAIL",
            "-" if self.seed is None else str(self.seed),
        ]
        if self.trials:
            fields.append(f"trials={self.trials}")
        if self.note:
            fields.append(f"# {self.note}")
        return "\t".join(fields)

    @classmethod
    def from_line(cls, line: str) -> "TestReport":
        parts = line.rstrip("\n").split("\t")
        if len(parts) < 5 or parts[3] not in ("PASS", "FAIL"):
            raise ValueError(f"not a report line: {line!r}")
        trials, note = 0, ""
        for extra in parts[5:]:
            if extra.startswith("trials="):
                trials = int(extra[len("trials=") :])
            elif extra.startswith("# "):
                note = extra[2:]
        seed = None if parts[4] == "-" else int(parts[4])
        return cls(parts[0], float(parts[1]), float(parts[2]), parts[3] == "PASS", trials, seed, note)


# -- simulation ---------------------------------------------------------------


def trial_keys(seed: int, trials: int, engine: str = "literal") -> np.ndarray:
    return rng.stream_keys(seed, trials, "trial" if engine == "literal" else "trial-event")


def simulate_terminal(
    schedule: Schedule, n: int, trials: int, seed: int, engine: str = "literal"
) -> EmpiricalDistribution:
    """Distribution of ``K_n`` over ``trials`` independent seeded runs.

    Trial ``t`` uses sub-stream ``(seed, t)``, so results do not depend on
    how the trials are batched.
    """
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    if isinstance(trials, bool) or int(trials) != trials or trials < 1:
        raise DomainError(f"trials must be a positive integer, got {trials!r}")
    pos = engines.positions(schedule, int(n), trial_keys(seed, int(trials), engine), engine)
    return EmpiricalDistribution.from_samples(n - pos + 1, int(n))


# -- statistics ---------------------------------------------------------------


def ks_distance(e: EmpiricalDistribution, scale: float, cdf: Callable[[float], float]) -> float:
    """``max_k |F_emp(k / scale) - cdf(k / scale)|`` over the observed outcomes."""
    if e.trials == 0 or not e.counts:
        raise DomainError("empty distribution")
    if not scale > 0:
        raise DomainError(f"scale must be > 0, got {scale}")
    ks = e.outcomes()
    cum = np.cumsum([e.counts[int(k)] for k in ks]) / e.trials
    ref = np.array([cdf(float(k) / scale) for k in ks])
    return float(np.max(np.abs(cum - ref)))


def ks_threshold(trials: int, allowance: float = KS_ALLOWANCE) -> float:
    """Default KS pass threshold: 95% sampling band plus a finite-n allowance."""
    return 1.36 / math.sqrt(trials) + allowance


def binomial_z(e: EmpiricalDistribution, probs: np.ndarray) -> np.ndarray:
    """Per-outcome deviation of the histogram from ``probs``, in standard errors."""
    freq = e.frequencies()
    se = np.sqrt(np.maximum(probs * (1.0 - probs), 1e-300) / e.trials)
    z = np.abs(freq - probs) / se
    # an outcome with probability 0 must never be observed
    z[(probs == 0) & (freq > 0)] = np.inf
    z[(probs == 0) & (freq == 0)] = 0.0
    return z


def check_monotonicity(
    s: Schedule, s_prime: Schedule, n_max: int, tol: float = 1e-12, seed: int | None = None
) -> TestReport:
    """Exact check that pointwise smaller ``alpha`` never gives smaller ``E K_n``.

    Raises :class:`PreconditionError` unless ``alpha_n(s) <= alpha_n(s_prime)``
    for every ``n <= n_max``.
    """
    if n_max < 1:
        raise DomainError(f"n_max must be >= 1, got {n_max}")
    a, b = s.alphas(n_max), s_prime.alphas(n_max)
    bad = np.flatnonzero(a > b)
    if bad.size:
        n = int(bad[0]) + 1
        raise PreconditionError(f"alpha_{n}({s}) = {a[bad[0]]} exceeds alpha_{n}({s_prime}) = {b[bad[0]]}")
    ek, ek_prime = exact.expected_k_sequence(s, n_max), exact.expected_k_sequence(s_prime, n_max)
    deficit = float(np.max(ek_prime - ek))
    return TestReport.check(f"monotonicity[{s} vs {s_prime}]", max(deficit, 0.0), tol, seed=seed)


def regression_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    x, y = np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)
    xc = x - x.mean()
    return float(np.dot(xc, y - y.mean()) / np.dot(xc, xc))


def regression_expected_l(g: float, n_grid: Sequence[int], trials: int = 0, seed: int | None = None) -> TestReport:
    """Least-squares slope of exact ``E L_n`` against ``ln n`` for ``alpha = 2``.

    Passes iff ``|slope - g| <= 0.1 g``.  ``trials`` and ``seed`` are only
    recorded; the values come from the exact recurrence.
    """
    grid = sorted({int(m) for m in n_grid})
    if len(grid) < 2:
        raise DomainError("n_grid needs at least two distinct points")
    if grid[0] < 1:
        raise DomainError("n_grid points must be >= 1")
    if grid[-1] < 10 * grid[0]:
        raise DomainError("n_grid must span at least one decade")
    el = exact.expected_l_sequence(PowerLaw(g, 2.0), grid[-1])
    slope = regression_slope(np.log(grid), [el[m - 1] for m in grid])
    return TestReport.check(
        f"quadratic_slope[g={g!r}]",
        abs(slope - g),
        0.1 * g,
        trials=trials,
        seed=seed,
        note=f"slope={slope:.6g}",
    )


# -- brute-force oracles --------------------------------------------------------


def enumerate_paths_pmf(schedule: Schedule, n: int) -> np.ndarray:
    """``Pr[K_n = k]`` by summing over all ``2**(n-1)`` replace/keep patterns.

    Each pattern is replayed through the update rule; its weight is the
    product of ``alpha_i`` or ``1 - alpha_i`` along the path.
    """
    if not 1 <= n <= 20:
        raise DomainError(f"literal enumeration is limited to 1 <= n <= 20, got {n}")
    al = [schedule.alpha_at(i) for i in range(1, n + 1)]
    out = np.zeros(n)
    for pattern in itertools.product((True, False), repeat=n - 1):
        w, k = 1.0, 1
        for i, replace in enumerate(pattern, start=2):
            a = al[i - 1]
            if replace:
                w *= a
                k = 1
            else:
                w *= 1.0 - a
                k += 1
            if w == 0.0:
                break
        else:
            out[k - 1] += w
    return out


def recursion_pmf(schedule: Schedule, n: int) -> np.ndarray:
    """``Pr[K_n = k]`` by pushing the whole distribution forward one item at a time.

    ``Pr[K_{m+1} = 1] = alpha_{m+1}``, ``Pr[K_{m+1} = k+1] = (1 - alpha_{m+1}) Pr[K_m = k]``.
    O(n**2); plain products, no logarithms.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    p = np.array([1.0])
    for m in range(2, n + 1):
        a = schedule.alpha_at(m)
        nxt = np.empty(m)
        nxt[0] = a
        nxt[1:] = (1.0 - a) * p
        p = nxt
    return p
