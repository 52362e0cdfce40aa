"""Verification suites run by ``streamsnap verify``.

Each suite yields :class:`~streamsnap.harness.TestReport` objects so the
CLI can stream them as they finish.
"""

from __future__ import annotations

import math
from typing import Callable, Iterator

import numpy as np
from scipy import stats

from . import exact, harness, limits, rng
from .ensemble import TargetSet, coverage_size, simulate_ensembles, uncovered_targets
from .harness import TestReport
from .sampler import Constant, PowerLaw, Schedule, Uniform

VARIANTS: tuple[Schedule, ...] = (
    Uniform(),
    Constant(1.5),
    Constant(2.0),
    Constant(10.0),
    PowerLaw(0.5, 0.0),
    PowerLaw(0.1, 0.5),
    PowerLaw(1.0, 0.5),
    PowerLaw(2.0, 1.0),
    PowerLaw(1.0, 1.5),
    PowerLaw(1.0, 2.0),
    PowerLaw(4.0, 2.0),
    PowerLaw(1.0, 3.0),
)

# (smaller alpha, larger alpha) pairs
DOMINATED_PAIRS: tuple[tuple[Schedule, Schedule], ...] = (
    (PowerLaw(1.0, 1.0), PowerLaw(2.0, 1.0)),
    (Uniform(), PowerLaw(2.0, 1.0)),
    (PowerLaw(1.0, 1.0), Uniform()),
    (Constant(10.0), Constant(2.0)),
    (PowerLaw(1.0, 2.0), PowerLaw(1.0, 0.5)),
    (PowerLaw(0.1, 0.5), PowerLaw(1.0, 0.5)),
)

FINITE_N = "finite-n tolerance is an engineering choice"


def _max_over(fn: Callable[[Schedule, int], float], n_max: int) -> float:
    return max(fn(s, n) for s in VARIANTS for n in range(1, n_max + 1))


def exact_suite(seed: int, trials: int = harness.DEFAULT_TRIALS) -> Iterator[TestReport]:
    n_max = 300

    def norm(s, n):
        return abs(math.fsum(exact.pmf_table(s, n)) - 1.0)

    yield TestReport.check("normalization", _max_over(norm, n_max), 1e-9, seed=seed)

    uni = Uniform()
    dev = max(float(np.max(np.abs(exact.pmf_table(uni, n) - 1.0 / n))) for n in range(1, n_max + 1))
    yield TestReport.check("uniform_pmf", dev, 1e-12, seed=seed)
    ek = exact.expected_k_sequence(uni, n_max)
    dev = float(np.max(np.abs(ek - (np.arange(1, n_max + 1) + 1) / 2)))
    yield TestReport.check("uniform_mean", dev, 1e-9, seed=seed)

    def rec(s, n):
        if n == n_max:
            return 0.0
        a = s.alpha_at(n + 1)
        return float(np.max(np.abs(exact.pmf_table(s, n + 1)[1:] - (1.0 - a) * exact.pmf_table(s, n))))

    yield TestReport.check("recurrence", _max_over(rec, n_max), 1e-12, seed=seed)

    def coh(s, n):
        sv = exact.survival_table(s, n)
        return float(np.max(np.abs(exact.pmf_table(s, n) - (sv[:-1] - sv[1:]))))

    yield TestReport.check("survival_coherence", _max_over(coh, n_max), 1e-12, seed=seed)

    def mean(s, n):
        return abs(exact.expected_k(s, n) - float(np.dot(np.arange(1, n + 1), exact.pmf_table(s, n))))

    yield TestReport.check("expectation_crosscheck", _max_over(mean, n_max), 1e-9, seed=seed)

    def enum(s, n):
        return float(np.max(np.abs(harness.enumerate_paths_pmf(s, n) - exact.pmf_table(s, n))))

    yield TestReport.check("enumeration_oracle", _max_over(enum, 12), 1e-12, seed=seed)

    def recursion(s, n):
        return float(np.max(np.abs(harness.recursion_pmf(s, n) - exact.pmf_table(s, n))))

    yield TestReport.check("recursion_oracle", max(recursion(s, n_max) for s in VARIANTS), 1e-12, seed=seed)

    dev = 0.0
    for a in (1.5, 2.0, 10.0):
        ek = exact.expected_k_sequence(Constant(a), n_max)
        m = np.arange(1, n_max + 1)
        dev = max(dev, float(np.max(np.abs(ek - a * (1.0 - ((a - 1.0) / a) ** m)))))
    yield TestReport.check("constant_closed_form", dev, 1e-9, seed=seed)

    for s, s_prime in DOMINATED_PAIRS:
        yield harness.check_monotonicity(s, s_prime, n_max, seed=seed)

    n = 50
    worst = 0.0
    for i, s in enumerate(VARIANTS):
        e = harness.simulate_terminal(s, n, trials, rng.derive_seed(seed, "agreement", i))
        worst = max(worst, float(np.max(harness.binomial_z(e, exact.pmf_table(s, n)))))
    yield TestReport.check("simulation_agreement_n50_z", worst, 4.0, trials=trials, seed=seed)


def ks_report(schedule: Schedule, n: int, trials: int, seed: int, threshold: float) -> TestReport:
    r = limits.regime_of(schedule)
    e = harness.simulate_terminal(schedule, n, trials, seed)
    d = harness.ks_distance(e, limits.scale_for(r, n), limits.cdf_function(r))
    return TestReport.check(f"ks[{schedule} n={n}]", d, threshold, trials=trials, seed=seed, note=FINITE_N)


def limits_suite(seed: int, trials: int = harness.DEFAULT_TRIALS) -> Iterator[TestReport]:
    thr = harness.ks_threshold(trials)
    for a in (1.5, 2.0, 10.0):
        yield ks_report(Constant(a), 50, trials, rng.derive_seed(seed, "geo", a), thr)
    for g in (0.5, 1.0):
        yield ks_report(PowerLaw(g, 0.5), 10**4, trials, rng.derive_seed(seed, "exp", g), thr)
    for g in (1.0, 2.0):
        yield ks_report(PowerLaw(g, 1.0), 10**4, trials, rng.derive_seed(seed, "beta", g), thr)

    n = 10**4
    for s in (PowerLaw(1.0, 0.5), PowerLaw(2.0, 1.0)):
        pred = limits.expected_k_asymptotic(limits.regime_of(s), n)
        rel = abs(exact.expected_k(s, n) / pred - 1.0)
        yield TestReport.check(f"asymptotic_mean[{s} n={n}]", rel, 0.05, seed=seed, note=FINITE_N)

    s = PowerLaw(1.0, 2.0)
    gap = abs(exact.expected_l(s, n) - math.log(n))
    yield TestReport.check(f"quadratic_band[{s} n={n}]", gap, 3.0, seed=seed)
    for g in (1.0, 3.0):
        yield harness.regression_expected_l(g, [10**2, 10**3, 10**4], seed=seed)

    s = PowerLaw(1.0, 3.0)
    bound = limits.expected_l_asymptotic(limits.regime_of(s), n)
    excess = float(np.max(exact.expected_l_sequence(s, n))) - bound
    yield TestReport.check(f"superquadratic_bound[{s} n<={n}]", max(excess, 0.0), 0.0, seed=seed)


def ensemble_suite(seed: int, trials: int = harness.DEFAULT_TRIALS) -> Iterator[TestReport]:
    m = coverage_size(0.01, 1e-10, 9)
    yield TestReport.check("coverage_size[0.01,1e-10,9]", abs(m - 1249), 0.0)

    n = 10**5
    run = simulate_ensembles(Uniform(), n, 1250, [rng.derive_seed(seed, "deciles")])
    observed, _ = np.histogram(run.positions[0], bins=10, range=(0.5, n + 0.5))
    chi2 = float(stats.chisquare(observed).statistic)
    yield TestReport.check("decile_chi2[M=1250 n=1e5]", chi2, float(stats.chi2.ppf(0.999, 9)), seed=seed)

    m = coverage_size(0.01, 1e-4, 9)
    cov_trials = max(1, trials // 10)
    runs = simulate_ensembles(
        Uniform(), 10**4, m, [rng.derive_seed(seed, "coverage", t) for t in range(cov_trials)], engine="event"
    )
    misses = sum(uncovered_targets(row, 10**4, 0.01) > 0 for row in runs.positions)
    # eta = 1e-4 per trial; allow 5 per 10**4 trials
    yield TestReport.check(
        f"coverage_misses[M={m} n=1e4]", misses, 5 * cov_trials / 10**4, trials=cov_trials, seed=seed
    )

    seeds = [rng.derive_seed(seed, "quality", i) for i in range(100)]
    q = simulate_ensembles(Uniform(), n, 1250, seeds).qualities(TargetSet())
    yield TestReport.check("quality_over_1pct[M=1250 n=1e5]", int(np.sum(q > 0.01)), 1.0, trials=100, seed=seed)


SUITES = {
    "exact": exact_suite,
    "limits": limits_suite,
    "ensemble": ensemble_suite,
}


def run_suite(selector: str, seed: int, trials: int = harness.DEFAULT_TRIALS) -> Iterator[TestReport]:
    if selector == "all":
        for fn in SUITES.values():
            yield from fn(seed, trials)
        return
    try:
        fn = SUITES[selector]
    except KeyError:
        raise ValueError(f"unknown suite {selector!r}; expected all, {', '.join(SUITES)}") from None
    yield from fn(seed, trials)
