import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from streamsnap import exact
from streamsnap.errors import DomainError
from streamsnap.harness import enumerate_paths_pmf, recursion_pmf
from streamsnap.sampler import Constant, PowerLaw, Uniform

# library schedule paired with its rational twin
PAIRS = [
    (Uniform(), oracles.uniform),
    (Constant(2.0), oracles.constant(2)),
    (Constant(1.5), oracles.constant(Fraction(3, 2))),
    (PowerLaw(2.0, 1.0), oracles.power(2, 1)),
    (PowerLaw(1.0, 2.0), oracles.power(1, 2)),
    (PowerLaw(4.0, 2.0), oracles.power(4, 2)),
    (PowerLaw(0.5, 0.0), oracles.power(Fraction(1, 2), 0)),
]


def test_examples():
    assert exact.pmf(Uniform(), 5, 3) == pytest.approx(0.2, abs=1e-15)
    assert exact.survival(Uniform(), 5, 3) == pytest.approx(0.6, abs=1e-15)
    assert exact.expected_k(Constant(2), 3) == pytest.approx(1.75, abs=1e-15)
    assert exact.pmf(Constant(2), 4, 4) == pytest.approx(0.125, abs=1e-15)
    assert exact.survival(PowerLaw(1, 2), 3, 3) == pytest.approx(2 / 3, abs=1e-15)
    assert exact.pmf_l(PowerLaw(4, 2), 3, 1) == 0.0


@pytest.mark.parametrize("schedule,oracle", PAIRS, ids=lambda p: str(p))
@pytest.mark.parametrize("n", [1, 2, 5, 9, 12])
def test_pmf_matches_fraction_enumeration(schedule, oracle, n):
    dist = oracles.path_distribution(oracle, n)
    table = exact.pmf_table(schedule, n)
    for k in range(1, n + 1):
        assert table[k - 1] == pytest.approx(float(dist.get(k, 0)), abs=1e-12)
        assert exact.pmf(schedule, n, k) == pytest.approx(float(dist.get(k, 0)), abs=1e-12)
    assert exact.expected_k(schedule, n) == pytest.approx(float(oracles.mean(dist)), abs=1e-12)


@pytest.mark.parametrize("schedule,oracle", PAIRS[:4], ids=lambda p: str(p))
def test_survival_and_l_forms_match_enumeration(schedule, oracle):
    n = 10
    dist = oracles.path_distribution(oracle, n)
    for k in range(1, n + 1):
        tail = sum((p for j, p in dist.items() if j >= k), Fraction(0))
        assert exact.survival(schedule, n, k) == pytest.approx(float(tail), abs=1e-12)
    for l in range(1, n + 1):
        assert exact.pmf_l(schedule, n, l) == pytest.approx(float(dist.get(n + 1 - l, 0)), abs=1e-12)


def test_library_oracles_agree_with_table():
    for s, _ in PAIRS:
        assert np.max(np.abs(enumerate_paths_pmf(s, 11) - exact.pmf_table(s, 11))) < 1e-12
        assert np.max(np.abs(recursion_pmf(s, 200) - exact.pmf_table(s, 200))) < 1e-12


schedules = st.one_of(
    st.just(Uniform()),
    st.floats(1.01, 50).map(Constant),
    st.builds(PowerLaw, st.floats(0.05, 10), st.floats(0, 3.5)),
)


@settings(max_examples=60, deadline=None)
@given(schedules, st.integers(1, 300))
def test_invariants(s, n):
    p = exact.pmf_table(s, n)
    sv = exact.survival_table(s, n)
    assert p.min() >= 0.0
    assert math.fsum(p) == pytest.approx(1.0, abs=1e-9)
    assert sv[0] == 1.0 and sv[n] == 0.0
    assert np.all(np.diff(sv) <= 1e-15)
    assert np.max(np.abs(p - (sv[:-1] - sv[1:]))) < 1e-12
    assert exact.expected_k(s, n) == pytest.approx(float(np.dot(np.arange(1, n + 1), p)), abs=1e-9)
    assert exact.expected_l(s, n) == pytest.approx(n + 1 - exact.expected_k(s, n), abs=1e-9)
    if n > 1:
        a = s.alpha_at(n)
        prev = exact.pmf_table(s, n - 1)
        assert p[0] == pytest.approx(a, abs=1e-15)
        assert np.max(np.abs(p[1:] - (1 - a) * prev)) < 1e-12


@pytest.mark.parametrize("a", [1.5, 2.0, 10.0])
def test_constant_closed_form(a):
    ek = exact.expected_k_sequence(Constant(a), 300)
    m = np.arange(1, 301)
    assert np.max(np.abs(ek - a * (1 - ((a - 1) / a) ** m))) < 1e-9


def test_l_sequence_is_stable_when_k_is_near_n():
    s = PowerLaw(1.0, 3.0)
    el = exact.expected_l_sequence(s, 10**4)
    assert el[0] == 1.0
    assert np.all(np.diff(el) >= 0)


@pytest.mark.parametrize("call", [
    lambda: exact.pmf(Uniform(), 0, 1),
    lambda: exact.pmf(Uniform(), 5, 0),
    lambda: exact.pmf(Uniform(), 5, 6),
    lambda: exact.pmf_table(Uniform(), 0),
    lambda: exact.expected_k(Uniform(), 0),
])
def test_domain_errors(call):
    with pytest.raises(DomainError):
        call()


def test_survival_boundary():
    assert exact.survival(Uniform(), 5, 1) == 1.0
    with pytest.raises(DomainError):
        exact.survival(Uniform(), 5, 6)
