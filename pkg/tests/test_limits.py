import math

import mpmath
import numpy as np
import pytest
from scipy import special

from streamsnap import limits, mathtools
from streamsnap.errors import DomainError, UnsupportedRegimeError
from streamsnap.limits import Regime, classify
from streamsnap.sampler import Constant, PowerLaw, Uniform


@pytest.mark.parametrize("s", [1.5, 2.0, 2.5, 3.0, 4.0, 7.5])
def test_zeta_against_scipy_and_mpmath(s):
    assert mathtools.zeta(s) == pytest.approx(float(special.zeta(s)), abs=1e-10)
    assert mathtools.zeta(s) == pytest.approx(float(mpmath.zeta(s)), abs=1e-10)


def test_zeta_two():
    assert mathtools.zeta(2.0) == pytest.approx(math.pi**2 / 6, abs=1e-12)


@pytest.mark.parametrize("s", [1.0, 0.5, -2.0])
def test_zeta_domain(s):
    with pytest.raises(DomainError):
        mathtools.zeta(s)


def test_harmonic():
    assert mathtools.harmonic(1) == 1.0
    assert mathtools.harmonic(4) == pytest.approx(25 / 12, abs=1e-15)
    assert mathtools.harmonic(10**6) == pytest.approx(math.log(10**6) + mathtools.EULER_GAMMA + 0.5e-6, abs=1e-12)
    assert mathtools.harmonic_pow(3, 2) == pytest.approx(1 + 1 / 4 + 1 / 9, abs=1e-15)


@pytest.mark.parametrize(
    "g,alpha,regime",
    [
        (0.5, 0, Regime.CONSTANT_GEO),
        (1, 0.5, Regime.SUBLINEAR_EXP),
        (2, 1, Regime.LINEAR_BETA),
        (1, 1.25, Regime.SUBQUADRATIC_L),
        (3, 2, Regime.QUADRATIC_L),
        (1, 3, Regime.SUPERQUADRATIC_L),
    ],
)
def test_classify(g, alpha, regime):
    r = classify(g, alpha)
    assert r.regime is regime
    assert r.regime.has_limit_law == (alpha <= 1)


@pytest.mark.parametrize("g,alpha", [(0, 1), (-1, 1), (1, -0.1), (math.inf, 1), (1, math.nan)])
def test_classify_domain(g, alpha):
    with pytest.raises(DomainError):
        classify(g, alpha)


def test_regime_of_named_schedules():
    assert limits.regime_of(Uniform()) == classify(1, 1)
    assert limits.regime_of(Constant(4)) == classify(0.25, 0)
    assert limits.regime_of(PowerLaw(0.1, 0.5)) == classify(0.1, 0.5)


def test_limiting_cdfs_on_grids():
    xs = np.linspace(0, 5, 51)
    geo = classify(0.25, 0)
    for x in xs:
        assert limits.limiting_cdf(geo, x) == pytest.approx(1 - 0.75 ** math.floor(x), abs=1e-15)
    exp = classify(0.5, 0.5)
    for x in xs:
        assert limits.limiting_cdf(exp, x) == pytest.approx(-math.expm1(-0.5 * x), abs=1e-15)
    beta = classify(2, 1)
    for x in np.linspace(0, 1, 21):
        assert limits.limiting_cdf(beta, x) == pytest.approx(1 - (1 - x) ** 2, abs=1e-15)
    assert limits.limiting_cdf(beta, 1.5) == 1.0
    assert limits.limiting_cdf(exp, -1.0) == 0.0


def test_constant_with_p_one_is_degenerate():
    r = classify(2.0, 0)
    assert limits.limiting_cdf(r, 1.0) == 1.0
    assert limits.expected_k_asymptotic(r, 100) == 1.0


@pytest.mark.parametrize("alpha", [1.5, 2, 3])
def test_no_limit_law_for_l_regimes(alpha):
    with pytest.raises(UnsupportedRegimeError):
        limits.limiting_cdf(classify(1, alpha), 0.5)
    with pytest.raises(UnsupportedRegimeError):
        limits.expected_k_asymptotic(classify(1, alpha), 100)


def test_scales_and_predictions():
    assert limits.scale_for(classify(1, 0.5), 10**4) == 100.0
    assert limits.scale_for(classify(2, 1), 10**4) == 10**4
    assert limits.expected_k_asymptotic(classify(0.5, 0.5), 10**4) == pytest.approx(200.0)
    assert limits.expected_k_asymptotic(classify(2, 1), 300) == pytest.approx(100.0)
    assert limits.expected_l_asymptotic(classify(3, 2), math.e**2) == pytest.approx(6.0)
    bound = limits.expected_l_asymptotic(classify(1, 3), 10**4)
    assert bound == pytest.approx(1 + math.pi**2 / 6, abs=1e-9)


def test_l_predictions_need_l_regime():
    with pytest.raises(UnsupportedRegimeError):
        limits.expected_l_asymptotic(classify(1, 0.5), 100)
