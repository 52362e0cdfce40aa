"""Limit laws and asymptotic predictors for ``alpha_n = min(1, g / n**alpha)``.

The exponent ``alpha`` alone picks one of six regimes:

==========  ===============  ============================================
alpha       regime           prediction
==========  ===============  ============================================
0           CONSTANT_GEO     K_n -> Geo(p), p = min(1, g)
(0, 1)      SUBLINEAR_EXP    K_n / n**alpha -> Exp(g)
1           LINEAR_BETA      K_n / n -> Beta(1, g)
(1, 2)      SUBQUADRATIC_L   E L_n ~ g n**(2-alpha) / (2-alpha) - ...
2           QUADRATIC_L      E L_n = g ln n + O(1)
> 2         SUPERQUADRATIC_L E L_n bounded
==========  ===============  ============================================
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

from .errors import DomainError, UnsupportedRegimeError
from .mathtools import harmonic, zeta
from .sampler import Constant, PowerLaw, Schedule, Uniform


class Regime(enum.Enum):
    CONSTANT_GEO = "ConstantGeo"
    SUBLINEAR_EXP = "SublinearExp"
    LINEAR_BETA = "LinearBeta"
    SUBQUADRATIC_L = "SubquadraticL"
    QUADRATIC_L = "QuadraticL"
    SUPERQUADRATIC_L = "SuperquadraticL"

    @property
    def has_limit_law(self) -> bool:
        return self in _K_REGIMES


_K_REGIMES = frozenset({Regime.CONSTANT_GEO, Regime.SUBLINEAR_EXP, Regime.LINEAR_BETA})


@dataclass(frozen=True)
class RegimeDescriptor:
    regime: Regime
    g: float
    alpha: float

    @property
    def p(self) -> float:
        """Replacement probability of the constant regime."""
        return min(1.0, self.g)


def classify(g: float, alpha: float) -> RegimeDescriptor:
    if not (math.isfinite(g) and g > 0):
        raise DomainError(f"g must be > 0, got {g}")
    if not (math.isfinite(alpha) and alpha >= 0):
        raise DomainError(f"alpha must be >= 0, got {alpha}")
    if alpha == 0:
        regime = Regime.CONSTANT_GEO
    elif alpha < 1:
        regime = Regime.SUBLINEAR_EXP
    elif alpha == 1:
        regime = Regime.LINEAR_BETA
    elif alpha < 2:
        regime = Regime.SUBQUADRATIC_L
    elif alpha == 2:
        regime = Regime.QUADRATIC_L
    else:
        regime = Regime.SUPERQUADRATIC_L
    return RegimeDescriptor(regime, float(g), float(alpha))


def regime_of(schedule: Schedule) -> RegimeDescriptor:
    """Regime of a schedule; ``Uniform`` is ``g = 1, alpha = 1`` and
    ``Constant(a)`` is ``g = 1/a, alpha = 0``."""
    if isinstance(schedule, Uniform):
        return classify(1.0, 1.0)
    if isinstance(schedule, Constant):
        return classify(1.0 / schedule.a, 0.0)
    if isinstance(schedule, PowerLaw):
        return classify(schedule.g, schedule.alpha)
    raise TypeError(f"unknown schedule type {type(schedule).__name__}")


def _require_k_regime(r: RegimeDescriptor) -> None:
    if not r.regime.has_limit_law:
        raise UnsupportedRegimeError(f"{r.regime.value} has no limit law for K_n")


def limiting_cdf(r: RegimeDescriptor, x: float) -> float:
    """CDF of the limit law.

    ConstantGeo: law of ``K_n`` itself (integer support, ``x`` is floored).
    SublinearExp: law of ``K_n / n**alpha``.  LinearBeta: law of ``K_n / n``.
    """
    _require_k_regime(r)
    if r.regime is Regime.CONSTANT_GEO:
        if x < 1:
            return 0.0
        return 1.0 - (1.0 - r.p) ** math.floor(x)
    if r.regime is Regime.SUBLINEAR_EXP:
        if x <= 0:
            return 0.0
        return -math.expm1(-r.g * x)
    if x <= 0:
        return 0.0
    if x >= 1:
        return 1.0
    return 1.0 - (1.0 - x) ** r.g


def cdf_function(r: RegimeDescriptor) -> Callable[[float], float]:
    _require_k_regime(r)
    return lambda x: limiting_cdf(r, x)


def scale_for(r: RegimeDescriptor, n: int) -> float:
    """Normaliser applied to ``K_n`` before comparing with :func:`limiting_cdf`."""
    _require_k_regime(r)
    if r.regime is Regime.CONSTANT_GEO:
        return 1.0
    if r.regime is Regime.SUBLINEAR_EXP:
        return float(n) ** r.alpha
    return float(n)


def expected_k_asymptotic(r: RegimeDescriptor, n: int) -> float:
    _require_k_regime(r)
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if r.regime is Regime.CONSTANT_GEO:
        return 1.0 / r.p
    if r.regime is Regime.SUBLINEAR_EXP:
        return float(n) ** r.alpha / r.g
    return n / (r.g + 1.0)


def expected_l_asymptotic(r: RegimeDescriptor, n: int) -> float:
    """Explicit terms of the ``E L_n`` expansion (remainders dropped).

    For SuperquadraticL this is the constant upper bound
    ``(g**(1/alpha) + 1) / 2 * g**(1/alpha) + g * zeta(alpha - 1)``.
    """
    if r.regime.has_limit_law:
        raise UnsupportedRegimeError(f"{r.regime.value} is described through K_n, not L_n")
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    g, a = r.g, r.alpha
    if r.regime is Regime.SUBQUADRATIC_L:
        lead = g * n ** (2.0 - a) / (2.0 - a)
        if a < 1.5:
            return lead - g * g * n ** (3.0 - 2.0 * a) / ((3.0 - 2.0 * a) * (2.0 - a))
        if a == 1.5:
            return lead - g * g * harmonic(n) / (a - 1.0)
        return lead
    if r.regime is Regime.QUADRATIC_L:
        return g * math.log(n)
    root = g ** (1.0 / a)
    return (root + 1.0) / 2.0 * root + g * zeta(a - 1.0)
