"""Parametric Lévy jump measures and their normalized tails.

Three families are provided:

* ``PowerLawTail``: one-sided power law with density
  ``intensity * alpha * rho0**alpha * z**(-1-alpha)`` on ``[rho0, inf)``
  (or its mirror image on the negative axis). This is the candidate model.
* ``StableTailMeasure``: two-sided stable-type measure with density
  ``c_plus |z|^(-1-alpha)`` for ``z > 0`` and ``c_minus |z|^(-1-alpha)`` for
  ``z < 0``, optionally restricted to ``|z| < upper``.
* ``GaussianJumpLaw``: finite Gaussian jump law, used as a simulation input.

The module-level functions dispatch on the measure type.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import special

from .references import PowerLawQuantile, ReferenceQuantile, TwoSidedQuantile

__all__ = [
    "PowerLawTail",
    "StableTailMeasure",
    "GaussianJumpLaw",
    "tail_mass",
    "total_mass",
    "cutoff_for_intensity",
    "normalized_tail",
    "small_jump_variance",
]

_SIDES = ("positive", "negative")


@dataclass(frozen=True)
class PowerLawTail:
    alpha: float
    rho0: float
    intensity: float = 1.0
    side: str = "positive"

    def __post_init__(self):
        if not (self.alpha > 0 and self.rho0 > 0 and self.intensity > 0):
            raise ValueError("alpha, rho0 and intensity must be positive")
        if self.side not in _SIDES:
            raise ValueError(f"side must be one of {_SIDES}")


@dataclass(frozen=True)
class StableTailMeasure:
    alpha: float
    c_minus: float = 1.0
    c_plus: float = 1.0
    upper: float = math.inf

    def __post_init__(self):
        if not 0 < self.alpha < 2:
            raise ValueError("stability index must lie in (0, 2)")
        if self.c_minus < 0 or self.c_plus < 0 or self.c_minus + self.c_plus <= 0:
            raise ValueError("tail weights must be non-negative and not both zero")
        if not self.upper > 0:
            raise ValueError("upper must be positive")

    @property
    def weight(self) -> float:
        return self.c_minus + self.c_plus


@dataclass(frozen=True)
class GaussianJumpLaw:
    sigma: float = 1.0
    intensity: float = 1.0

    def __post_init__(self):
        if not (self.sigma > 0 and self.intensity > 0):
            raise ValueError("sigma and intensity must be positive")


def total_mass(measure) -> float:
    """Total mass of the measure (``inf`` for stable-type measures)."""
    if isinstance(measure, (PowerLawTail, GaussianJumpLaw)):
        return float(measure.intensity)
    if isinstance(measure, StableTailMeasure):
        return math.inf
    raise TypeError(f"unsupported measure {type(measure).__name__}")


def tail_mass(measure, r: float) -> float:
    """Mass of ``measure`` outside the open interval ``(-r, r)``."""
    if not r > 0:
        raise ValueError("level must be positive")
    if isinstance(measure, PowerLawTail):
        if r <= measure.rho0:
            return float(measure.intensity)
        return measure.intensity * (measure.rho0 / r) ** measure.alpha
    if isinstance(measure, StableTailMeasure):
        if r >= measure.upper:
            return 0.0
        a = measure.alpha
        return measure.weight * (r**-a - measure.upper**-a) / a
    if isinstance(measure, GaussianJumpLaw):
        return measure.intensity * float(special.erfc(r / (measure.sigma * math.sqrt(2.0))))
    raise TypeError(f"unsupported measure {type(measure).__name__}")


def cutoff_for_intensity(measure, lam: float) -> float:
    """Level ``rho`` at which the tail mass equals ``lam``."""
    if not lam > 0:
        raise ValueError("intensity must be positive")
    if lam > total_mass(measure):
        raise ValueError("intensity exceeds the total mass of the measure")
    if isinstance(measure, PowerLawTail):
        return measure.rho0 * (measure.intensity / lam) ** (1.0 / measure.alpha)
    if isinstance(measure, StableTailMeasure):
        a = measure.alpha
        return (a * lam / measure.weight + measure.upper**-a) ** (-1.0 / a)
    if isinstance(measure, GaussianJumpLaw):
        return measure.sigma * math.sqrt(2.0) * float(special.erfcinv(lam / measure.intensity))
    raise TypeError(f"unsupported measure {type(measure).__name__}")


def normalized_tail(measure, rho: float) -> ReferenceQuantile:
    """Jump law beyond ``rho``: the measure outside ``(-rho, rho)`` divided by its mass.

    A positive ``PowerLawTail`` yields a ``PowerLawQuantile`` anchored at
    ``rho`` (the family is closed under re-anchoring). A negative one yields
    the reflected law. Stable-type measures give a two-sided law split at
    ``c_minus / (c_minus + c_plus)``.
    """
    if isinstance(measure, PowerLawTail):
        if rho < measure.rho0:
            raise ValueError("cutoff below the support edge of the power law")
        mag = PowerLawQuantile(measure.alpha, rho)
        if measure.side == "positive":
            return mag
        return TwoSidedQuantile(mag, None, 1.0)
    if isinstance(measure, StableTailMeasure):
        if not 0 < rho < measure.upper:
            raise ValueError("zero tail mass beyond this cutoff")
        mag = PowerLawQuantile(measure.alpha, rho, measure.upper)
        w = measure.c_minus / measure.weight
        return TwoSidedQuantile(mag if w > 0 else None, mag if w < 1 else None, w)
    if isinstance(measure, GaussianJumpLaw):
        raise TypeError("the Gaussian jump law is a simulation input, not a reference")
    raise TypeError(f"unsupported measure {type(measure).__name__}")


def small_jump_variance(measure, rho: float) -> float:
    """Second moment of the measure restricted to ``|u| <= rho``."""
    if not rho > 0:
        raise ValueError("level must be positive")
    if isinstance(measure, StableTailMeasure):
        a = measure.alpha
        r = min(rho, measure.upper)
        return measure.weight * r ** (2.0 - a) / (2.0 - a)
    if isinstance(measure, PowerLawTail):
        if rho <= measure.rho0:
            return 0.0
        a = measure.alpha
        log_ratio = math.log(rho / measure.rho0)
        if abs(2.0 - a) < 1e-8:
            growth = log_ratio
        else:
            growth = math.expm1((2.0 - a) * log_ratio) / (2.0 - a)
        return measure.intensity * a * measure.rho0**2 * growth
    if isinstance(measure, GaussianJumpLaw):
        t = rho / measure.sigma
        inner = math.erf(t / math.sqrt(2.0)) - 2.0 * t * math.exp(-0.5 * t * t) / math.sqrt(2.0 * math.pi)
        return measure.intensity * measure.sigma**2 * inner
    raise TypeError(f"unsupported measure {type(measure).__name__}")
