"""Reference distributions seen through their quantile functions.

Every distance kernel in the package consumes a ``ReferenceQuantile``: a
probability law on the real line exposing its CDF, its quantile function and
the partial integrals of the quantile function and of its square. Quantile
evaluation comes in two flavours, ``quantile(u)`` which is accurate for small
``u`` and ``quantile_upper(v) = F^{-1}(1 - v)`` which is accurate for small
``v``; heavy upper tails need the second one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InfiniteSecondMomentError

__all__ = [
    "ReferenceQuantile",
    "PowerLawQuantile",
    "TwoSidedQuantile",
    "EmpiricalQuantile",
    "point_mass",
    "partial_integrals",
]


class ReferenceQuantile:
    """Interface for a one-dimensional reference law."""

    second_moment_finite: bool = True
    bounded: bool = False

    def cdf(self, x):
        raise NotImplementedError

    def cdf_left(self, x):
        """Left limit ``P(Z < x)``; equal to ``cdf`` for continuous laws."""
        return self.cdf(x)

    def quantile(self, u):
        raise NotImplementedError

    def quantile_upper(self, v):
        return self.quantile(1.0 - np.asarray(v, dtype=float))

    def partial_q1(self, a, b):
        raise NotImplementedError

    def partial_q2(self, a, b):
        raise NotImplementedError


def _power_partial(scale, kappa, p, a, b):
    """``scale * int_a^b (1 - kappa*u)^(p-1) du`` in cancellation-free form.

    Uses ``(w_a^p - w_b^p)/(kappa p)`` with ``w = 1 - kappa*u``, rewritten as
    ``w_a^p * (-expm1(p*d))/(kappa p)`` where ``d = log(w_b/w_a)``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    wa = 1.0 - kappa * a
    width = kappa * (b - a)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        ratio = np.where(wa > 0, width / np.where(wa > 0, wa, 1.0), 1.0)
        d = np.log1p(-ratio)
        if p == 0.0:
            out = scale * -d / kappa
        else:
            core = np.where(np.isinf(d), -1.0 if p > 0 else np.inf, np.expm1(p * d))
            out = scale * wa**p * (-core) / (kappa * p)
    return np.where(width == 0.0, 0.0, out)


@dataclass(frozen=True)
class PowerLawQuantile(ReferenceQuantile):
    """Law of a magnitude with density proportional to ``z^(-1-alpha)``.

    Supported on ``[rho, upper)``; ``upper = inf`` gives the Pareto law with
    ``F(x) = 1 - (rho/x)^alpha`` and ``F^{-1}(u) = rho (1-u)^(-1/alpha)``.
    """

    alpha: float
    rho: float
    upper: float = math.inf
    kappa: float = field(init=False, repr=False)

    def __post_init__(self):
        if not (self.alpha > 0 and self.rho > 0):
            raise ValueError("alpha and rho must be positive")
        if not self.upper > self.rho:
            raise ValueError("upper end must exceed rho")
        kappa = 1.0
        if math.isfinite(self.upper):
            kappa = -math.expm1(self.alpha * math.log(self.rho / self.upper))
        object.__setattr__(self, "kappa", kappa)

    @property
    def second_moment_finite(self) -> bool:  # type: ignore[override]
        return self.alpha > 2 or math.isfinite(self.upper)

    @property
    def bounded(self) -> bool:  # type: ignore[override]
        return math.isfinite(self.upper)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            z = np.where(x > self.rho, self.rho / np.where(x > 0, x, 1.0), 1.0)
            out = -np.expm1(self.alpha * np.log(z)) / self.kappa
        return np.clip(out, 0.0, 1.0)

    def quantile(self, u):
        u = np.asarray(u, dtype=float)
        with np.errstate(divide="ignore"):
            return self.rho * np.exp(-np.log1p(-self.kappa * u) / self.alpha)

    def quantile_upper(self, v):
        v = np.asarray(v, dtype=float)
        with np.errstate(divide="ignore"):
            return self.rho * ((1.0 - self.kappa) + self.kappa * v) ** (-1.0 / self.alpha)

    def partial_q1(self, a, b):
        return _power_partial(self.rho, self.kappa, 1.0 - 1.0 / self.alpha, a, b)

    def partial_q2(self, a, b):
        return _power_partial(self.rho**2, self.kappa, 1.0 - 2.0 / self.alpha, a, b)


@dataclass(frozen=True)
class TwoSidedQuantile(ReferenceQuantile):
    """Signed law built from magnitude laws on each side of the origin.

    With probability ``weight_neg`` the value is ``-M`` with ``M ~ negative``,
    otherwise ``M ~ positive``. The quantile is split at ``u = weight_neg``.
    """

    negative: ReferenceQuantile | None
    positive: ReferenceQuantile | None
    weight_neg: float

    def __post_init__(self):
        if not 0.0 <= self.weight_neg <= 1.0:
            raise ValueError("weight_neg must lie in [0, 1]")
        if self.weight_neg > 0 and self.negative is None:
            raise ValueError("negative part required for positive weight")
        if self.weight_neg < 1 and self.positive is None:
            raise ValueError("positive part required for positive weight")

    def _parts(self):
        w = self.weight_neg
        return w, 1.0 - w

    @property
    def second_moment_finite(self) -> bool:  # type: ignore[override]
        w, wp = self._parts()
        ok = True
        if w > 0:
            ok &= self.negative.second_moment_finite
        if wp > 0:
            ok &= self.positive.second_moment_finite
        return ok

    @property
    def bounded(self) -> bool:  # type: ignore[override]
        w, wp = self._parts()
        return (w == 0 or self.negative.bounded) and (wp == 0 or self.positive.bounded)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        w, wp = self._parts()
        out = np.zeros_like(x) + w
        if w > 0:
            out = np.where(x < 0, w * (1.0 - self.negative.cdf_left(-x)), out)
        if wp > 0:
            out = np.where(x >= 0, w + wp * self.positive.cdf(x), out)
        return out

    def cdf_left(self, x):
        x = np.asarray(x, dtype=float)
        w, wp = self._parts()
        out = np.zeros_like(x) + w
        if w > 0:
            out = np.where(x <= 0, w * (1.0 - self.negative.cdf(-x)), out)
        if wp > 0:
            out = np.where(x > 0, w + wp * self.positive.cdf_left(x), out)
        return out

    def quantile(self, u):
        u = np.asarray(u, dtype=float)
        w, wp = self._parts()
        out = np.empty_like(u)
        neg = u < w if wp > 0 else np.ones(u.shape, dtype=bool)
        if w > 0:
            out = np.where(neg, -self.negative.quantile_upper(np.minimum(u / w, 1.0)), out)
        if wp > 0:
            out = np.where(neg, out, self.positive.quantile(np.clip((u - w) / wp, 0.0, 1.0)))
        return out

    def quantile_upper(self, v):
        v = np.asarray(v, dtype=float)
        w, wp = self._parts()
        out = np.empty_like(v)
        pos = v < wp if w > 0 else np.ones(v.shape, dtype=bool)
        if wp > 0:
            out = np.where(pos, self.positive.quantile_upper(np.minimum(v / wp, 1.0)), out)
        if w > 0:
            out = np.where(pos, out, -self.negative.quantile_upper(np.clip((1.0 - v) / w, 0.0, 1.0)))
        return out

    def _partial(self, a, b, power):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        w, wp = self._parts()
        total = np.zeros(np.broadcast(a, b).shape)
        if w > 0:
            an, bn = np.minimum(a, w), np.minimum(b, w)
            lo = np.clip(1.0 - bn / w, 0.0, 1.0)
            hi = np.clip(1.0 - an / w, 0.0, 1.0)
            part = getattr(self.negative, f"partial_q{power}")(lo, hi)
            total = total + (-1.0) ** power * w * np.where(bn > an, part, 0.0)
        if wp > 0:
            ap, bp = np.maximum(a, w), np.maximum(b, w)
            lo = np.clip((ap - w) / wp, 0.0, 1.0)
            hi = np.clip((bp - w) / wp, 0.0, 1.0)
            part = getattr(self.positive, f"partial_q{power}")(lo, hi)
            total = total + wp * np.where(bp > ap, part, 0.0)
        return total

    def partial_q1(self, a, b):
        return self._partial(a, b, 1)

    def partial_q2(self, a, b):
        return self._partial(a, b, 2)


class EmpiricalQuantile(ReferenceQuantile):
    """Uniform law on a finite set of atoms, ``F^{-1}(u) = x_{ceil(k u)}``."""

    bounded = True
    second_moment_finite = True

    def __init__(self, values):
        x = np.sort(np.asarray(values, dtype=float).ravel())
        if x.size == 0 or not np.all(np.isfinite(x)):
            raise ValueError("need at least one finite atom")
        x.setflags(write=False)
        self.values = x
        self.k = x.size
        self._cs1 = np.concatenate(([0.0], np.cumsum(x)))
        self._cs2 = np.concatenate(([0.0], np.cumsum(x * x)))

    def cdf(self, x):
        return np.searchsorted(self.values, np.asarray(x, dtype=float), side="right") / self.k

    def cdf_left(self, x):
        return np.searchsorted(self.values, np.asarray(x, dtype=float), side="left") / self.k

    def quantile(self, u):
        u = np.asarray(u, dtype=float)
        idx = np.clip(np.ceil(self.k * u).astype(np.int64) - 1, 0, self.k - 1)
        return self.values[idx]

    def _partial(self, a, b, xk, cs):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        k = self.k
        ja = np.clip(np.floor(k * a).astype(np.int64), 0, k - 1)  # zero-based cell of a
        jb = np.clip(np.ceil(k * b).astype(np.int64) - 1, 0, k - 1)  # zero-based cell of b
        same = (b - a) * xk[ja]
        head = ((ja + 1) / k - a) * xk[ja]
        tail = (b - jb / k) * xk[jb]
        mid = (cs[jb] - cs[np.minimum(ja + 1, jb)]) / k
        out = np.where(ja >= jb, same, head + mid + tail)
        return np.where(b > a, out, 0.0)

    def partial_q1(self, a, b):
        return self._partial(a, b, self.values, self._cs1)

    def partial_q2(self, a, b):
        return self._partial(a, b, self.values**2, self._cs2)


def point_mass(y: float) -> EmpiricalQuantile:
    """Dirac law at ``y``."""
    return EmpiricalQuantile([y])


def partial_integrals(reference: ReferenceQuantile, a, b):
    """Return ``(int_a^b F^{-1}, int_a^b (F^{-1})^2)`` for ``0 <= a <= b <= 1``.

    Raises ``InfiniteSecondMomentError`` when the second integral diverges.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.any(a < 0) or np.any(b > 1) or np.any(a > b):
        raise ValueError("require 0 <= a <= b <= 1")
    q1 = reference.partial_q1(a, b)
    q2 = reference.partial_q2(a, b)
    if not np.all(np.isfinite(q2)):
        raise InfiniteSecondMomentError("second moment of the reference is infinite")
    if np.ndim(q1) == 0:
        return float(q1), float(q2)
    return q1, q2
