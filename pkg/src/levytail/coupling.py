"""Coupling semimetric between Lévy measures and an explicit path-space bound.

For an intensity ``lam`` each measure is cut at the level ``rho(lam)`` where
its tail mass equals ``lam``; the semimetric is ``sqrt(lam)`` times the
truncated Wasserstein distance between the two normalized tails. The
coupling distance is its supremum over ``lam``, approximated on a grid.

``theorem_bound`` assembles an upper bound on the squared Wasserstein
distance between the laws of two additive-noise jump diffusions with
one-sided Lipschitz drift, from the differences of their characteristic
triplets and the semimetric.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .measures import (
    GaussianJumpLaw,
    PowerLawTail,
    StableTailMeasure,
    cutoff_for_intensity,
    normalized_tail,
    small_jump_variance,
    tail_mass,
    total_mass,
)
from .wasserstein import check_truncation, measure_distance_truncated

__all__ = [
    "LevyTriplet",
    "BoundConstants",
    "EXACT_CONSTANTS",
    "coupling_semimetric",
    "CouplingDistance",
    "default_lambda_grid",
    "coupling_distance",
    "PathBound",
    "path_space_bound",
    "theorem_bound",
]

JumpMeasure = PowerLawTail | StableTailMeasure | GaussianJumpLaw


@dataclass(frozen=True)
class LevyTriplet:
    drift: float
    diffusion: float
    jumps: JumpMeasure

    def __post_init__(self):
        if not self.diffusion >= 0:
            raise ValueError("diffusion variance must be non-negative")


@dataclass(frozen=True)
class BoundConstants:
    c0: float
    c1: float
    c2: float
    c3: float
    c4: float
    c5: float
    c6: float

    @classmethod
    def exact(cls) -> "BoundConstants":
        r = 3.0**0.75
        return cls(
            c0=math.atan(0.5),
            c1=4.0 / math.pi,
            c2=r / 2.0,
            c3=math.pi + r,
            c4=(math.pi + r) / 2.0,
            c5=3.0**1.5,
            c6=(2.0 * math.pi) ** 2,
        )

    def as_dict(self) -> dict[str, float]:
        return {f"C{i}": getattr(self, f"c{i}") for i in range(7)}


EXACT_CONSTANTS = BoundConstants.exact()


def coupling_semimetric(nu1, nu2, lam: float, s: float = 1.0, tol: float = 1e-10) -> float:
    """``sqrt(lam * W_s(nu1_rho1, nu2_rho2))`` with intensity-matched cutoffs."""
    s = check_truncation(s)
    rho1 = cutoff_for_intensity(nu1, lam)
    rho2 = cutoff_for_intensity(nu2, lam)
    if nu1 == nu2:
        return 0.0
    dist = measure_distance_truncated(normalized_tail(nu1, rho1), normalized_tail(nu2, rho2), s, tol=tol)
    return min(math.sqrt(lam * dist), math.sqrt(lam * s))


@dataclass(frozen=True)
class CouplingDistance:
    """Grid maximum of the semimetric; a lower approximation of the supremum."""

    value: float
    argmax: float
    lambda_grid: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)


def default_lambda_grid(nu1, nu2, points: int = 64, lo: float = 1e-2, hi: float = 1e3) -> np.ndarray:
    """Log-spaced intensities in ``[lo, hi]``, capped at the smaller total mass."""
    grid = np.logspace(math.log10(lo), math.log10(hi), points)
    cap = min(total_mass(nu1), total_mass(nu2))
    if cap < hi:
        grid = np.unique(np.append(grid[grid < cap], cap))
    return grid


def coupling_distance(nu1, nu2, s: float = 1.0, lambda_grid=None, workers: int = 1) -> CouplingDistance:
    grid = default_lambda_grid(nu1, nu2) if lambda_grid is None else np.asarray(lambda_grid, dtype=float)
    if grid.size == 0:
        raise ValueError("empty intensity grid")

    def one(lam):
        return coupling_semimetric(nu1, nu2, float(lam), s)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = np.array(list(pool.map(one, grid)))
    else:
        values = np.array([one(lam) for lam in grid])
    k = int(np.argmax(values))
    return CouplingDistance(float(values[k]), float(grid[k]), grid, values)


@dataclass(frozen=True)
class PathBound:
    q1: float
    q2: float
    bound: float
    semimetric: float
    small_jumps: tuple[float, float]
    constants: BoundConstants


def path_space_bound(
    dx: float,
    da: float,
    dsqrt_diffusion: float,
    small1: float,
    small2: float,
    semimetric: float,
    big_jump_mass: float,
    lam: float,
    ell: float,
    constants: BoundConstants = EXACT_CONSTANTS,
) -> tuple[float, float, float]:
    """Assemble ``(Q1, Q2, Q1 * exp(ell / C0) + Q2)`` from the difference terms.

    ``dx`` and ``da`` are the start-point and drift differences,
    ``dsqrt_diffusion`` is ``sqrt(A1) - sqrt(A2)``, ``small1``/``small2`` the
    small-jump variances, ``big_jump_mass`` the summed mass beyond 1.
    """
    c = constants
    t = semimetric
    d_diff = dsqrt_diffusion**2
    q1 = 2.0 * min(dx * dx, 1.0) + c.c1 * (
        c.c2 * abs(da)
        + d_diff
        + small1
        + small2
        + c.c3 * t * t
        + c.c4 * math.sqrt(min(big_jump_mass, lam)) * t
    )
    q2 = c.c1 * math.sqrt(c.c5 * d_diff + c.c6 * (small1 + small2 + t * t))
    return q1, q2, q1 * math.exp(ell / c.c0) + q2


def theorem_bound(
    triplet1: LevyTriplet,
    triplet2: LevyTriplet,
    x1: float,
    x2: float,
    ell: float,
    lam: float,
    s: float = 1.0,
    constants: BoundConstants = EXACT_CONSTANTS,
) -> PathBound:
    """Upper bound on the squared cutoff Wasserstein distance of two path laws."""
    if not ell > 0:
        raise ValueError("one-sided Lipschitz constant must be positive")
    nu1, nu2 = triplet1.jumps, triplet2.jumps
    rho1 = cutoff_for_intensity(nu1, lam)
    rho2 = cutoff_for_intensity(nu2, lam)
    small1 = small_jump_variance(nu1, rho1)
    small2 = small_jump_variance(nu2, rho2)
    t = coupling_semimetric(nu1, nu2, lam, s)
    big = tail_mass(nu1, 1.0) + tail_mass(nu2, 1.0)
    q1, q2, bound = path_space_bound(
        x1 - x2,
        triplet1.drift - triplet2.drift,
        math.sqrt(triplet1.diffusion) - math.sqrt(triplet2.diffusion),
        small1,
        small2,
        t,
        big,
        lam,
        ell,
        constants,
    )
    return PathBound(q1, q2, bound, t, (small1, small2), constants)
