"""Adaptive Simpson quadrature with an evaluation budget.

Panels are refined breadth-first so that the integrand is evaluated on whole
arrays of abscissae at a time; the integrand must therefore accept and return
numpy arrays.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

from .errors import QuadratureError

__all__ = ["adaptive_simpson"]

_EPS = np.finfo(float).eps


def adaptive_simpson(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    tol: float = 1e-10,
    max_evals: int = 10**6,
    max_depth: int = 60,
    breakpoints: Sequence[float] = (),
) -> float:
    """Integrate the vectorized function ``f`` over ``[a, b]``.

    The interval is first cut at ``breakpoints`` (points outside ``(a, b)``
    are ignored) and the absolute tolerance ``tol`` is shared among panels in
    proportion to their width. Each panel is bisected until the
    Richardson-corrected Simpson estimate is locally converged. Raises
    ``QuadratureError`` if more than ``max_evals`` evaluations are needed.
    """
    if b == a:
        return 0.0
    if not b > a:
        raise ValueError("require a <= b")
    cuts = np.array(sorted({a, b, *(float(p) for p in breakpoints if a < p < b)}))
    x0, x1 = cuts[:-1], cuts[1:]
    xm = 0.5 * (x0 + x1)
    fx = np.asarray(f(cuts), dtype=float)
    f0, f1 = fx[:-1], fx[1:]
    fm = np.asarray(f(xm), dtype=float)
    evals = cuts.size + xm.size
    est = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1)
    eps = tol * (x1 - x0) / (b - a)
    depth = 0
    accepted: list[np.ndarray] = []
    while x0.size:
        evals += 2 * x0.size
        if evals > max_evals:
            raise QuadratureError(f"adaptive Simpson exceeded {max_evals} evaluations")
        lm = 0.5 * (x0 + xm)
        rm = 0.5 * (xm + x1)
        flm = np.asarray(f(lm), dtype=float)
        frm = np.asarray(f(rm), dtype=float)
        left = (xm - x0) / 6.0 * (f0 + 4.0 * flm + fm)
        right = (x1 - xm) / 6.0 * (fm + 4.0 * frm + f1)
        both = left + right
        delta = both - est
        noise = 64.0 * _EPS * (np.abs(left) + np.abs(right))
        tiny = (xm - x0) <= _EPS * np.maximum(np.maximum(np.abs(x0), np.abs(x1)), 1.0)
        done = (np.abs(delta) <= 15.0 * np.maximum(eps, noise)) | tiny
        if depth >= max_depth:
            done[:] = True
        accepted.append((both + delta / 15.0)[done])
        keep = ~done
        if not keep.any():
            break
        x0, xm, x1 = x0[keep], xm[keep], x1[keep]
        f0, fm, f1 = f0[keep], fm[keep], f1[keep]
        flm, frm = flm[keep], frm[keep]
        left, right, eps = left[keep], right[keep], 0.5 * eps[keep]
        x0, xm, x1 = np.concatenate((x0, xm)), np.concatenate((lm[keep], rm[keep])), np.concatenate((xm, x1))
        f0, fm, f1 = np.concatenate((f0, fm)), np.concatenate((flm, frm)), np.concatenate((fm, f1))
        est = np.concatenate((left, right))
        eps = np.concatenate((eps, eps))
        depth += 1
    total = np.concatenate(accepted) if accepted else np.zeros(0)
    if not np.all(np.isfinite(total)):
        raise QuadratureError("integrand is not finite on the integration range")
    return math.fsum(total.tolist())
