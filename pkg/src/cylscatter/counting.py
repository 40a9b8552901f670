"""Divisor-count diagnostics and lattice-point counts for the pair statistics.

The off-diagonal terms of the pair correlation of the model phase shifts
reduce to counting solutions of h_1 delta_1 = h_2 delta_2 type divisor
conditions; this module provides the raw counts and the second-moment
normalisation sum_{n <= N} d(n)^2 ~ (1/pi^2) N log^3 N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError

__all__ = [
    "divisor_table",
    "ramanujan_ratio",
    "count_F",
    "count_G",
    "MeanValuePoint",
    "mean_value_point",
]


def divisor_table(n: int) -> np.ndarray:
    """d(k) for k = 0..n (d[0] = 0 by convention), by sieving multiples."""
    if n < 1:
        raise DomainError(f"divisor_table needs n >= 1, got {n}")
    d = np.zeros(n + 1, dtype=np.int64)
    for i in range(1, n + 1):
        d[i::i] += 1
    return d


def ramanujan_ratio(n: int) -> float:
    """sum_{k <= n} d(k)^2 / (n log^3 n); tends to 1/pi^2 slowly from above."""
    if n < 2:
        raise DomainError(f"ramanujan_ratio needs n >= 2, got {n}")
    d = divisor_table(n)
    total = int(np.sum(d * d))
    return total / (n * math.log(n) ** 3)


def count_F(lam: int, ell2: int) -> int:
    """Number of (h_1, h_2, signs) with 1 <= h_i <= lam and h_1 | ell2 h_2.

    Counts 4 # {(h_1, h_2) : h_1 divides |ell2| h_2}; the factor 4 is the
    sign choices of the two frequency indices.
    """
    if lam < 1:
        raise DomainError(f"count_F needs lam >= 1, got {lam}")
    if ell2 == 0:
        raise DomainError("count_F is defined for nonzero ell2")
    m = abs(ell2)
    total = 0
    for h1 in range(1, lam + 1):
        # h1 | m h2  <=>  (h1/g) | h2 with g = gcd(h1, m)
        step = h1 // math.gcd(h1, m)
        total += lam // step
    return 4 * total


def count_G(lam: int, n: int) -> int:
    """2 sum_{ell2 = 1}^{n} F(lam, ell2); grows like n lam log^2 lam."""
    if n < 1:
        raise DomainError(f"count_G needs n >= 1, got {n}")
    return 2 * sum(count_F(lam, ell2) for ell2 in range(1, n + 1))


@dataclass(frozen=True)
class MeanValuePoint:
    """Intermediate point of the mean value theorem for a phase increment.

    Xi solves  Phi((m+h)/2 lam) - Phi((m-h)/2 lam) = (h/lam) Phi'(Xi/lam),
    with Xi strictly between (m-|h|)/2 and (m+|h|)/2.
    """

    m: float
    h: float
    lam: float
    xi: float
    residual: float


def mean_value_point(phi, dphi, m: float, h: float, lam: float) -> MeanValuePoint:
    """Solve for the mean value point Xi of the secant of Phi.

    ``phi`` and ``dphi`` are the family phase and its derivative as
    functions of x = k/lam.  The bracket endpoints are the midpoints
    shifted by |h|/2; for strictly convex or concave Phi the root is
    unique in that interval.
    """
    if h == 0:
        raise DomainError("mean_value_point needs h != 0")
    target = (phi((m + h) / (2.0 * lam)) - phi((m - h) / (2.0 * lam))) * lam / h

    def g(xi):
        return dphi(xi / lam) - target

    lo = (m - abs(h)) / 2.0
    hi = (m + abs(h)) / 2.0
    shrink = 1e-12 * (hi - lo)
    glo, ghi = g(lo + shrink), g(hi - shrink)
    if glo * ghi > 0:
        # fall back to a scan; dphi need not be monotone for exotic phases
        grid = np.linspace(lo + shrink, hi - shrink, 257)
        vals = np.array([g(u) for u in grid])
        idx = np.nonzero(np.diff(np.sign(vals)) != 0)[0]
        if len(idx) == 0:
            raise DomainError(
                f"no mean value point bracketed in ({lo:.6g}, {hi:.6g})"
            )
        lo, hi = grid[idx[0]], grid[idx[0] + 1]
    else:
        lo, hi = lo + shrink, hi - shrink
    xi = brentq(g, lo, hi, xtol=1e-14, rtol=8.9e-16)
    return MeanValuePoint(m=m, h=h, lam=lam, xi=float(xi), residual=abs(g(xi)))
