"""Small distribution-free statistical helpers shared by the MC modules."""

from __future__ import annotations

import math

import numpy as np

__all__ = ["wilson_interval", "dkw_epsilon", "ks_statistic"]


def wilson_interval(successes: int, n: int, z: float = 2.5758293035489004):
    """Wilson score interval for a binomial proportion (default 99%)."""
    if n <= 0:
        raise ValueError("need at least one trial")
    phat = successes / n
    denom = 1.0 + z * z / n
    center = (phat + z * z / (2 * n)) / denom
    half = (z / denom) * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n))
    return max(0.0, center - half), min(1.0, center + half)


def dkw_epsilon(n: int, alpha: float = 0.01) -> float:
    """Dvoretzky-Kiefer-Wolfowitz uniform CDF half-band at level alpha."""
    if n <= 0:
        raise ValueError("need at least one sample")
    return math.sqrt(math.log(2.0 / alpha) / (2.0 * n))


def ks_statistic(sample_a, sample_b) -> float:
    """Two-sample Kolmogorov-Smirnov statistic with exact tie handling.

    Both empirical CDFs are evaluated by counting measure on the merged
    support, so ties across and within samples are handled exactly.
    """
    a = np.sort(np.asarray(sample_a, dtype=float))
    b = np.sort(np.asarray(sample_b, dtype=float))
    if len(a) == 0 or len(b) == 0:
        raise ValueError("both samples must be nonempty")
    grid = np.union1d(a, b)
    fa = np.searchsorted(a, grid, side="right") / len(a)
    fb = np.searchsorted(b, grid, side="right") / len(b)
    return float(np.max(np.abs(fa - fb)))
