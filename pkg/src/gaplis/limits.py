"""Limiting constants and fluctuation scales, closed-form or by fixed point.

Continuous model (unit-intensity Poisson, direction (a, b), gaps h):

    f(a, b)   = 2 sqrt(ab)
    f_h(a, b) = the unique root of  lam = 2 sqrt((a - h1 lam)(b - h2 lam))
              = 2ab / ( a h2 + b h1 + sqrt((a h2 - b h1)^2 + ab) )

The second line is the rationalized closed form; it agrees with the
two-branch textbook expression (generic branch for h1 h2 != 1/4, and
ab / (h1 b + h2 a) on the critical line) but has no cancellation near
h1 h2 = 1/4.  The fluctuation scale is

    sigma_h(a, b) = f_h^{4/3} / 2^{1/3}
                    / ( 2 (b h1 + a h2) + f_h (1 - 4 h1 h2) ).

Discrete model (Bernoulli(p) points; geometric(p) weights for T):

    g(a, b)   = sqrt(p) (2 sqrt(ab) + (a + b) sqrt(p)) / (1 - p)
    g_h(a, b) = root of  lam = g(a - h1 lam, b - h2 lam)   (interior), or
                a / h1, b / h2 on the flat edges, selected by
                a/b <= h1 / ((h2 - 1) + 1/p)         -> a / h1
                a/b >= (h1 - 1 + 1/p) / h2           -> b / h2

    sigma(a, b)   = p^{1/6} / (1 - p) (ab)^{-1/6}
                    (sqrt(a) + sqrt(pb))^{2/3} (sqrt(b) + sqrt(pa))^{2/3}
    sigma_h(a, b) = sigma(alpha, beta) sqrt(alpha beta / (ab)),
                    valid on the critical ray a / h1 = b / h2,

with (alpha, beta) the unique positive solution of
alpha + h1 g(alpha, beta) = a, beta + h2 g(alpha, beta) = b.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .model import as_gap

__all__ = [
    "LimitResult",
    "FluctuationScale",
    "AlphaBeta",
    "TracyWidomTable",
    "f_limit",
    "f_gap_limit",
    "sigma_gap_continuous",
    "g_limit",
    "g_gap_limit",
    "solve_alpha_beta",
    "sigma_johansson",
    "sigma_gap_discrete",
    "report_sandwich",
    "regime_limit",
    "f_closed_symmetric",
    "f_closed_halfplane",
    "g_closed_unit",
    "g_closed_nondecreasing",
    "g_closed_h0",
    "g_closed_symmetric",
    "sigma_closed_symmetric",
]

_FIXED_POINT_TOL = 1e-15
_MAX_BISECT = 200


@dataclass(frozen=True)
class LimitResult:
    value: float
    branch: str  # interior | flat_edge_a | flat_edge_b | critical
    residual: float


@dataclass(frozen=True)
class FluctuationScale:
    center: float
    scale: float
    exponent: float = 1.0 / 3.0


@dataclass(frozen=True)
class AlphaBeta:
    alpha: float
    beta: float
    residual: float


def _check_direction(a: float, b: float):
    if not (a > 0 and b > 0 and math.isfinite(a) and math.isfinite(b)):
        raise ValueError(f"direction components must be positive finite, got ({a!r}, {b!r})")


def _check_p(p: float):
    if not (0.0 < p < 1.0):
        raise ValueError(f"p must lie in (0, 1), got {p!r}")


# ---------------------------------------------------------------------------
# Continuous limits
# ---------------------------------------------------------------------------

def f_limit(a: float, b: float) -> float:
    """Plain-path limit constant 2 sqrt(ab)."""
    _check_direction(a, b)
    return 2.0 * math.sqrt(a * b)


def f_gap_limit(a: float, b: float, h) -> float:
    """Gapped limit constant, rationalized closed form (stable everywhere)."""
    _check_direction(a, b)
    h1, h2 = as_gap(h)
    return 2.0 * a * b / (a * h2 + b * h1 + math.sqrt((a * h2 - b * h1) ** 2 + a * b))


def f_closed_symmetric(hval: float) -> float:
    """Printed special case f_(h,h)(1, 1) = 2 / (1 + 2h)."""
    return 2.0 / (1.0 + 2.0 * hval)


def f_closed_halfplane(hval: float) -> float:
    """Printed special case f_(h,0)(1, 1) = 2 sqrt(h^2 + 1) - 2h."""
    return 2.0 * math.sqrt(hval * hval + 1.0) - 2.0 * hval


def f_gap_limit_branchy(a: float, b: float, h) -> float:
    """The two-branch textbook form of the gapped limit (for cross-checks)."""
    _check_direction(a, b)
    h1, h2 = as_gap(h)
    if h1 * h2 == 0.25:
        return a * b / (h1 * b + h2 * a)
    num = 2.0 * (a * h2 + b * h1) - 2.0 * math.sqrt((a * h2 - b * h1) ** 2 + a * b)
    return num / (4.0 * h1 * h2 - 1.0)


def sigma_gap_continuous(a: float, b: float, h) -> FluctuationScale:
    """Cube-root fluctuation scale around f_h."""
    _check_direction(a, b)
    h1, h2 = as_gap(h)
    fh = f_gap_limit(a, b, (h1, h2))
    denom = 2.0 * (b * h1 + a * h2) + fh * (1.0 - 4.0 * h1 * h2)
    scale = fh ** (4.0 / 3.0) / (2.0 ** (1.0 / 3.0)) / denom
    return FluctuationScale(center=fh, scale=scale)


# ---------------------------------------------------------------------------
# Discrete limits
# ---------------------------------------------------------------------------

def g_limit(a: float, b: float, p: float) -> float:
    """Last-passage limit sqrt(p)(2 sqrt(ab) + (a+b) sqrt(p)) / (1 - p).

    Extended to the closed quadrant by continuity (a = 0 or b = 0 allowed).
    """
    if a < 0 or b < 0:
        raise ValueError("direction components must be >= 0")
    _check_p(p)
    sp = math.sqrt(p)
    return sp * (2.0 * math.sqrt(a * b) + (a + b) * sp) / (1.0 - p)


def _flat_edge_thresholds(h1: int, h2: int, p: float) -> tuple[float, float]:
    lo = h1 / ((h2 - 1) + 1.0 / p)  # ratio a/b at or below which g_h = a/h1
    hi = (h1 - 1 + 1.0 / p) / h2 if h2 > 0 else math.inf
    return lo, hi


def g_gap_limit(a: float, b: float, h, p: float) -> LimitResult:
    """Gapped lattice limit constant with flat-edge branch selection.

    Interior directions solve lam = g(a - h1 lam, b - h2 lam) by bisection
    on [0, lam0], lam0 = min(a/h1, b/h2) over the positive gap components;
    the right-hand side minus lam is strictly decreasing, so bisection is
    unconditional.  Threshold ties are assigned to the flat edge (branch
    tag 'critical'), where both branches agree by continuity.
    """
    _check_direction(a, b)
    _check_p(p)
    h1, h2 = (int(v) for v in as_gap(h, discrete=True))
    lo, hi = _flat_edge_thresholds(h1, h2, p)
    r = a / b
    if r == lo or r == hi:
        value = a / h1 if r == lo else b / h2
        return LimitResult(value=value, branch="critical", residual=0.0)
    if r < lo:
        return LimitResult(value=a / h1, branch="flat_edge_a", residual=0.0)
    if r > hi:
        return LimitResult(value=b / h2, branch="flat_edge_b", residual=0.0)
    lam0 = min(a / h1 if h1 > 0 else math.inf, b / h2 if h2 > 0 else math.inf)
    lam_lo, lam_hi = 0.0, lam0

    def excess(lam: float) -> float:
        return g_limit(max(a - h1 * lam, 0.0), max(b - h2 * lam, 0.0), p) - lam

    for _ in range(_MAX_BISECT):
        mid = 0.5 * (lam_lo + lam_hi)
        if mid == lam_lo or mid == lam_hi:
            break  # interval is one ulp wide
        if excess(mid) > 0.0:
            lam_lo = mid
        else:
            lam_hi = mid
        if lam_hi - lam_lo < _FIXED_POINT_TOL:
            break
    lam = 0.5 * (lam_lo + lam_hi)
    return LimitResult(value=lam, branch="interior", residual=abs(excess(lam)))


def g_closed_unit(a: float, b: float, p: float) -> float:
    """Printed closed form for unit gaps: increasing lattice paths."""
    _check_direction(a, b)
    _check_p(p)
    if p < min(a / b, b / a):
        sp = math.sqrt(p)
        return sp * (2.0 * math.sqrt(a * b) - (a + b) * sp) / (1.0 - p)
    return min(a, b)


def g_closed_nondecreasing(a: float, b: float, p: float) -> float:
    """Printed closed form for gaps (1, 0): non-decreasing lattice paths."""
    _check_direction(a, b)
    _check_p(p)
    if p < a / (a + b):
        return 2.0 * math.sqrt(a * b * p * (1.0 - p)) + (a - b) * p
    return a


def g_closed_h0(hval: int, p: float) -> float:
    """Printed closed form for gaps (h, 0) in the diagonal direction (1, 1)."""
    _check_p(p)
    if p < 1.0 / (hval + 1.0):
        q = (1.0 - p + hval * hval * p) * (1.0 - p)
        num = 2.0 * (1.0 + hval) * p * (1.0 - p) + 2.0 * math.sqrt(p * q)
        den = (hval * math.sqrt(p) + math.sqrt(q)) ** 2
        return num / den
    return 1.0 / hval


def g_closed_symmetric(hval: int, p: float) -> float:
    """Printed closed form for gaps (h, h) in the diagonal direction (1, 1)."""
    _check_p(p)
    sp = math.sqrt(p)
    return 2.0 * sp / (1.0 + (2.0 * hval - 1.0) * sp)


def solve_alpha_beta(a: float, b: float, h, p: float) -> AlphaBeta:
    """The unique (alpha, beta) with alpha + h1 g(alpha, beta) = a, etc.

    Requires the strictly interior regime; flat-edge directions have no
    positive solution and raise.
    """
    h1, h2 = (int(v) for v in as_gap(h, discrete=True))
    res = g_gap_limit(a, b, (h1, h2), p)
    lam0 = min(a / h1 if h1 > 0 else math.inf, b / h2 if h2 > 0 else math.inf)
    if res.branch != "interior" or not res.value < lam0:
        raise ValueError(
            f"direction ({a}, {b}) is on a flat edge for h=({h1},{h2}), p={p}; "
            "no positive (alpha, beta) exists"
        )
    lam = res.value
    alpha, beta = a - h1 * lam, b - h2 * lam
    r1 = abs(alpha + h1 * g_limit(alpha, beta, p) - a)
    r2 = abs(beta + h2 * g_limit(alpha, beta, p) - b)
    return AlphaBeta(alpha=alpha, beta=beta, residual=max(r1, r2))


def sigma_johansson(a: float, b: float, p: float) -> float:
    """Cube-root fluctuation scale of geometric last-passage times."""
    _check_direction(a, b)
    _check_p(p)
    return (
        p ** (1.0 / 6.0)
        / (1.0 - p)
        * (a * b) ** (-1.0 / 6.0)
        * (math.sqrt(a) + math.sqrt(p * b)) ** (2.0 / 3.0)
        * (math.sqrt(b) + math.sqrt(p * a)) ** (2.0 / 3.0)
    )


def sigma_gap_discrete(a: float, b: float, h, p: float) -> FluctuationScale:
    """Fluctuation scale of the gapped lattice model on the critical ray.

    Only the direction a / h1 = b / h2 admits a sharp scale,
    sigma(alpha, beta) sqrt(alpha beta / (ab)); off the ray only sandwich
    bounds are available (see report_sandwich).
    """
    _check_direction(a, b)
    h1, h2 = (int(v) for v in as_gap(h, discrete=True))
    if h1 < 1 or h2 < 1 or a * h2 != b * h1:
        raise ValueError(
            f"sharp discrete scale needs the critical direction a/h1 = b/h2 "
            f"with positive gaps; got a={a}, b={b}, h=({h1},{h2})"
        )
    res = g_gap_limit(a, b, (h1, h2), p)
    if res.branch != "interior":
        raise ValueError("critical direction fell on a flat edge; no sharp scale")
    ab = solve_alpha_beta(a, b, (h1, h2), p)
    scale = sigma_johansson(ab.alpha, ab.beta, p) * math.sqrt(ab.alpha * ab.beta / (a * b))
    return FluctuationScale(center=res.value, scale=scale)


def sigma_closed_symmetric(hval: int, p: float) -> float:
    """Printed special case for gaps (h, h), direction (1, 1)."""
    _check_p(p)
    sp = math.sqrt(p)
    return (1.0 - p) ** (1.0 / 3.0) * p ** (1.0 / 6.0) / (1.0 + (2.0 * hval - 1.0) * sp) ** (4.0 / 3.0)


# ---------------------------------------------------------------------------
# Tracy-Widom reference table and sandwich bounds
# ---------------------------------------------------------------------------

class TracyWidomTable:
    """User-supplied CDF table, CSV columns ``x,F`` with strictly increasing x.

    The table is consumed, never computed; evaluation interpolates
    linearly and clamps to the tabulated range.
    """

    def __init__(self, xs, fs):
        xs = np.asarray(xs, dtype=float)
        fs = np.asarray(fs, dtype=float)
        if xs.ndim != 1 or xs.shape != fs.shape or len(xs) < 2:
            raise ValueError("table needs matching 1-d x and F columns, length >= 2")
        if np.any(np.diff(xs) <= 0):
            raise ValueError("table x column must be strictly increasing")
        if np.any(fs < 0) or np.any(fs > 1) or np.any(np.diff(fs) < 0):
            raise ValueError("table F column must be a CDF")
        self.xs, self.fs = xs, fs

    @classmethod
    def from_csv(cls, path) -> "TracyWidomTable":
        rows = Path(path).read_text().strip().splitlines()
        if not rows or rows[0].strip().lower() != "x,f":
            raise ValueError(f"{path}: expected CSV header 'x,F'")
        xs, fs = [], []
        for ln in rows[1:]:
            if not ln.strip():
                continue
            sx, sf = ln.split(",")
            xs.append(float(sx))
            fs.append(float(sf))
        return cls(xs, fs)

    def cdf(self, x: float) -> float:
        if math.isinf(x):
            return 1.0 if x > 0 else 0.0
        return float(np.interp(x, self.xs, self.fs))


def report_sandwich(a: float, b: float, h, p: float, x: float, table: TracyWidomTable):
    """CDF bounds for standardized gapped-length fluctuations at x.

    With (alpha, beta) from the interior regime and a/h1 <= b/h2, the
    limit CDF at x >= 0 is squeezed between F(b x / beta) and
    F(a x / alpha); the roles swap for x < 0, and for a/h1 > b/h2 the
    direction is transposed.  On the critical ray the bounds collapse.
    """
    if table is None:
        raise ValueError("a reference CDF table is required for sandwich bounds")
    _check_direction(a, b)
    h1, h2 = (int(v) for v in as_gap(h, discrete=True))
    if h1 >= 1 and h2 >= 1 and a * h2 > b * h1:
        return report_sandwich(b, a, (h2, h1), p, x, table)
    ab = solve_alpha_beta(a, b, (h1, h2), p)
    ra, rb = a / ab.alpha, b / ab.beta
    if x >= 0:
        return table.cdf(rb * x), table.cdf(ra * x)
    return table.cdf(ra * x), table.cdf(rb * x)


# ---------------------------------------------------------------------------
# Scaling regimes when gaps and intensity vary together
# ---------------------------------------------------------------------------

def regime_limit(c: float, a: float, b: float) -> tuple[str, float]:
    """Limit of the gapped length when gaps h_t and intensity lam_t vary.

    ``c`` is the limit of h_t sqrt(lam_t).  For c = 0 the plain constant
    rules at scale sqrt(lam_t) t; for finite c > 0 the gapped constant
    with gaps (c, c) does; for c = infinity the length saturates the
    deterministic gap bound and min(a, b) emerges at scale t / h_t.
    """
    _check_direction(a, b)
    if c < 0 or math.isnan(c):
        raise ValueError("c must lie in [0, +inf]")
    if c == 0:
        return ("sqrt_lambda_t", f_limit(a, b))
    if math.isinf(c):
        return ("t_over_h", min(a, b))
    return ("sqrt_lambda_t", f_gap_limit(a, b, (c, c)))
