"""Exhaustive small-instance distributions: the ground truth for couplings.

Distributions are computed by enumerating every configuration (2^(mn) bit
fields, or (k+1)^(mn) weight matrices with entries capped at k) and
bucketing by path length.  Buckets are counted once per geometry and
reused across p values, and probabilities are assembled in exact rational
arithmetic whenever p is a Fraction, so identity checks can demand
discrepancy exactly 0.

The weight-matrix truncation is sound because every cell lies on some
monotone path: T >= max entry, so matrices with an entry above k can
never contribute to P(T <= k).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .model import BitField, as_gap

__all__ = [
    "InstanceTooLarge",
    "ExactDist",
    "exact_dist_gap_lis",
    "exact_dist_lpp",
    "verify_gap_vs_lpp",
    "verify_gap_vs_unit",
    "brute_chains",
]

MAX_ENUM_CELLS = 20
MAX_LPP_WORK = 4_000_000


class InstanceTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class ExactDist:
    """Finite pmf over path-length values; exact when masses are Fractions."""

    support: tuple
    mass: tuple
    truncated: bool = False

    def __post_init__(self):
        if len(self.support) != len(self.mass):
            raise ValueError("support and mass must align")
        total = sum(self.mass)
        if self.truncated:
            if not total <= 1:
                raise ValueError("truncated distribution exceeds total mass 1")
        else:
            err = total - 1
            if isinstance(err, Fraction):
                if err != 0:
                    raise ValueError(f"total mass {total} != 1")
            elif abs(err) > 1e-14:
                raise ValueError(f"total mass {total} != 1")

    @property
    def exact(self) -> bool:
        return all(isinstance(v, Fraction) for v in self.mass)

    def cdf(self, k):
        return sum(v for s, v in zip(self.support, self.mass) if s <= k)


def _norm_p(p):
    """Fractions stay exact; everything else becomes float."""
    if isinstance(p, Fraction):
        pass
    elif isinstance(p, str):
        p = Fraction(p)
    elif isinstance(p, int):
        p = Fraction(p)
    else:
        p = float(p)
    if not (0 < p < 1):
        raise ValueError(f"p must lie in (0, 1), got {p!r}")
    return p


@lru_cache(maxsize=None)
def _gap_length_buckets(m: int, n: int, h1: int, h2: int):
    """counts[(ones, length)] over all 2^(mn) bit fields.

    Depth-first over cells in row-major order, extending the running
    prefix-maximum table by one entry per level, so each enumeration node
    costs O(1) instead of re-running the whole dynamic program per field.
    """
    cells = m * n
    if cells > MAX_ENUM_CELLS:
        raise InstanceTooLarge(f"{m} x {n} needs 2^{cells} fields; cap is 2^{MAX_ENUM_CELLS}")
    counts: dict[tuple[int, int], int] = {}
    M = [[0] * (m + 1) for _ in range(n + 1)]

    def rec(c: int, ones: int):
        if c == cells:
            key = (ones, M[n][m])
            counts[key] = counts.get(key, 0) + 1
            return
        j, i = divmod(c, m)
        i += 1
        j += 1
        row = M[j]
        left = row[i - 1]
        down = M[j - 1][i]
        base = left if left >= down else down
        row[i] = base
        rec(c + 1, ones)
        pi, pj = i - h1, j - h2
        v = 1 + (M[pj][pi] if (pi >= 0 and pj >= 0) else 0)
        row[i] = base if base >= v else v
        rec(c + 1, ones + 1)

    rec(0, 0)
    return counts


@lru_cache(maxsize=None)
def _lpp_buckets(m: int, n: int, kmax: int):
    """counts[(weight_sum, T)] over matrices with entries in {0..kmax}."""
    cells = m * n
    if (kmax + 1) ** cells > MAX_LPP_WORK:
        raise InstanceTooLarge(
            f"{m} x {n} with entries <= {kmax} needs {(kmax + 1) ** cells} matrices"
        )
    counts: dict[tuple[int, int], int] = {}
    T = [[0] * (m + 1) for _ in range(n + 1)]

    def rec(c: int, s: int):
        if c == cells:
            key = (s, T[n][m])
            counts[key] = counts.get(key, 0) + 1
            return
        j, i = divmod(c, m)
        i += 1
        j += 1
        row = T[j]
        left = row[i - 1]
        down = T[j - 1][i]
        base = left if left >= down else down
        for w in range(kmax + 1):
            row[i] = base + w
            rec(c + 1, s + w)

    rec(0, 0)
    return counts


def exact_dist_gap_lis(m: int, n: int, p, h) -> ExactDist:
    """Exact distribution of the gapped path length on an m x n field."""
    h1, h2 = (int(v) for v in as_gap(h, discrete=True))
    p = _norm_p(p)
    if m <= 0 or n <= 0:
        return ExactDist((0,), (_unit_one(p),))
    buckets = _gap_length_buckets(m, n, h1, h2)
    cells = m * n
    q = 1 - p
    mass: dict[int, object] = {}
    for (ones, length), cnt in buckets.items():
        mass[length] = mass.get(length, 0) + cnt * p**ones * q ** (cells - ones)
    support = tuple(sorted(mass))
    return ExactDist(support, tuple(mass[s] for s in support))


def exact_dist_lpp(m: int, n: int, p, k_max: int) -> ExactDist:
    """Exact distribution of T on an m x n geometric field, truncated at k_max."""
    p = _norm_p(p)
    if m <= 0 or n <= 0:
        return ExactDist((0,), (_unit_one(p),))
    buckets = _lpp_buckets(m, n, int(k_max))
    cells = m * n
    q = 1 - p
    mass: dict[int, object] = {}
    for (s, t), cnt in buckets.items():
        if t <= k_max:
            mass[t] = mass.get(t, 0) + cnt * p**s * q**cells
    support = tuple(sorted(mass))
    return ExactDist(support, tuple(mass[s] for s in support), truncated=True)


def _unit_one(p):
    return Fraction(1) if isinstance(p, Fraction) else 1.0


def verify_gap_vs_lpp(m: int, n: int, h, p, k_range) -> dict:
    """Exact check of P(gapped length at (m,n) <= k) = P(T at shrunk corner <= k).

    The right side translates the corner to (m - h1 k, n - h2 k); when a
    coordinate drops to zero or below, T := 0 and the probability is 1.
    """
    h1, h2 = (int(v) for v in as_gap(h, discrete=True))
    p = _norm_p(p)
    lhs_dist = exact_dist_gap_lis(m, n, p, (h1, h2))
    rows = []
    for k in sorted(int(k) for k in k_range):
        lhs = lhs_dist.cdf(k)
        mi, ni = m - h1 * k, n - h2 * k
        if mi <= 0 or ni <= 0:
            rhs = _unit_one(p)
        else:
            rhs = exact_dist_lpp(mi, ni, p, k).cdf(k)
        rows.append({"k": k, "lhs": lhs, "rhs": rhs, "equal": lhs == rhs})
    return _verdict(rows)


def verify_gap_vs_unit(m: int, n: int, h, p, k_range) -> dict:
    """Exact check of P(gapped length <= k) = P(unit-gap length at adjusted corner <= k).

    The adjusted corner is (m - (h1-1) k, n - (h2-1) k); a zero-gap
    component grows the corresponding extent instead of shrinking it.
    """
    h1, h2 = (int(v) for v in as_gap(h, discrete=True))
    p = _norm_p(p)
    lhs_dist = exact_dist_gap_lis(m, n, p, (h1, h2))
    rows = []
    for k in sorted(int(k) for k in k_range):
        lhs = lhs_dist.cdf(k)
        mi, ni = m - (h1 - 1) * k, n - (h2 - 1) * k
        if mi <= 0 or ni <= 0:
            rhs = _unit_one(p)
        else:
            rhs = exact_dist_gap_lis(mi, ni, p, (1, 1)).cdf(k)
        rows.append({"k": k, "lhs": lhs, "rhs": rhs, "equal": lhs == rhs})
    return _verdict(rows)


def _verdict(rows) -> dict:
    disc = max(abs(r["lhs"] - r["rhs"]) for r in rows)
    return {
        "rows": rows,
        "all_equal": all(r["equal"] for r in rows),
        "max_abs_discrepancy": disc,
    }


def brute_chains(obj, h) -> int:
    """Maximum chain length by exhaustive subset filtering.

    Deliberately naive (checks every subset), so it shares no logic with
    the production solvers it certifies.  Limit: 12 points.
    """
    if isinstance(obj, BitField):
        pts = [(float(i), float(j)) for i, j in obj.ones()]
        h1, h2 = as_gap(h, discrete=True)
    else:
        pts = [(float(x), float(y)) for x, y in (obj.points() if hasattr(obj, "points") else obj)]
        h1, h2 = as_gap(h)
    npts = len(pts)
    if npts > 12:
        raise InstanceTooLarge(f"{npts} points exceed the brute-force cap of 12")
    pts.sort()
    best = 0
    for mask in range(1 << npts):
        sel = [pts[i] for i in range(npts) if mask >> i & 1]
        if len(sel) <= best:
            continue
        ok = all(
            sel[i][0] + h1 <= sel[i + 1][0] and sel[i][1] + h2 <= sel[i + 1][1]
            for i in range(len(sel) - 1)
        )
        if ok:
            best = len(sel)
    return best
