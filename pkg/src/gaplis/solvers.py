"""Exact solvers for gapped increasing paths and last-passage times.

Three quantities, each with its own solver:

* ``gap_lis_continuous``  -- longest chain p_1 < p_2 < ... in a point
  cloud under the gap order (x-gaps h1, y-gaps h2), restricted to an open
  rectangle.  O(n log n) sweep: a point becomes eligible as a predecessor
  only once the sweep abscissa passes its x + h1, and eligible points are
  summarized by a patience-style ``tails`` array (tails[l] = least
  ordinate ending a chain of length l+1 among eligible points).
* ``gap_lis_discrete``    -- the lattice analog on a 0/1 field, by an
  O(mn) running-prefix-maximum dynamic program:
      best(i, j) = bit(i, j) * (1 + M(i - h1, j - h2))
  where M is the rectangular prefix maximum of best.
* ``lpp_geometric``       -- last-passage times over North/East lattice
  paths, T(i, j) = w(i, j) + max(T(i-1, j), T(i, j-1)), vectorized one
  line at a time through the cumulative-sum identity
      T(i, j) = S_j(i) + max_{i' <= i} (T(i', j-1) - S_j(i'-1)).

Boundary conventions: continuous regions are open rectangles (points
exactly on the boundary are excluded); lengths over empty or negative
regions are 0.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass

import numpy as np

from .model import BitField, PointCloud, WeightField, as_gap

__all__ = [
    "PathResult",
    "gap_lis_continuous",
    "patience_lis",
    "point_levels_continuous",
    "gap_lis_discrete",
    "gap_lis_table",
    "lis_11_table",
    "lpp_geometric",
    "lpp_table",
]


@dataclass(frozen=True)
class PathResult:
    """Length of a maximizing path, with an optional explicit witness.

    For chain problems the witness is a list of points/cells, pairwise
    ordered by the gap order; for last-passage times it is the maximizing
    North/East lattice path (cell count m + n - 1, weight sum = length).
    """

    length: int
    witness: list | None = None


# ---------------------------------------------------------------------------
# Continuous solvers
# ---------------------------------------------------------------------------

def _sweep_levels(xs, ys, h1, h2, want_parents=False):
    """Per-point chain levels under the gap order.

    Returns ``best`` with best[k] = length of the longest admissible chain
    ending at point k (points sorted by x), and optionally parent indices
    for witness reconstruction.  A chain ending at point k lies entirely in
    the open rectangle south-west of k, so regional maxima can be read off
    ``best`` afterwards without re-solving.
    """
    n = len(xs)
    best = np.zeros(n, dtype=np.int64)
    parents = np.full(n, -1, dtype=np.int64) if want_parents else None
    tails: list[float] = []      # tails[l-1] = min ending y over eligible chains of length l
    tails_idx: list[int] = []
    pend = 0
    xs_l = xs.tolist()
    ys_l = ys.tolist()
    for k in range(n):
        xk = xs_l[k]
        yk = ys_l[k]
        while pend < k and xs_l[pend] + h1 <= xk:
            lv = int(best[pend])
            ype = ys_l[pend]
            if lv > len(tails):
                tails.append(ype)
                tails_idx.append(pend)
            elif ype < tails[lv - 1]:
                tails[lv - 1] = ype
                tails_idx[lv - 1] = pend
            pend += 1
        q = bisect_right(tails, yk - h2)
        best[k] = q + 1
        if want_parents and q >= 1:
            parents[k] = tails_idx[q - 1]
    return best, parents


def point_levels_continuous(cloud: PointCloud, h) -> np.ndarray:
    """best[k] = longest gap-chain ending at cloud point k (x-sorted order)."""
    h1, h2 = as_gap(h)
    best, _ = _sweep_levels(cloud.xs, cloud.ys, h1, h2)
    return best


def gap_lis_continuous(cloud: PointCloud, region, h, witness: bool = False) -> PathResult:
    """Longest gap-constrained increasing chain inside the open rectangle.

    ``region`` is the pair (x, t); points with coordinate exactly x or t
    are excluded.  Nonpositive region sides give length 0.
    """
    h1, h2 = as_gap(h)
    x, t = float(region[0]), float(region[1])
    if x <= 0 or t <= 0 or len(cloud) == 0:
        return PathResult(0, [] if witness else None)
    keep = (cloud.xs < x) & (cloud.ys < t)
    xs, ys = cloud.xs[keep], cloud.ys[keep]
    if len(xs) == 0:
        return PathResult(0, [] if witness else None)
    best, parents = _sweep_levels(xs, ys, h1, h2, want_parents=witness)
    k = int(np.argmax(best))
    length = int(best[k])
    if not witness:
        return PathResult(length)
    chain = []
    while k >= 0:
        chain.append((float(xs[k]), float(ys[k])))
        k = int(parents[k])
    chain.reverse()
    return PathResult(length, chain)


def patience_lis(cloud: PointCloud, region, witness: bool = False) -> PathResult:
    """Classic longest increasing subsequence by patience sorting.

    Independent of the gapped sweep; must agree with
    ``gap_lis_continuous(..., h=(0, 0))`` on every cloud.
    """
    x, t = float(region[0]), float(region[1])
    if x <= 0 or t <= 0 or len(cloud) == 0:
        return PathResult(0, [] if witness else None)
    keep = (cloud.xs < x) & (cloud.ys < t)
    xs, ys = cloud.xs[keep], cloud.ys[keep]
    n = len(xs)
    if n == 0:
        return PathResult(0, [] if witness else None)
    tails: list[float] = []
    tails_idx: list[int] = []
    parents = np.full(n, -1, dtype=np.int64) if witness else None
    ys_l = ys.tolist()
    for k in range(n):
        y = ys_l[k]
        pos = bisect_left(tails, y)
        if pos == len(tails):
            tails.append(y)
            tails_idx.append(k)
        else:
            tails[pos] = y
            tails_idx[pos] = k
        if witness and pos >= 1:
            parents[k] = tails_idx[pos - 1]
    length = len(tails)
    if not witness:
        return PathResult(length)
    k = tails_idx[-1]
    chain = []
    while k >= 0:
        chain.append((float(xs[k]), float(ys[k])))
        k = int(parents[k])
    chain.reverse()
    return PathResult(length, chain)


# ---------------------------------------------------------------------------
# Discrete solvers
# ---------------------------------------------------------------------------

def _best_table_discrete(bits: np.ndarray, h1: int, h2: int) -> np.ndarray:
    """Per-cell chain levels; requires h1 >= 1 (callers transpose otherwise).

    Column sweep with delayed availability: column i - h1 enters the
    running prefix-maximum ``A`` (over rows) just before column i is
    scored, so the predecessor rectangle (i - h1, j - h2) is exact.
    """
    m, n = bits.shape
    best = np.zeros((m, n), dtype=np.int64)
    A = np.zeros(n, dtype=np.int64)
    pred = np.zeros(n, dtype=np.int64)
    for i in range(m):
        if i - h1 >= 0:
            np.maximum(A, np.maximum.accumulate(best[i - h1]), out=A)
        if h2 == 0:
            pred[:] = A
        else:
            pred[:h2] = 0
            pred[h2:] = A[: n - h2]
        np.multiply(bits[i], pred + 1, out=best[i])
    return best


def _length_only_discrete(bits: np.ndarray, h1: int, h2: int) -> int:
    """Like _best_table_discrete but O(h1 * n) memory, for large fields."""
    m, n = bits.shape
    A = np.zeros(n, dtype=np.int64)
    ring: list[np.ndarray] = []
    top = 0
    for i in range(m):
        if i - h1 >= 0:
            np.maximum(A, np.maximum.accumulate(ring.pop(0)), out=A)
        if h2 == 0:
            pred = A
        else:
            pred = np.zeros(n, dtype=np.int64)
            pred[h2:] = A[: n - h2]
        col = bits[i] * (pred + 1)
        ring.append(col)
        cm = int(col.max()) if n else 0
        if cm > top:
            top = cm
    return top


def gap_lis_table(field: BitField, h) -> np.ndarray:
    """Padded prefix table L of gapped path lengths.

    L[i, j] = length over the cell rectangle [1..i] x [1..j]; row/column 0
    are zero so L[i-1, j-1] lookups never special-case the border.
    """
    h1, h2 = _discrete_gaps(h)
    if h1 >= 1:
        best = _best_table_discrete(field.bits, h1, h2)
    else:
        best = _best_table_discrete(field.bits.T, h2, h1).T
    m, n = best.shape
    table = np.zeros((m + 1, n + 1), dtype=np.int64)
    np.maximum.accumulate(best, axis=0, out=best)
    np.maximum.accumulate(best, axis=1, out=best)
    table[1:, 1:] = best
    return table


def _discrete_gaps(h) -> tuple[int, int]:
    h1f, h2f = as_gap(h, discrete=True)
    return int(h1f), int(h2f)


def gap_lis_discrete(field: BitField, h, witness: bool = False) -> PathResult:
    """Longest gapped non-decreasing path through the 1-cells of a field.

    Path cells (i_1, j_1), ..., (i_L, j_L) satisfy i_k + h1 <= i_{k+1} and
    j_k + h2 <= j_{k+1}; with a zero gap component several path cells may
    share that coordinate.  Rejects h = (0, 0).
    """
    h1, h2 = _discrete_gaps(h)
    if not witness:
        if h1 >= 1:
            return PathResult(_length_only_discrete(field.bits, h1, h2))
        return PathResult(_length_only_discrete(field.bits.T, h2, h1))
    if h1 >= 1:
        best = _best_table_discrete(field.bits, h1, h2)
    else:
        best = _best_table_discrete(field.bits.T, h2, h1).T
    length = int(best.max()) if best.size else 0
    if length == 0:
        return PathResult(0, [])
    i, j = np.unravel_index(int(np.argmax(best)), best.shape)
    i, j = int(i), int(j)
    chain = [(i + 1, j + 1)]
    lv = length
    while lv > 1:
        # A level lv-1 cell exists in the predecessor rectangle by construction.
        cand = np.argwhere(best[: i - h1 + 1, : j - h2 + 1] == lv - 1)
        i, j = int(cand[-1][0]), int(cand[-1][1])
        chain.append((i + 1, j + 1))
        lv -= 1
    chain.reverse()
    return PathResult(length, chain)


def lis_11_table(field: BitField) -> np.ndarray:
    """Prefix table for unit gaps (the plain increasing-path case).

    Entry [i, j] equals the unit-gap path length of the (i, j) prefix; the
    table feeds every discrete coupling map.
    """
    return gap_lis_table(field, (1, 1))


# ---------------------------------------------------------------------------
# Last-passage percolation
# ---------------------------------------------------------------------------

def _lpp_core(w: np.ndarray) -> np.ndarray:
    m, n = w.shape
    T = np.zeros((m, n), dtype=np.int64)
    prev = np.zeros(m, dtype=np.int64)
    sshift = np.zeros(m, dtype=np.int64)
    for j in range(n):
        S = np.cumsum(w[:, j])
        sshift[0] = 0
        sshift[1:] = S[:-1]
        T[:, j] = S + np.maximum.accumulate(prev - sshift)
        prev = T[:, j]
    return T


def lpp_table(field: WeightField) -> np.ndarray:
    """Padded table of last-passage times, T[i, j] over [1..i] x [1..j]."""
    w = field.weights
    if w.shape[1] <= w.shape[0]:
        core = _lpp_core(w)
    else:
        core = _lpp_core(w.T).T
    table = np.zeros((w.shape[0] + 1, w.shape[1] + 1), dtype=np.int64)
    table[1:, 1:] = core
    return table


def lpp_geometric(field: WeightField, witness: bool = False) -> tuple[PathResult, np.ndarray]:
    """Last-passage time to the far corner, plus the full prefix table."""
    table = lpp_table(field)
    m, n = field.m, field.n
    length = int(table[m, n])
    if not witness:
        return PathResult(length), table
    # Walk back along the optimal path, preferring the larger parent.
    path = []
    i, j = m, n
    while i >= 1 and j >= 1:
        path.append((i, j))
        if i == 1 and j == 1:
            break
        if i > 1 and table[i - 1, j] >= table[i, j - 1]:
            i -= 1
        else:
            j -= 1
    path.reverse()
    return PathResult(length, path), table
