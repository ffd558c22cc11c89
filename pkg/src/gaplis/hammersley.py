"""Staircase line decompositions of point fields, with gap-wide sleeves.

A field decomposes into generations: generation 1 is the set of
coordinatewise-minimal points, whose staircase (North-West to South-East
broken line) is line 1; the sleeve ``line + [0, h1] x [0, h2]``
(continuous) or ``line + {0..h1-1} x {0..h2-1}`` (discrete) is erased and
the construction repeats.  The number of distinct lines meeting a
lower-left rectangle equals the gapped path length over it, which makes
the line count an independent second solver.

Lines are represented by their minimal (South-West) corner points; the
staircase between and beyond corners is implied: between consecutive
corners the line goes East then South, and it extends vertically up from
the first corner and horizontally right from the last.  All predicates
reduce to corner arithmetic on the up-set U of the corners:

    q on the line            iff  q in U  and  q not in int(U)
    q in the h-sleeve        iff  q in U  and  q - (o1, o2) not in int(U)

with (o1, o2) = (h1, h2) for continuous sleeves and (h1 - 1, h2 - 1) for
discrete ones, U = union of closed up-quadrants of the corners, and
int(U) its strict-dominance interior.

Line geometry is only known inside the sampled rectangle: intersection
queries are valid for sub-regions of it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import BitField, PointCloud, as_gap

__all__ = [
    "StaircaseLine",
    "LineSet",
    "build_lines_continuous",
    "build_lines_discrete",
    "count_lines_intersecting",
]


@dataclass(frozen=True)
class StaircaseLine:
    """Minimal corners of one staircase line: x ascending, y descending."""

    cx: np.ndarray
    cy: np.ndarray

    def __post_init__(self):
        self.cx.setflags(write=False)
        self.cy.setflags(write=False)
        if len(self.cx) != len(self.cy) or len(self.cx) == 0:
            raise ValueError("a staircase line needs at least one corner")
        if np.any(np.diff(self.cx) <= 0) or np.any(np.diff(self.cy) >= 0):
            raise ValueError("corners must be strictly x-ascending and y-descending")

    def corners(self) -> list[tuple[float, float]]:
        return list(zip(self.cx.tolist(), self.cy.tolist()))

    def meets_region(self, x: float, t: float, inclusive: bool) -> bool:
        """Whether the staircase meets the lower-left region.

        For a region anchored at the origin this reduces to a corner being
        inside: the line's up-set boundary enters (0, x) x (0, t) exactly
        when one of its minimal corners does.
        """
        if inclusive:
            idx = int(np.searchsorted(self.cx, x, side="right"))
            return idx > 0 and self.cy[idx - 1] <= t
        idx = int(np.searchsorted(self.cx, x, side="left"))
        return idx > 0 and self.cy[idx - 1] < t

    def translated(self, dx: float, dy: float) -> "StaircaseLine":
        return StaircaseLine(self.cx + dx, self.cy + dy)


@dataclass(frozen=True)
class LineSet:
    lines: tuple[StaircaseLine, ...]
    discrete: bool
    gap: tuple[float, float]

    def __len__(self) -> int:
        return len(self.lines)


def _in_upset(cx, cy, qx, qy):
    """Vectorized: does some corner lie (weakly) south-west of each query?"""
    idx = np.searchsorted(cx, qx, side="right")
    ok = idx > 0
    out = np.zeros(len(qx), dtype=bool)
    sel = np.nonzero(ok)[0]
    out[sel] = cy[idx[sel] - 1] <= qy[sel]
    return out


def _in_strict_upset(cx, cy, qx, qy):
    idx = np.searchsorted(cx, qx, side="left")
    ok = idx > 0
    out = np.zeros(len(qx), dtype=bool)
    sel = np.nonzero(ok)[0]
    out[sel] = cy[idx[sel] - 1] < qy[sel]
    return out


def sleeve_mask(line: StaircaseLine, qx, qy, o1: float, o2: float):
    """Membership of query points in ``line + [0, o1] x [0, o2]``.

    A query q is in the Minkowski sleeve iff q is in the corner up-set U
    and q - (o1, o2) is not in the strict interior of U.
    """
    qx = np.asarray(qx, dtype=float)
    qy = np.asarray(qy, dtype=float)
    return _in_upset(line.cx, line.cy, qx, qy) & ~_in_strict_upset(
        line.cx, line.cy, qx - o1, qy - o2
    )


def _minimal_mask(xs, ys, grouped_columns: bool):
    """Coordinatewise-minimal points of (xs sorted ascending, ys).

    With distinct coordinates (continuous clouds) a point is minimal iff
    its ordinate beats the running minimum.  Discrete fields may repeat
    abscissae; then only the lowest cell of a column qualifies, against
    the running minimum over strictly smaller columns.
    """
    n = len(xs)
    mask = np.zeros(n, dtype=bool)
    if not grouped_columns:
        run = np.inf
        for k in range(n):
            if ys[k] < run:
                mask[k] = True
                run = ys[k]
        return mask
    run = np.inf
    k = 0
    while k < n:
        k2 = k
        lo = ys[k]
        lo_at = k
        while k2 < n and xs[k2] == xs[k]:
            if ys[k2] < lo:
                lo = ys[k2]
                lo_at = k2
            k2 += 1
        if lo < run:
            mask[lo_at] = True
            run = lo
        k = k2
    return mask


def _peel(xs, ys, o1, o2, grouped_columns):
    """Generation peeling; returns (lines, generation index per point).

    The generation of a point is the peel round in which its sleeve test
    removed it (1-based); points never removed cannot occur because every
    round removes at least its own minimal points.
    """
    order = np.lexsort((ys, xs))
    xs = np.asarray(xs, dtype=float)[order]
    ys = np.asarray(ys, dtype=float)[order]
    gen_sorted = np.zeros(len(xs), dtype=np.int64)
    alive = np.arange(len(xs))
    lines = []
    while len(alive):
        ax, ay = xs[alive], ys[alive]
        mmask = _minimal_mask(ax, ay, grouped_columns)
        line = StaircaseLine(ax[mmask].copy(), ay[mmask].copy())
        lines.append(line)
        removed = sleeve_mask(line, ax, ay, o1, o2)
        gen_sorted[alive[removed]] = len(lines)
        alive = alive[~removed]
    gen = np.zeros(len(xs), dtype=np.int64)
    gen[order] = gen_sorted
    return lines, gen


def build_lines_continuous(cloud: PointCloud, h) -> LineSet:
    """Staircase lines of a point cloud with continuous gap sleeves."""
    h1, h2 = as_gap(h)
    if len(cloud) == 0:
        return LineSet((), False, (h1, h2))
    lines, _ = _peel(cloud.xs, cloud.ys, h1, h2, grouped_columns=False)
    return LineSet(tuple(lines), False, (h1, h2))


def point_generations_continuous(cloud: PointCloud, h) -> np.ndarray:
    """Peel-round index of each cloud point (in the cloud's x-sorted order)."""
    h1, h2 = as_gap(h)
    if len(cloud) == 0:
        return np.zeros(0, dtype=np.int64)
    _, gen = _peel(cloud.xs, cloud.ys, h1, h2, grouped_columns=False)
    return gen


def build_lines_discrete(field: BitField, h) -> LineSet:
    """Staircase lines of a 0/1 field with discrete sleeves.

    Requires h1 >= 1 and h2 >= 1: with a zero gap component the sleeve
    offset set {0..h-1} is empty and the construction does not apply (the
    zero-gap cases are handled by the projection coupling instead).
    """
    h1, h2 = _positive_int_gaps(h)
    ii, jj = np.nonzero(field.bits)
    if len(ii) == 0:
        return LineSet((), True, (h1, h2))
    lines, _ = _peel(ii + 1.0, jj + 1.0, h1 - 1, h2 - 1, grouped_columns=True)
    return LineSet(tuple(lines), True, (h1, h2))


def cell_generations_discrete(field: BitField, h):
    """(cells, generations, minimal-flags) for the 1-cells of a field.

    ``minimal`` marks the cells that are corners of their line, i.e. the
    coordinatewise-minimal points of their generation.
    """
    h1, h2 = _positive_int_gaps(h)
    ii, jj = np.nonzero(field.bits)
    if len(ii) == 0:
        z = np.zeros(0, dtype=np.int64)
        return np.zeros((0, 2), dtype=np.int64), z, np.zeros(0, dtype=bool)
    lines, gen = _peel(ii + 1.0, jj + 1.0, h1 - 1, h2 - 1, grouped_columns=True)
    corner_set = set()
    for ln in lines:
        corner_set.update(zip(ln.cx.tolist(), ln.cy.tolist()))
    cells = np.column_stack([ii + 1, jj + 1]).astype(np.int64)
    minimal = np.array(
        [(float(i), float(j)) in corner_set for i, j in cells], dtype=bool
    )
    return cells, gen, minimal


def _positive_int_gaps(h) -> tuple[int, int]:
    h1f, h2f = as_gap(h, discrete=True)
    h1, h2 = int(h1f), int(h2f)
    if h1 < 1 or h2 < 1:
        raise ValueError("discrete line construction needs h1 >= 1 and h2 >= 1")
    return h1, h2


def count_lines_intersecting(ls: LineSet, region) -> int:
    """Number of distinct lines meeting the lower-left region.

    Continuous: the open rectangle (0, x) x (0, t).  Discrete: the cell
    rectangle [1..m] x [1..n].  Equals the gapped path length over the
    region whenever the LineSet was built from the same field and gaps.
    """
    x, t = float(region[0]), float(region[1])
    if x <= 0 or t <= 0:
        return 0
    return sum(1 for ln in ls.lines if ln.meets_region(x, t, inclusive=ls.discrete))
