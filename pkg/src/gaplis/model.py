"""Domain types, orderings and geometric predicates shared by every module.

Conventions
-----------
* Continuous fields live in the open quadrant; a point cloud is a finite
  set of planar points with pairwise distinct x and pairwise distinct y
  coordinates, restricted to a rectangle (0, x) x (0, t).
* Discrete fields are 0/1 (``BitField``) or nonnegative-integer
  (``WeightField``) matrices indexed by cells (i, j) with 1 <= i <= m,
  1 <= j <= n.  The external interface is 1-based; arrays are stored
  0-based with shape (m, n), entry [i-1, j-1] for cell (i, j).
* The gap order:  p precedes q  iff  p.x + h1 <= q.x  and  p.y + h2 <= q.y.
  Comparisons are exact ``<=`` with no epsilon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "GapPair",
    "PointCloud",
    "BitField",
    "WeightField",
    "precedes",
    "validate_cloud",
    "read_cloud_csv",
    "write_cloud_csv",
    "read_bitfield",
    "write_bitfield",
    "read_weightfield",
    "write_weightfield",
]


@dataclass(frozen=True)
class GapPair:
    """A pair of minimal gaps (h1, h2), continuous (reals) or discrete (ints).

    The discrete variant excludes (0, 0): with zero gaps in both directions
    the discrete path-length problem degenerates to directed site
    percolation and is out of scope.
    """

    h1: float
    h2: float
    discrete: bool = False

    def __post_init__(self):
        for v in (self.h1, self.h2):
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"gap components must be finite and >= 0, got {v!r}")
        if self.discrete:
            if self.h1 != int(self.h1) or self.h2 != int(self.h2):
                raise ValueError("discrete gaps must be integers")
            if self.h1 == 0 and self.h2 == 0:
                raise ValueError("discrete gap pair (0, 0) is not supported")

    @classmethod
    def continuous(cls, h1: float, h2: float) -> "GapPair":
        return cls(float(h1), float(h2), discrete=False)

    @classmethod
    def of_ints(cls, h1: int, h2: int) -> "GapPair":
        return cls(int(h1), int(h2), discrete=True)

    def as_tuple(self) -> tuple[float, float]:
        return (self.h1, self.h2)


def as_gap(h, discrete: bool = False) -> tuple[float, float]:
    """Coerce a GapPair or a plain (h1, h2) pair to a validated tuple."""
    if isinstance(h, GapPair):
        if discrete and not h.discrete:
            h = GapPair(h.h1, h.h2, discrete=True)
        return h.as_tuple()
    h1, h2 = h
    g = GapPair(float(h1), float(h2), discrete=discrete)
    return g.as_tuple()


def precedes(p, q, h) -> bool:
    """Gap order: p precedes q iff p.x + h1 <= q.x and p.y + h2 <= q.y."""
    h1, h2 = as_gap(h)
    return p[0] + h1 <= q[0] and p[1] + h2 <= q[1]


@dataclass(frozen=True)
class PointCloud:
    """A finite planar point set inside the open rectangle (0, x) x (0, t).

    ``xs`` is sorted ascending and ``ys`` is the matching permutation of
    ordinates.  Coordinates are pairwise distinct per axis, which makes the
    gap order effectively strict on the cloud.
    """

    xs: np.ndarray
    ys: np.ndarray
    rect: tuple[float, float]

    def __post_init__(self):
        self.xs.setflags(write=False)
        self.ys.setflags(write=False)

    def __len__(self) -> int:
        return len(self.xs)

    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.xs.tolist(), self.ys.tolist()))

    def restrict(self, x: float, t: float) -> "PointCloud":
        """Sub-cloud strictly inside (0, x) x (0, t)."""
        keep = (self.xs < x) & (self.ys < t)
        return PointCloud(self.xs[keep], self.ys[keep], (min(x, self.rect[0]), min(t, self.rect[1])))


def validate_cloud(points, rect) -> PointCloud:
    """Build a PointCloud, enforcing every invariant.

    Rejects, with distinct diagnostics: nonpositive or non-finite
    coordinates, points outside the open rectangle, and duplicated x or y
    coordinates.  Ties are rejected rather than perturbed; silent jitter
    would corrupt exact coupling checks downstream.
    """
    w, t = float(rect[0]), float(rect[1])
    if not (w > 0 and t > 0) or not (math.isfinite(w) and math.isfinite(t)):
        raise ValueError(f"rectangle sides must be positive finite, got {rect!r}")
    pts = np.asarray(list(points), dtype=float)
    if pts.size == 0:
        return PointCloud(np.empty(0), np.empty(0), (w, t))
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("points must be an iterable of (x, y) pairs")
    xs, ys = pts[:, 0], pts[:, 1]
    if not np.all(np.isfinite(pts)):
        raise ValueError("point coordinates must be finite")
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise ValueError("point coordinates must be strictly positive")
    if np.any(xs >= w) or np.any(ys >= t):
        raise ValueError(f"point outside the rectangle (0, {w}) x (0, {t})")
    if len(np.unique(xs)) != len(xs):
        raise ValueError("duplicate x-coordinate in point cloud")
    if len(np.unique(ys)) != len(ys):
        raise ValueError("duplicate y-coordinate in point cloud")
    order = np.argsort(xs)
    return PointCloud(np.ascontiguousarray(xs[order]), np.ascontiguousarray(ys[order]), (w, t))


@dataclass(frozen=True)
class BitField:
    """An m x n field of 0/1 cells; bits[i-1, j-1] is cell (i, j)."""

    bits: np.ndarray

    def __post_init__(self):
        b = self.bits
        if b.ndim != 2 or b.shape[0] < 1 or b.shape[1] < 1:
            raise ValueError("bits must be a 2-d array with positive extents")
        if not np.all((b == 0) | (b == 1)):
            raise ValueError("bit field entries must be 0 or 1")
        b.setflags(write=False)

    @property
    def m(self) -> int:
        return self.bits.shape[0]

    @property
    def n(self) -> int:
        return self.bits.shape[1]

    def ones(self) -> list[tuple[int, int]]:
        """1-based coordinates of the cells holding a 1."""
        ii, jj = np.nonzero(self.bits)
        return [(int(i) + 1, int(j) + 1) for i, j in zip(ii, jj)]

    @classmethod
    def from_ones(cls, m: int, n: int, cells) -> "BitField":
        b = np.zeros((m, n), dtype=np.uint8)
        for i, j in cells:
            if not (1 <= i <= m and 1 <= j <= n):
                raise ValueError(f"cell ({i}, {j}) outside a {m} x {n} field")
            b[i - 1, j - 1] = 1
        return cls(b)


@dataclass(frozen=True)
class WeightField:
    """An m x n field of nonnegative integer weights."""

    weights: np.ndarray

    def __post_init__(self):
        w = self.weights
        if w.ndim != 2 or w.shape[0] < 1 or w.shape[1] < 1:
            raise ValueError("weights must be a 2-d array with positive extents")
        if not np.issubdtype(w.dtype, np.integer) or np.any(w < 0):
            raise ValueError("weights must be nonnegative integers")
        w.setflags(write=False)

    @property
    def m(self) -> int:
        return self.weights.shape[0]

    @property
    def n(self) -> int:
        return self.weights.shape[1]


# ---------------------------------------------------------------------------
# File formats.  The 1-based/0-based boundary lives here: row 1 of a field
# file is j = 1, and within a row the i index runs 1..m left to right.
# ---------------------------------------------------------------------------

def write_cloud_csv(cloud: PointCloud, path) -> None:
    with open(path, "w") as fh:
        fh.write("x,y\n")
        for x, y in zip(cloud.xs.tolist(), cloud.ys.tolist()):
            fh.write(f"{x!r},{y!r}\n")


def read_cloud_csv(path, rect=None) -> PointCloud:
    """Read a point cloud from CSV with header ``x,y``.

    When ``rect`` is omitted the bounding rectangle is inferred as the
    smallest axis box strictly containing the points (next float up).
    """
    rows = Path(path).read_text().strip().splitlines()
    if not rows or rows[0].strip().lower() != "x,y":
        raise ValueError(f"{path}: expected CSV header 'x,y'")
    pts = []
    for ln in rows[1:]:
        if not ln.strip():
            continue
        sx, sy = ln.split(",")
        pts.append((float(sx), float(sy)))
    if rect is None:
        if pts:
            mx = max(p[0] for p in pts)
            my = max(p[1] for p in pts)
            rect = (np.nextafter(mx, np.inf), np.nextafter(my, np.inf))
        else:
            rect = (1.0, 1.0)
    return validate_cloud(pts, rect)


def write_bitfield(fld: BitField, path) -> None:
    with open(path, "w") as fh:
        for j in range(fld.n):
            fh.write("".join("1" if v else "0" for v in fld.bits[:, j]) + "\n")


def read_bitfield(path) -> BitField:
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty bit-field file")
    m = len(lines[0])
    if any(len(ln) != m for ln in lines):
        raise ValueError(f"{path}: ragged rows in bit-field file")
    if any(c not in "01" for ln in lines for c in ln):
        raise ValueError(f"{path}: bit-field file must contain only 0/1")
    n = len(lines)
    bits = np.zeros((m, n), dtype=np.uint8)
    for j, ln in enumerate(lines):
        bits[:, j] = [1 if c == "1" else 0 for c in ln]
    return BitField(bits)


def write_weightfield(fld: WeightField, path) -> None:
    with open(path, "w") as fh:
        for j in range(fld.n):
            fh.write(",".join(str(int(v)) for v in fld.weights[:, j]) + "\n")


def read_weightfield(path) -> WeightField:
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty weight-field file")
    rows = [[int(v) for v in ln.split(",")] for ln in lines]
    m = len(rows[0])
    if any(len(r) != m for r in rows):
        raise ValueError(f"{path}: ragged rows in weight-field file")
    w = np.zeros((m, len(rows)), dtype=np.int64)
    for j, r in enumerate(rows):
        w[:, j] = r
    return WeightField(w)
