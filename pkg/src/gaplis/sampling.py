"""Seed-reproducible samplers for the three random fields.

Every sampler is a pure function of (parameters, SeedSpec): the same
inputs give bit-identical output on every platform, because all draws go
through numpy's PCG64 seeded from a (master_seed, stream_index) pair.
Distinct pairs give statistically independent streams, so parallel Monte
Carlo replicas simply use stream_index = replica number.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import BitField, PointCloud, WeightField, validate_cloud

__all__ = ["SeedSpec", "sample_poisson", "sample_bernoulli", "sample_geometric"]


@dataclass(frozen=True)
class SeedSpec:
    master_seed: int
    stream_index: int = 0

    def __post_init__(self):
        for v in (self.master_seed, self.stream_index):
            if not (0 <= int(v) < 2**64):
                raise ValueError("seed components must be unsigned 64-bit integers")

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(
            np.random.SeedSequence([int(self.master_seed), int(self.stream_index)])
        )

    def child(self, stream_index: int) -> "SeedSpec":
        return SeedSpec(self.master_seed, stream_index)


def _as_seed(seed) -> SeedSpec:
    if isinstance(seed, SeedSpec):
        return seed
    return SeedSpec(int(seed))


def _uniform_open_distinct(rng, count, hi):
    """Uniform draws scaled to (0, hi), resampling the measure-zero cases
    (an exact 0.0 draw, or a collision) so cloud invariants always hold."""
    u = rng.random(count)
    while count:
        bad = u == 0.0
        uniq, first = np.unique(u, return_index=True)
        if len(uniq) != len(u):
            mask = np.ones(len(u), dtype=bool)
            mask[first] = False
            bad |= mask
        if not bad.any():
            break
        u[bad] = rng.random(int(bad.sum()))
    return u * hi


def sample_poisson(rect, lam, seed) -> PointCloud:
    """Homogeneous Poisson sample of intensity ``lam`` on (0, x) x (0, t).

    Count-then-uniform placement: N ~ Poisson(lam * x * t), then N points
    i.i.d. uniform in the rectangle.  This is exact, which the pathwise
    coupling identities require (a discretized grid would not be).
    """
    x, t = float(rect[0]), float(rect[1])
    if not (x > 0 and t > 0):
        raise ValueError(f"rectangle sides must be positive, got {rect!r}")
    lam = float(lam)
    if not (lam > 0 and np.isfinite(lam)):
        raise ValueError(f"intensity must be positive finite, got {lam!r}")
    rng = _as_seed(seed).rng()
    count = int(rng.poisson(lam * x * t))
    xs = _uniform_open_distinct(rng, count, x)
    ys = _uniform_open_distinct(rng, count, t)
    return validate_cloud(np.column_stack([xs, ys]) if count else [], (x, t))


def sample_bernoulli(m, n, p, seed) -> BitField:
    """i.i.d. Bernoulli(p) bits on an m x n grid."""
    if m < 1 or n < 1:
        raise ValueError("field extents must be >= 1")
    p = float(p)
    if not (0.0 < p < 1.0):
        raise ValueError(f"p must lie in (0, 1), got {p!r}")
    rng = _as_seed(seed).rng()
    bits = (rng.random((int(m), int(n))) < p).astype(np.uint8)
    return BitField(bits)


def sample_geometric(m, n, p, seed) -> WeightField:
    """i.i.d. geometric weights, P(w = k) = p^k (1 - p) for k >= 0.

    Sampled by CDF inversion with one uniform draw per entry:
    w = floor(log(u) / log(p)) with u uniform on (0, 1].  Mean p / (1 - p).
    """
    if m < 1 or n < 1:
        raise ValueError("field extents must be >= 1")
    p = float(p)
    if not (0.0 < p < 1.0):
        raise ValueError(f"p must lie in (0, 1), got {p!r}")
    rng = _as_seed(seed).rng()
    u = 1.0 - rng.random((int(m), int(n)))  # uniform on (0, 1]
    w = np.floor(np.log(u) / np.log(p)).astype(np.int64)
    return WeightField(w)
