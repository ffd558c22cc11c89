import math

import numpy as np
import pytest
from scipy import stats

from gaplis.sampling import SeedSpec, sample_bernoulli, sample_geometric, sample_poisson


def test_poisson_determinism():
    a = sample_poisson((2, 3), 1.0, SeedSpec(10, 3))
    b = sample_poisson((2, 3), 1.0, SeedSpec(10, 3))
    assert np.array_equal(a.xs, b.xs) and np.array_equal(a.ys, b.ys)
    c = sample_poisson((2, 3), 1.0, SeedSpec(10, 4))
    assert len(c) != len(a) or not np.array_equal(c.xs, a.xs)


def test_poisson_moments():
    counts = np.array([len(sample_poisson((2, 3), 1.0, SeedSpec(77, i))) for i in range(2000)])
    # E = Var = 6; mean has se sqrt(6/2000) ~ 0.055
    assert abs(counts.mean() - 6.0) < 4 * math.sqrt(6 / 2000)
    assert abs(counts.var() - 6.0) < 1.0


def test_poisson_thinning_consistency():
    # counts restricted to a sub-rectangle are Poisson with the area mean
    sub = []
    for i in range(500):
        c = sample_poisson((10, 10), 1.0, SeedSpec(78, i))
        sub.append(np.count_nonzero((c.xs < 4) & (c.ys < 7)))
    sub = np.array(sub)
    assert abs(sub.mean() - 28.0) < 4 * math.sqrt(28 / 500)


def test_poisson_rejects_bad_rect():
    with pytest.raises(ValueError):
        sample_poisson((0, 1), 1.0, SeedSpec(1))
    with pytest.raises(ValueError):
        sample_poisson((1, 1), -2.0, SeedSpec(1))


def test_bernoulli_mean_and_determinism():
    fld = sample_bernoulli(1000, 1000, 0.5, SeedSpec(5, 0))
    assert abs(fld.bits.mean() - 0.5) < 0.01
    again = sample_bernoulli(1000, 1000, 0.5, SeedSpec(5, 0))
    assert np.array_equal(fld.bits, again.bits)
    with pytest.raises(ValueError):
        sample_bernoulli(2, 2, 1.0, SeedSpec(1))


def test_geometric_law_chi_square():
    w = sample_geometric(1000, 1000, 0.5, SeedSpec(6, 0)).weights.ravel()
    kmax = 12
    observed = np.bincount(np.minimum(w, kmax), minlength=kmax + 1)
    probs = np.array([0.5 ** (k + 1) for k in range(kmax)] + [0.5**kmax])
    chi2 = stats.chisquare(observed, probs * len(w))
    assert chi2.pvalue > 0.01
    assert abs(w.mean() - 1.0) < 0.01


def test_geometric_mean_quarter():
    w = sample_geometric(300, 300, 0.25, SeedSpec(7, 0)).weights
    mean = w.mean()
    se = w.std() / 300
    assert abs(mean - 1 / 3) < 4 * se
    again = sample_geometric(300, 300, 0.25, SeedSpec(7, 0))
    assert np.array_equal(w, again.weights)
    with pytest.raises(ValueError):
        sample_geometric(2, 2, 0.0, SeedSpec(1))


def test_streams_are_independent_looking():
    a = sample_geometric(100, 100, 0.5, SeedSpec(9, 0)).weights
    b = sample_geometric(100, 100, 0.5, SeedSpec(9, 1)).weights
    assert not np.array_equal(a, b)
    corr = np.corrcoef(a.ravel(), b.ravel())[0, 1]
    assert abs(corr) < 0.05
