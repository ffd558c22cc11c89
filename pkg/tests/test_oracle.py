from fractions import Fraction

import pytest

from gaplis.model import BitField, validate_cloud
from gaplis.oracle import (
    ExactDist,
    InstanceTooLarge,
    brute_chains,
    exact_dist_gap_lis,
    exact_dist_lpp,
    verify_gap_vs_lpp,
    verify_gap_vs_unit,
)
from gaplis.sampling import SeedSpec, sample_bernoulli
from gaplis.solvers import gap_lis_discrete


half = Fraction(1, 2)
quarter = Fraction(1, 4)


def test_exact_dist_gap_lis_small():
    d = exact_dist_gap_lis(2, 2, half, (1, 1))
    assert d.exact
    assert d.cdf(1) == Fraction(3, 4)
    assert sum(d.mass) == 1
    d1 = exact_dist_gap_lis(1, 1, half, (1, 1))
    assert dict(zip(d1.support, d1.mass)) == {0: half, 1: half}


def test_exact_dist_total_mass_always_one():
    for h in [(1, 1), (2, 1), (1, 0)]:
        for p in (half, quarter):
            d = exact_dist_gap_lis(3, 3, p, h)
            assert sum(d.mass) == 1


def test_exact_dist_matches_solver_per_configuration():
    # the distribution is the push-forward of the uniform measure through
    # the solver; spot check the bucketed lengths against direct solves
    import numpy as np

    m = n = 3
    d = exact_dist_gap_lis(m, n, half, (2, 1))
    total = Fraction(0)
    for mask in range(2 ** (m * n)):
        bits = np.array(
            [[(mask >> (j * m + i)) & 1 for j in range(n)] for i in range(m)],
            dtype=np.uint8,
        )
        length = gap_lis_discrete(BitField(bits), (2, 1)).length
        total += Fraction(1, 2 ** (m * n)) if length <= 1 else 0
    assert total == d.cdf(1)


def test_exact_dist_lpp():
    d = exact_dist_lpp(1, 1, half, 3)
    for k in range(4):
        assert d.cdf(k) == 1 - half ** (k + 1)
    assert exact_dist_lpp(2, 1, half, 1).cdf(1) == Fraction(1, 2)
    assert d.truncated


def test_verify_gap_vs_lpp():
    rep = verify_gap_vs_lpp(2, 2, (1, 1), half, [0, 1, 2])
    assert rep["all_equal"] and rep["max_abs_discrepancy"] == 0
    row0 = rep["rows"][0]
    assert row0["lhs"] == Fraction(1, 16)  # no 1s anywhere
    # large k: translated corner leaves the quadrant, both sides 1
    rep = verify_gap_vs_lpp(2, 2, (1, 1), half, [3])
    assert rep["rows"][0]["lhs"] == 1 and rep["rows"][0]["rhs"] == 1


def test_verify_gap_vs_unit():
    rep = verify_gap_vs_unit(4, 2, (2, 1), half, [0, 1])
    assert rep["all_equal"]
    rep = verify_gap_vs_unit(2, 2, (1, 0), half, [0, 1, 2])
    assert rep["all_equal"]
    rep = verify_gap_vs_unit(2, 2, (1, 1), half, [0, 1])
    assert all(r["lhs"] == r["rhs"] for r in rep["rows"])  # identity case


def test_float_mode_small_discrepancy():
    rep = verify_gap_vs_lpp(2, 2, (1, 1), 0.37, [0, 1, 2])
    assert rep["max_abs_discrepancy"] <= 1e-12


def test_instance_too_large():
    with pytest.raises(InstanceTooLarge):
        exact_dist_gap_lis(7, 4, half, (1, 1))
    with pytest.raises(InstanceTooLarge):
        exact_dist_lpp(4, 3, half, 4)


def test_exact_dist_validation():
    with pytest.raises(ValueError):
        ExactDist((0, 1), (half, half, half))
    with pytest.raises(ValueError):
        ExactDist((0, 1), (half, half + 1))


def test_brute_chains():
    assert brute_chains([], (1, 1)) == 0
    chain = validate_cloud([(1, 1), (2.5, 2.5), (4, 4)], (5, 5))
    assert brute_chains(chain, (1, 1)) == 3
    fld = BitField.from_ones(3, 3, [(1, 1), (2, 2), (3, 3)])
    assert brute_chains(fld, (1, 1)) == 3
    assert brute_chains(fld, (2, 2)) == 2
    with pytest.raises(InstanceTooLarge):
        brute_chains(sample_bernoulli(5, 5, 0.9, SeedSpec(1, 0)), (1, 1))


def test_bit_complement_is_not_a_symmetry():
    # compare the p=1/2 length law with its bit-complement pushforward:
    # complementing bits does not preserve it, so only total mass is asserted
    d = exact_dist_gap_lis(2, 2, half, (1, 1))
    masses = dict(zip(d.support, d.mass))
    assert masses[0] != masses[max(d.support)]
    assert sum(d.mass) == 1
