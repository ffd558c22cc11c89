import numpy as np
import pytest

from gaplis.hammersley import (
    build_lines_continuous,
    build_lines_discrete,
    cell_generations_discrete,
    count_lines_intersecting,
)
from gaplis.model import BitField, validate_cloud
from gaplis.sampling import SeedSpec, sample_bernoulli, sample_poisson
from gaplis.solvers import gap_lis_continuous, gap_lis_discrete


def test_empty_and_single():
    empty = validate_cloud([], (3, 3))
    assert len(build_lines_continuous(empty, (1, 1))) == 0
    single = validate_cloud([(1, 2)], (3, 3))
    ls = build_lines_continuous(single, (1, 1))
    assert len(ls) == 1
    assert ls.lines[0].corners() == [(1.0, 2.0)]
    assert count_lines_intersecting(ls, (3, 3)) == 1
    assert count_lines_intersecting(ls, (1, 3)) == 0  # corner not strictly inside


def test_staircase_monotonicity():
    cloud = sample_poisson((8, 8), 1.0, SeedSpec(200, 0))
    for line in build_lines_continuous(cloud, (0.5, 1.5)).lines:
        assert np.all(np.diff(line.cx) > 0)
        assert np.all(np.diff(line.cy) < 0)


def test_line_count_equals_solver_continuous():
    regions = [(x, t) for x in (1.5, 3.0, 4.5, 6.0, 7.5) for t in (1.5, 3.0, 4.5, 6.0, 7.5)]
    for rep in range(40):
        cloud = sample_poisson((7.5, 7.5), 1.0, SeedSpec(201, rep))
        for h in [(0, 0), (1, 1), (0.6, 0.3), (2, 1)]:
            ls = build_lines_continuous(cloud, h)
            assert len(ls) == gap_lis_continuous(cloud, (7.5, 7.5), h).length
            for region in regions:
                assert count_lines_intersecting(ls, region) == gap_lis_continuous(
                    cloud, region, h
                ).length, (rep, h, region)


def test_line_count_equals_solver_discrete():
    regions = [(m, n) for m in (3, 6, 9, 12, 15) for n in (3, 6, 9, 12, 15)]
    for rep in range(40):
        fld = sample_bernoulli(15, 15, 0.3, SeedSpec(202, rep))
        for h in [(1, 1), (2, 1), (3, 2), (2, 2)]:
            ls = build_lines_discrete(fld, h)
            assert len(ls) == gap_lis_discrete(fld, h).length
            for m, n in regions:
                sub = BitField(np.ascontiguousarray(fld.bits[:m, :n]))
                assert count_lines_intersecting(ls, (m, n)) == gap_lis_discrete(
                    sub, h
                ).length, (rep, h, m, n)


def test_discrete_structured_field():
    # a frozen 10 x 8 field whose gapped lengths are 4 under (2,1) and 3
    # under (3,2); the line count over the full region must match both
    fld = sample_bernoulli(10, 8, 0.3, SeedSpec(2024, 1))
    assert gap_lis_discrete(fld, (2, 1)).length == 4
    assert gap_lis_discrete(fld, (3, 2)).length == 3
    assert len(build_lines_discrete(fld, (2, 1))) == 4
    assert len(build_lines_discrete(fld, (3, 2))) == 3


def test_diagonal_bits_one_line_each():
    fld = BitField.from_ones(3, 3, [(1, 1), (2, 2), (3, 3)])
    assert len(build_lines_discrete(fld, (1, 1))) == 3
    assert len(build_lines_discrete(BitField(np.zeros((3, 3), np.uint8)), (1, 1))) == 0


def test_discrete_rejects_zero_gap_component():
    fld = BitField.from_ones(2, 2, [(1, 1)])
    with pytest.raises(ValueError, match="h1 >= 1 and h2 >= 1"):
        build_lines_discrete(fld, (1, 0))


def test_cell_generations_and_minimal_flags():
    # survivors on a line but not corners get the generation, not the flag
    fld = BitField.from_ones(3, 3, [(1, 3), (3, 1), (2, 3)])
    cells, gens, minimal = cell_generations_discrete(fld, (1, 1))
    lookup = {tuple(c): (g, m) for c, g, m in zip(cells.tolist(), gens.tolist(), minimal.tolist())}
    assert lookup[(1, 3)] == (1, True)
    assert lookup[(3, 1)] == (1, True)
    # (2,3) sits on the staircase segment between the two corners
    assert lookup[(2, 3)] == (1, False)


def test_nested_lines():
    # each generation's up-set contains the next one's corners
    cloud = sample_poisson((10, 10), 1.0, SeedSpec(203, 0))
    ls = build_lines_continuous(cloud, (1, 0.5))
    for first, second in zip(ls.lines, ls.lines[1:]):
        for x, y in second.corners():
            idx = np.searchsorted(first.cx, x, side="right")
            assert idx > 0 and first.cy[idx - 1] <= y
