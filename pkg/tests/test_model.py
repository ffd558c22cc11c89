import numpy as np
import pytest
from hypothesis import given, strategies as st

from gaplis.model import (
    BitField,
    GapPair,
    WeightField,
    precedes,
    read_bitfield,
    read_cloud_csv,
    read_weightfield,
    validate_cloud,
    write_bitfield,
    write_cloud_csv,
    write_weightfield,
)


def test_precedes_threshold_cases():
    assert precedes((1, 1), (2, 2), (1, 1))
    assert not precedes((1, 1), (2, 2), (2, 1))
    assert precedes((0.5, 0.5), (2.0, 2.0), (1, 1))


coords = st.floats(min_value=0.01, max_value=100, allow_nan=False)
gaps = st.floats(min_value=0.0, max_value=10, allow_nan=False)


@given(
    st.tuples(coords, coords),
    st.tuples(coords, coords),
    st.tuples(coords, coords),
    gaps,
    gaps,
)
def test_precedes_transitive(p, q, r, h1, h2):
    if precedes(p, q, (h1, h2)) and precedes(q, r, (h1, h2)):
        assert precedes(p, r, (h1, h2))


@given(st.tuples(coords, coords), st.tuples(coords, coords), gaps, gaps, gaps, gaps)
def test_precedes_antitone_in_gap(p, q, h1, h2, d1, d2):
    # enlarging either gap component never turns false into true
    if precedes(p, q, (h1 + d1, h2 + d2)):
        assert precedes(p, q, (h1, h2))


def test_precedes_zero_gap_is_dominance():
    pts = [(0.3, 2.0), (1.0, 1.0), (2.0, 3.0)]
    for p in pts:
        for q in pts:
            if p is q:
                continue
            assert precedes(p, q, (0, 0)) == (p[0] <= q[0] and p[1] <= q[1])


def test_gap_pair_invariants():
    GapPair.continuous(0.0, 0.0)  # fine in the continuous variant
    with pytest.raises(ValueError):
        GapPair.of_ints(0, 0)
    with pytest.raises(ValueError):
        GapPair.continuous(-1.0, 0.0)
    with pytest.raises(ValueError):
        GapPair(1.5, 1.0, discrete=True)
    with pytest.raises(ValueError):
        GapPair.continuous(float("inf"), 0.0)


def test_validate_cloud_ok_and_sorted():
    cloud = validate_cloud([(2, 2), (1, 1)], (3, 3))
    assert cloud.xs.tolist() == [1.0, 2.0]
    assert cloud.ys.tolist() == [1.0, 2.0]


def test_validate_cloud_distinct_diagnostics():
    with pytest.raises(ValueError, match="duplicate x"):
        validate_cloud([(1, 1), (1, 2)], (3, 3))
    with pytest.raises(ValueError, match="duplicate y"):
        validate_cloud([(1, 1), (2, 1)], (3, 3))
    with pytest.raises(ValueError, match="outside"):
        validate_cloud([(1, 5)], (3, 3))
    with pytest.raises(ValueError, match="positive"):
        validate_cloud([(0, 1)], (3, 3))
    with pytest.raises(ValueError, match="rectangle"):
        validate_cloud([], (0, 3))


def test_validate_cloud_empty():
    cloud = validate_cloud([], (3, 3))
    assert len(cloud) == 0


def test_bitfield_invariants():
    with pytest.raises(ValueError):
        BitField(np.array([[0, 2]], dtype=np.int64))
    fld = BitField.from_ones(3, 2, [(1, 1), (3, 2)])
    assert fld.ones() == [(1, 1), (3, 2)]
    with pytest.raises(ValueError):
        BitField.from_ones(2, 2, [(3, 1)])


def test_weightfield_invariants():
    with pytest.raises(ValueError):
        WeightField(np.array([[0.5]], dtype=float))
    with pytest.raises(ValueError):
        WeightField(np.array([[-1]], dtype=np.int64))


def test_cloud_csv_roundtrip(tmp_path):
    cloud = validate_cloud([(0.25, 1.5), (1.125, 0.375)], (2, 2))
    path = tmp_path / "pts.csv"
    write_cloud_csv(cloud, path)
    back = read_cloud_csv(path, rect=(2, 2))
    assert np.array_equal(back.xs, cloud.xs)
    assert np.array_equal(back.ys, cloud.ys)


def test_bitfield_file_roundtrip(tmp_path):
    fld = BitField.from_ones(4, 3, [(1, 1), (4, 3), (2, 2)])
    path = tmp_path / "field.txt"
    write_bitfield(fld, path)
    # row 1 of the file is j = 1
    assert path.read_text().splitlines()[0] == "1000"
    back = read_bitfield(path)
    assert np.array_equal(back.bits, fld.bits)


def test_weightfield_file_roundtrip(tmp_path):
    w = WeightField(np.arange(6, dtype=np.int64).reshape(2, 3))
    path = tmp_path / "w.csv"
    write_weightfield(w, path)
    back = read_weightfield(path)
    assert np.array_equal(back.weights, w.weights)


def test_bad_files_rejected(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("01\n0\n")
    with pytest.raises(ValueError, match="ragged"):
        read_bitfield(p)
    p.write_text("01\n02\n")
    with pytest.raises(ValueError, match="0/1"):
        read_bitfield(p)
    c = tmp_path / "bad.csv"
    c.write_text("a,b\n1,2\n")
    with pytest.raises(ValueError, match="header"):
        read_cloud_csv(c)
