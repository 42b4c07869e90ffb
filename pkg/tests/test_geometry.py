import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from agtic.errors import (DataError, InvalidQuantile, NonFiniteInput,
                          TooFewObservations)
from agtic.geometry import (DistanceMatrix, Sample, max_distance,
                            offdiag_quantile, pairwise_euclidean, read_csv,
                            write_csv)

SIX = DistanceMatrix.from_array([[0, 1, 2, 3],
                                 [1, 0, 4, 5],
                                 [2, 4, 0, 6],
                                 [3, 5, 6, 0]])


def test_pairwise_1d():
    d = pairwise_euclidean(Sample([0.0, 1.0, 3.0, 6.0]))
    assert d.entries[0, 3] == 6
    assert d.entries[1, 2] == 2
    assert d.d_max == 6
    assert max_distance(d) == 6


def test_identical_rows_give_zero_matrix():
    d = pairwise_euclidean(Sample(np.ones((4, 2))))
    assert not d.entries.any()
    assert max_distance(d) == 0


def test_three_four_five():
    d = pairwise_euclidean(Sample([[0, 0], [3, 4], [1, 1], [2, 7]]))
    assert d.entries[0, 1] == 5
    assert d.entries[1, 0] == 5


def test_invariants_hold(rng):
    d = pairwise_euclidean(Sample(rng.normal(size=(20, 3))))
    e = d.entries
    assert np.array_equal(e, e.T)
    assert not np.diag(e).any()
    assert (e >= 0).all()
    assert d.d_max == e.max()
    assert max_distance(d) == max_distance(d.transpose())


@pytest.mark.parametrize("bad", [np.nan, np.inf, -np.inf])
def test_non_finite_rejected(bad):
    data = np.zeros((5, 2))
    data[3, 1] = bad
    with pytest.raises(NonFiniteInput, match="row 3, column 1"):
        Sample(data)


def test_too_few_rows():
    with pytest.raises(TooFewObservations):
        Sample([1.0, 2.0, 3.0])


def test_sample_is_read_only():
    s = Sample([1.0, 2.0, 3.0, 4.0])
    with pytest.raises(ValueError):
        s.data[0, 0] = 5.0


@pytest.mark.parametrize("q,expected", [(0.0, 1), (1.0, 6), (0.5, 3)])
def test_offdiag_quantile(q, expected):
    assert offdiag_quantile(SIX, q) == expected


def test_offdiag_quantile_sort_and_index_oracle(rng):
    d = pairwise_euclidean(Sample(rng.normal(size=(9, 2))))
    upper = sorted(d.entries[i, j] for i in range(9) for j in range(i + 1, 9))
    n = len(upper)
    for q in (0.1, 0.25, 0.5, 0.75, 0.9):
        rank = max(1, int(np.ceil(q * n)))
        assert offdiag_quantile(d, q) == upper[rank - 1]


def test_offdiag_quantile_constant():
    d = DistanceMatrix.from_array(np.where(np.eye(5, dtype=bool), 0.0, 2.5))
    for q in (0.0, 0.3, 0.5, 1.0):
        assert offdiag_quantile(d, q) == 2.5


def test_offdiag_quantile_absorbs_float_noise():
    d = DistanceMatrix.from_array(np.triu(np.arange(25.0).reshape(5, 5), 1)
                                  + np.triu(np.arange(25.0).reshape(5, 5), 1).T)
    # 10 values; 0.7 * 10 is 7.000000000000001 in binary floating point.
    values = sorted(d.upper_triangle())
    assert offdiag_quantile(d, 0.7) == values[6]


@pytest.mark.parametrize("q", [-0.1, 1.5, float("nan")])
def test_offdiag_quantile_bad_level(q):
    with pytest.raises(InvalidQuantile):
        offdiag_quantile(SIX, q)


finite = st.floats(-100, 100, allow_nan=False, allow_infinity=False)


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, (8, 3), elements=finite))
def test_triangle_inequality(data):
    e = pairwise_euclidean(Sample(data)).entries
    lhs = e[:, None, :]
    rhs = e[:, :, None] + e[None, :, :]
    assert (lhs <= rhs + 1e-9).all()


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, (7, 2), elements=finite), st.floats(0, 2 * np.pi),
       arrays(np.float64, (2,), elements=finite))
def test_rigid_motion_invariance(data, angle, shift):
    rot = np.array([[np.cos(angle), -np.sin(angle)], [np.sin(angle), np.cos(angle)]])
    before = pairwise_euclidean(Sample(data)).entries
    after = pairwise_euclidean(Sample(data @ rot.T + shift)).entries
    assert np.abs(before - after).max() <= 1e-9 * max(1.0, before.max())


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, (6, 2), elements=st.floats(-10, 10)),
       st.floats(1e-3, 1e3))
def test_scaling(data, c):
    d = pairwise_euclidean(Sample(data))
    dc = pairwise_euclidean(Sample(c * data))
    np.testing.assert_allclose(dc.entries, c * d.entries, rtol=1e-12, atol=0)
    assert dc.d_max == pytest.approx(c * d.d_max, rel=1e-12, abs=0)


def test_csv_round_trip(tmp_path, rng):
    s = Sample(rng.normal(size=(6, 2)), ("a", "b"))
    write_csv(s, tmp_path / "s.csv")
    back = read_csv(tmp_path / "s.csv")
    assert back.columns == ("a", "b")
    assert np.array_equal(back.data, s.data)


def test_csv_ragged_row(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b\n1,2\n3\n4,5\n6,7\n")
    with pytest.raises(DataError, match="row 3 has 1 fields"):
        read_csv(path)


def test_csv_non_numeric(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b\n1,2\n3,4\n5,oops\n6,7\n")
    with pytest.raises(DataError, match=r"row 4, column 'b'"):
        read_csv(path)


def test_csv_too_few_rows(tmp_path):
    path = tmp_path / "short.csv"
    path.write_text("a\n1\n2\n3\n")
    with pytest.raises(DataError, match="at least 4"):
        read_csv(path)
