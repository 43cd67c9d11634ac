import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from svrcodec.transform import (CSF_FLOOR, CSF_PEAK_FREQ, N, ViewingGeometry, coeff_frequency,
                                csf_weight, csf_weights, dct2_forward, dct2_inverse,
                                dct_matrix, frequency_grid)

blocks = arrays(np.float64, (N, N), elements=st.floats(-1e3, 1e3))


def test_matches_explicit_matrix(rng):
    # oracle: orthonormal DCT-II matrix from its cosine definition
    C = dct_matrix()
    assert np.allclose(C @ C.T, np.eye(N), atol=1e-13)
    b = rng.random((N, N))
    assert np.allclose(dct2_forward(b), C @ b @ C.T, atol=1e-12)


def test_constant_block():
    y = dct2_forward(np.full((N, N), 0.3))
    assert y[0, 0] == pytest.approx(16 * 0.3, abs=1e-12)
    y[0, 0] = 0
    assert np.abs(y).max() < 1e-12


def test_basis_functions(rng):
    for i, j in [(0, 1), (3, 7), (15, 15), (9, 0)]:
        unit = np.zeros((N, N))
        unit[i, j] = 1
        assert np.allclose(dct2_forward(dct2_inverse(unit)), unit, atol=1e-12)
    dc = np.zeros((N, N))
    dc[0, 0] = 1
    assert np.allclose(dct2_inverse(dc), 1 / 16, atol=1e-15)
    assert not dct2_inverse(np.zeros((N, N))).any()


def test_index_convention():
    # a horizontal cosine varies along columns, so it lands on j
    x = np.cos(np.pi * (2 * np.arange(N) + 1) * 3 / (2 * N))
    y = dct2_forward(np.tile(x, (N, 1)))
    assert abs(y[0, 3]) > 10 and abs(y[3, 0]) < 1e-10


def test_batched_matches_single(rng):
    b = rng.random((5, N, N))
    assert np.allclose(dct2_forward(b)[3], dct2_forward(b[3]))


@given(blocks)
def test_round_trip_and_parseval(b):
    y = dct2_forward(b)
    assert np.abs(dct2_inverse(y) - b).max() <= 1e-9 * max(1.0, np.abs(b).max())
    e = np.sum(b * b)
    assert np.sum(y * y) == pytest.approx(e, rel=1e-10, abs=1e-20)


def test_frequencies():
    assert coeff_frequency(0, 0) == 0
    assert coeff_frequency(1, 0) == pytest.approx(256 / 3 / 32, abs=1e-12)
    assert coeff_frequency(1, 0) == pytest.approx(2.667, abs=1e-3)
    assert coeff_frequency(15, 15) == pytest.approx(np.sqrt(2) * 40, abs=1e-9)
    assert coeff_frequency(2, 0, ViewingGeometry(64.0)) == pytest.approx(4.0)
    with pytest.raises(IndexError):
        coeff_frequency(16, 0)
    with pytest.raises(ValueError):
        ViewingGeometry(0.0)


def test_frequency_monotone():
    g = frequency_grid()
    assert np.all(np.diff(g, axis=0) >= 0) and np.all(np.diff(g, axis=1) >= 0)


def test_csf_peak_and_floor():
    f = np.linspace(0, 60, 60001)
    a = csf_weight(f)
    # oracle: the unnormalized published curve evaluated on a grid
    raw = 2.6 * (0.0192 + 0.114 * f) * np.exp(-(0.114 * f) ** 1.1)
    assert f[np.argmax(raw)] == pytest.approx(8.0, abs=0.15)
    assert CSF_PEAK_FREQ == pytest.approx(f[np.argmax(raw)], abs=1e-3)
    assert a.max() == pytest.approx(1.0, abs=1e-9)
    assert np.all(a >= CSF_FLOOR) and np.all(a <= 1)
    assert np.allclose(a, np.maximum(raw / raw.max(), CSF_FLOOR), atol=1e-8)
    assert csf_weight(30.0) < csf_weight(10.0)


def test_csf_weights_grid():
    w = csf_weights()
    assert w.shape == (N, N)
    assert w[0, 0] == pytest.approx(csf_weight(0.0))
    assert w[15, 15] == CSF_FLOOR
