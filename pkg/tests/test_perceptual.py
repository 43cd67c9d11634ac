import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from svrcodec.errors import SingularSystem, ZeroMatrix
from svrcodec.perceptual import (NF, NormParams, build_interaction_matrix, diagonality_ratio,
                                 format_params, load_params, normalize_forward,
                                 normalize_inverse, normalize_inverse_fixed,
                                 normalize_jacobian, parse_params)
from svrcodec.pixio import read_pgm, tile_blocks

from conftest import DATA
from svrcodec.transform import dct2_forward, frequency_vectors

unit_blocks = arrays(np.float64, NF, elements=st.floats(-1, 1))


@pytest.fixture(scope="module")
def diag_params():
    # every coefficient decoupled: r = y^2 / (1 + y^2) with sign
    return NormParams(alpha=np.ones(NF), beta=np.ones(NF), gamma=2.0, H=np.eye(NF))


def eq4_oracle(y, p):
    # direct double loop over the defining sum
    r = np.zeros(NF)
    for f in range(NF):
        pool = sum(p.H[f, g] * abs(p.alpha[g] * y[g]) ** p.gamma for g in range(NF))
        r[f] = np.sign(y[f]) * abs(p.alpha[f] * y[f]) ** p.gamma / (p.beta[f] + pool)
    return r


def test_interaction_matrix_shape():
    H = build_interaction_matrix()
    assert np.allclose(H.sum(1), 1, atol=1e-12) and np.all(H >= 0)
    assert np.all(np.argmax(H, axis=1) == np.arange(NF))
    # unnormalized rows: c1 = 0 gives the same Gaussian profile everywhere
    raw = build_interaction_matrix(c0=0.7, c1=0.0, normalize=False)
    fv = frequency_vectors()
    d2 = ((fv[:, None] - fv[None]) ** 2).sum(-1)
    assert np.allclose(raw, np.exp(-d2 / (2 * 0.7 ** 2)))
    # width grows with frequency: high-frequency rows pool more neighbours
    Hn = build_interaction_matrix(normalize=True)
    assert Hn[0, 0] > Hn[NF - 1, NF - 1]
    with pytest.raises(ValueError):
        build_interaction_matrix(c0=0.0)


def test_params_validation():
    good = NormParams.default()
    with pytest.raises(ValueError):
        NormParams(alpha=-good.alpha, beta=good.beta, H=good.H)
    with pytest.raises(ValueError):
        NormParams(alpha=good.alpha, beta=good.beta, H=2 * good.H)
    with pytest.raises(ValueError):
        NormParams(alpha=good.alpha, beta=good.beta, gamma=0.0, H=good.H)


def test_forward_matches_definition(params, rng):
    y = rng.uniform(-1, 1, NF)
    assert np.allclose(normalize_forward(y, params), eq4_oracle(y, params), rtol=1e-12)


def test_scalar_cases(diag_params):
    y = np.zeros(NF)
    y[5] = 1.0
    assert normalize_forward(y, diag_params)[5] == pytest.approx(0.5)
    assert normalize_inverse(normalize_forward(y, diag_params), diag_params)[5] == \
        pytest.approx(1.0)
    J = normalize_jacobian(y, diag_params)
    assert J[5, 5] == pytest.approx(0.5)
    # fd oracle of r = y^2/(1+y^2) at 1
    h = 1e-5
    fd = ((1 + h) ** 2 / (1 + (1 + h) ** 2) - (1 - h) ** 2 / (1 + (1 - h) ** 2)) / (2 * h)
    assert J[5, 5] == pytest.approx(fd, rel=1e-8)
    assert diagonality_ratio(normalize_jacobian(np.linspace(-1, 1, NF), diag_params)) == 0


def test_zero_maps_to_zero(params):
    assert not normalize_forward(np.zeros(NF), params).any()
    assert not normalize_inverse(np.zeros(NF), params).any()


@given(arrays(np.float64, NF, elements=st.floats(-1, 1).filter(lambda v: v == 0 or abs(v) > 1e-100)))
def test_odd_symmetry_and_signs(y):
    p = NormParams.default()
    r = normalize_forward(y, p)
    assert np.allclose(normalize_forward(-y, p), -r)
    nz = np.abs(y) > 0
    assert np.all(np.sign(r[nz]) == np.sign(y[nz]))


@given(unit_blocks)
def test_round_trip(y):
    p = NormParams.default()
    back = normalize_inverse(normalize_forward(y, p), p)
    assert np.linalg.norm(back - y) <= 1e-8 * max(np.linalg.norm(y), 1e-300)


@given(arrays(np.float64, NF, elements=st.floats(-50, 50)))
def test_response_bound(y):
    # the attainable bound is 1 / h_ff, not 1: the pool weights a coefficient's
    # own energy by h_ff < 1
    p = NormParams.default()
    r = normalize_forward(y, p)
    assert np.all(np.abs(r) < 1.0 / np.diag(p.H))


def test_unit_bound_does_not_hold(params):
    # a lone strong high-frequency coefficient exceeds 1
    y = np.zeros(NF)
    y[NF - 1] = 1e3
    assert normalize_forward(y, params)[NF - 1] > 1


@given(st.integers(0, NF - 1), st.floats(0, 2), st.floats(0, 2))
def test_monotone_in_own_coefficient(f, a, b):
    p = NormParams.default()
    y = np.linspace(-0.5, 0.5, NF)
    lo, hi = sorted((a, b))
    y1, y2 = y.copy(), y.copy()
    y1[f], y2[f] = lo, hi
    assert normalize_forward(y2, p)[f] >= normalize_forward(y1, p)[f] - 1e-15


def test_jacobian_vs_finite_differences(params, rng):
    for _ in range(5):
        y = rng.uniform(0.01, 1, NF) * rng.choice([-1, 1], NF)
        J = normalize_jacobian(y, params)
        fd = np.empty_like(J)
        h = 1e-5
        for k in range(NF):
            d = np.zeros(NF)
            d[k] = h
            fd[:, k] = (normalize_forward(y + d, params) - normalize_forward(y - d, params)) / (2 * h)
        scale = np.abs(fd).max()
        assert np.abs(J - fd).max() < 1e-4 * scale


def test_inverse_with_known_dc(params, rng):
    y = rng.uniform(-1, 1, NF)
    y[0] = 7.0
    mask = np.zeros(NF, bool)
    mask[0] = True
    r = normalize_forward(y, params)
    r_bad = r.copy()
    r_bad[0] = 123.0  # ignored
    assert np.allclose(normalize_inverse_fixed(r_bad, params, mask, y), y, atol=1e-12)


def test_inverse_out_of_range(params):
    with pytest.raises(SingularSystem):
        normalize_inverse(np.full(NF, 1e6), params)


def test_diagonality_ratio_basics():
    assert diagonality_ratio(np.eye(4)) == 0
    assert diagonality_ratio(np.ones((2, 2))) == 0.5
    with pytest.raises(ZeroMatrix):
        diagonality_ratio(np.zeros((3, 3)))


def test_textured_image_never_diagonal(params):
    blocks = dct2_forward(tile_blocks(read_pgm(DATA / "grass.pgm")).blocks).reshape(-1, NF)
    ratios = [diagonality_ratio(normalize_jacobian(y, params)) for y in blocks]
    assert min(ratios) > 0.01


def test_flat_blocks_are_nearly_diagonal(camera, params):
    # smooth sky: the DC term dominates, so the off-diagonal share is small but nonzero
    ratios = [diagonality_ratio(normalize_jacobian(y, params))
              for y in dct2_forward(tile_blocks(camera).blocks[:16]).reshape(-1, NF)]
    assert 0 < min(ratios) < 0.01


def test_param_file_round_trip(tmp_path):
    text = "gamma = 2\nbeta_default=0.25  # saturation\nc0=0.6\nc1=0.1\n"
    p = parse_params(text)
    assert np.all(p.beta == 0.25) and p.c0 == 0.6
    q = parse_params(format_params(p, with_vectors=True))
    assert q.digest() == p.digest()
    path = tmp_path / "model.txt"
    path.write_text("beta=" + ",".join(["0.2"] * NF) + "\n")
    assert np.all(load_params(path).beta == 0.2)
    assert p.digest() != NormParams.default().digest()
    with pytest.raises(ValueError):
        parse_params("alpha=1,2,3\n")
    with pytest.raises(ValueError):
        parse_params("delta=1\n")
