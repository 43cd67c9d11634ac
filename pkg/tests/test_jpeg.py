import numpy as np
import pytest

from svrcodec.errors import BadMagic, CorruptPayload
from svrcodec.jpeg import STD_LUMINANCE, ZIGZAG, jpeg_baseline, jpeg_decode, jpeg_encode, quant_table
from svrcodec.metrics import rmse
from svrcodec.pixio import GrayImage


def test_quality_scaling():
    assert np.array_equal(quant_table(50), STD_LUMINANCE)
    assert quant_table(100).max() == 1
    assert quant_table(1).min() == 255
    # IJG: quality 75 -> scale 50%
    assert quant_table(75)[0, 0] == (16 * 50 + 50) // 100
    with pytest.raises(ValueError):
        quant_table(0)


def test_zigzag_prefix():
    assert ZIGZAG[:10].tolist() == [0, 1, 8, 16, 9, 2, 3, 10, 17, 24]
    assert sorted(ZIGZAG.tolist()) == list(range(64))


def test_high_quality_is_near_lossless(camera):
    size, dec = jpeg_baseline(camera, 100)
    assert rmse(camera, dec) < 3


def test_quality_ladder_monotone(camera):
    sizes, errs = [], []
    for q in range(10, 91, 10):
        size, dec = jpeg_baseline(camera, q)
        sizes.append(size)
        errs.append(rmse(camera, dec))
    assert all(a <= b for a, b in zip(sizes, sizes[1:]))
    assert all(a >= b for a, b in zip(errs, errs[1:]))


@pytest.mark.parametrize("q", [1, 20, 50, 90])
def test_constant_image(q):
    img = GrayImage.from_array(np.full((40, 24), 77, np.uint8))
    dec = jpeg_decode(jpeg_encode(img, q))
    err = np.abs(dec.pixels.astype(int) - 77).max()
    # only DC survives; its step is q_dc / 8 gray levels, so +-1 needs q_dc <= 16
    assert np.ptp(dec.pixels) == 0
    assert err <= quant_table(q)[0, 0] / 16 + 0.5
    if q >= 50:
        assert err <= 1


def test_odd_size_round_trip(rng):
    img = GrayImage.from_array(rng.integers(0, 256, (13, 21)).astype(np.uint8))
    dec = jpeg_decode(jpeg_encode(img, 95))
    assert (dec.width, dec.height) == (21, 13)


def test_corrupt_streams(camera):
    data = jpeg_encode(camera, 30)
    with pytest.raises(BadMagic):
        jpeg_decode(b"XXXX" + data[4:])
    with pytest.raises(CorruptPayload):
        jpeg_decode(data[:len(data) // 2])
