import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from svrcodec.quantize import (BitReader, BitWriter, QuantizerSpec, dequantize_step,
                               dequantize_weights, get_magnitude, put_magnitude,
                               quantize_step, quantize_weights)

weights = arrays(np.float64, st.integers(1, 50), elements=st.floats(-1e3, 1e3))


def test_spec_validation():
    for bad in (1, 9):
        with pytest.raises(ValueError):
            QuantizerSpec(bad)
    assert QuantizerSpec().levels == 32
    assert QuantizerSpec(5).step_factor == 2.0
    assert QuantizerSpec(6).step_factor == 2 * QuantizerSpec(7).step_factor


@given(weights, st.integers(2, 8))
def test_midrise_error_bound(w, bits):
    q = QuantizerSpec(bits)
    sym, w_max = quantize_weights(w, q)
    assert sym.min() >= 0 and sym.max() < q.levels
    err = np.abs(dequantize_weights(sym, q, w_max) - w)
    assert np.all(err <= w_max / 2 ** bits * (1 + 1e-12) + 1e-300)


def test_midrise_examples(rng):
    q = QuantizerSpec(5)
    w = rng.uniform(-3, 3, 1000)
    w_max = np.abs(w).max()
    sym, _ = quantize_weights(w, q)
    assert np.abs(dequantize_weights(sym, q, w_max) - w).max() <= w_max / 32 * (1 + 1e-12)
    zero, _ = quantize_weights(np.array([0.0]), q, w_max)
    assert abs(dequantize_weights(zero, q, w_max)[0]) <= w_max / 32
    top, _ = quantize_weights(np.array([w_max]), q, w_max)
    assert top[0] == q.levels - 1
    step = 2 * w_max / q.levels
    assert abs(dequantize_weights(top, q, w_max)[0] - w_max) <= step / 2 * (1 + 1e-12)


@given(weights, st.floats(1e-3, 10))
def test_step_quantizer_bound(w, step):
    back = dequantize_step(quantize_step(w, step), step)
    assert np.all(np.abs(back - w) <= step / 2 * (1 + 1e-9))


@given(st.lists(st.integers(0, 2**20), max_size=200))
def test_magnitude_code_round_trip(values):
    cats, raw = [], BitWriter()
    for v in values:
        put_magnitude(v, cats, raw)
    # raw bits are exactly the bits below each MSB
    assert len(raw) == sum(max(c - 1, 0) for c in cats)
    r = BitReader(raw.getvalue(), len(raw))
    assert [get_magnitude(c, r) for c in cats] == values


def test_reader_exhaustion():
    r = BitReader(b"\xff", 3)
    r.read(3)
    with pytest.raises(EOFError):
        r.read(1)
