import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from svrcodec.errors import DimensionMismatch, Truncated, UnsupportedFormat
from svrcodec.pixio import (BLOCK, BlockGrid, GrayImage, assemble_blocks, load_image,
                           save_image, tile_blocks)


def images(max_side=40):
    return st.tuples(st.integers(1, max_side), st.integers(1, max_side)).flatmap(
        lambda hw: arrays(np.uint8, hw))


def test_header_with_comments():
    raw = b"P5\n# made by hand\n3 # width\n 2\n255\n" + bytes(range(6))
    img = load_image(raw)
    assert (img.width, img.height) == (3, 2)
    assert img.pixels.tolist() == [[0, 1, 2], [3, 4, 5]]


def test_rejects_ascii_and_deep_pgm():
    with pytest.raises(UnsupportedFormat):
        load_image(b"P2\n1 1\n255\n0\n")
    with pytest.raises(UnsupportedFormat):
        load_image(b"P5\n1 1\n65535\n\x00\x00")


def test_truncated_raster():
    with pytest.raises(Truncated):
        load_image(b"P5\n4 4\n255\n" + bytes(10))
    with pytest.raises(Truncated):
        load_image(b"P5\n4 4")


def test_samples_are_immutable():
    img = GrayImage(2, 1, [1, 2])
    with pytest.raises(ValueError):
        img.samples[0] = 9


@given(images())
def test_pgm_round_trip(arr):
    img = GrayImage.from_array(arr)
    assert load_image(save_image(img)) == img


@given(images(70))
def test_tile_assemble_round_trip(arr):
    img = GrayImage.from_array(arr)
    grid = tile_blocks(img)
    assert grid.cols == -(-img.width // BLOCK) and grid.rows == -(-img.height // BLOCK)
    assert grid.blocks.min() >= 0 and grid.blocks.max() <= 1
    assert assemble_blocks(grid) == img


def test_padding_replicates_edges():
    arr = np.arange(20 * 18, dtype=np.uint8).reshape(18, 20)
    grid = tile_blocks(GrayImage.from_array(arr))
    # block (1, 1) covers rows 16..31, cols 16..31; source has rows 16..17, cols 16..19
    b = grid.block(1, 1) * 255
    assert np.allclose(b[:2, :4], arr[16:, 16:])
    assert np.allclose(b[5, 10], arr[17, 19])
    assert np.allclose(b[0, 15], arr[16, 19])


def test_assemble_rounds_and_clamps():
    blocks = np.full((1, BLOCK, BLOCK), 0.5)
    blocks[0, 0, 0] = -0.2
    blocks[0, 0, 1] = 1.7
    img = assemble_blocks(BlockGrid(1, 1, BLOCK, BLOCK, blocks))
    assert img.pixels[0, 0] == 0 and img.pixels[0, 1] == 255
    assert img.pixels[1, 1] == 128  # rint(127.5) rounds half to even


def test_assemble_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        assemble_blocks(BlockGrid(2, 1, 32, 16, np.zeros((1, BLOCK, BLOCK))))
    with pytest.raises(DimensionMismatch):
        assemble_blocks(BlockGrid(1, 1, 17, 16, np.zeros((1, BLOCK, BLOCK))))
