"""Binary PGM I/O and 16x16 block tiling."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DimensionMismatch, Truncated, UnsupportedFormat

BLOCK = 16

_TOKEN = re.compile(rb"\s*(?:#[^\n]*\n\s*)*([^\s#]+)")


@dataclass(frozen=True)
class GrayImage:
    """8-bit monochrome raster stored row-major."""

    width: int
    height: int
    samples: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise DimensionMismatch(f"bad image size {self.width}x{self.height}")
        s = np.ascontiguousarray(self.samples, dtype=np.uint8).reshape(-1)
        if s.size != self.width * self.height:
            raise DimensionMismatch(
                f"{s.size} samples for a {self.width}x{self.height} image")
        s.flags.writeable = False
        object.__setattr__(self, "samples", s)

    @classmethod
    def from_array(cls, arr) -> "GrayImage":
        arr = np.asarray(arr)
        if arr.ndim != 2:
            raise DimensionMismatch("expected a 2-D array")
        return cls(arr.shape[1], arr.shape[0], arr.astype(np.uint8).ravel())

    @property
    def pixels(self) -> np.ndarray:
        """(height, width) read-only view."""
        return self.samples.reshape(self.height, self.width)

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return (self.width == other.width and self.height == other.height
                and np.array_equal(self.samples, other.samples))

    __hash__ = None


@dataclass(frozen=True)
class BlockGrid:
    cols: int
    rows: int
    orig_width: int
    orig_height: int
    blocks: np.ndarray = field(repr=False)  # (rows*cols, 16, 16), raster order

    def block(self, bx: int, by: int) -> np.ndarray:
        return self.blocks[by * self.cols + bx]


def load_image(raw: bytes) -> GrayImage:
    """Parse a binary PGM (P5, maxval 255) byte stream."""
    pos = 0
    tokens = []
    for _ in range(4):
        m = _TOKEN.match(raw, pos)
        if m is None:
            raise Truncated("PGM header ended early")
        tokens.append(m.group(1))
        pos = m.end()
    if tokens[0] != b"P5":
        raise UnsupportedFormat(f"unsupported magic {tokens[0][:8]!r}; only P5 is read")
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError as exc:
        raise UnsupportedFormat("non-numeric PGM header field") from exc
    if maxval != 255:
        raise UnsupportedFormat(f"maxval {maxval} unsupported; need 255")
    if width < 1 or height < 1:
        raise UnsupportedFormat("PGM dimensions must be positive")
    # exactly one whitespace byte separates the header from the raster
    if pos >= len(raw) or not raw[pos:pos + 1].isspace():
        raise Truncated("missing raster after PGM header")
    pos += 1
    n = width * height
    payload = raw[pos:pos + n]
    if len(payload) < n:
        raise Truncated(f"raster has {len(payload)} of {n} bytes")
    return GrayImage(width, height, np.frombuffer(payload, dtype=np.uint8))


def save_image(img: GrayImage) -> bytes:
    return b"P5\n%d %d\n255\n" % (img.width, img.height) + img.samples.tobytes()


def read_pgm(path) -> GrayImage:
    return load_image(Path(path).read_bytes())


def write_pgm(path, img: GrayImage) -> None:
    Path(path).write_bytes(save_image(img))


def tile_blocks(img: GrayImage) -> BlockGrid:
    """Split into 16x16 blocks scaled to [0, 1], padding by edge replication."""
    cols = -(-img.width // BLOCK)
    rows = -(-img.height // BLOCK)
    px = img.pixels.astype(np.float64) / 255.0
    padded = np.pad(px, ((0, rows * BLOCK - img.height), (0, cols * BLOCK - img.width)),
                    mode="edge")
    blocks = (padded.reshape(rows, BLOCK, cols, BLOCK)
              .transpose(0, 2, 1, 3)
              .reshape(rows * cols, BLOCK, BLOCK))
    return BlockGrid(cols, rows, img.width, img.height, blocks)


def assemble_blocks(grid: BlockGrid) -> GrayImage:
    """Inverse of :func:`tile_blocks`: crop, rescale to 0..255, round and clamp."""
    blocks = np.asarray(grid.blocks, dtype=np.float64)
    if blocks.shape != (grid.rows * grid.cols, BLOCK, BLOCK):
        raise DimensionMismatch(
            f"expected {grid.rows * grid.cols} blocks of 16x16, got {blocks.shape}")
    if BLOCK * grid.cols < grid.orig_width or BLOCK * grid.rows < grid.orig_height:
        raise DimensionMismatch("grid does not cover the original image")
    full = (blocks.reshape(grid.rows, grid.cols, BLOCK, BLOCK)
            .transpose(0, 2, 1, 3)
            .reshape(grid.rows * BLOCK, grid.cols * BLOCK))
    full = full[:grid.orig_height, :grid.orig_width]
    out = np.clip(np.rint(full * 255.0), 0, 255).astype(np.uint8)
    return GrayImage.from_array(out)
