"""Distortion measures: RMSE, maximum perceptual error and SSIM."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import correlate1d

from .errors import DimensionMismatch, TooSmall
from .perceptual import NormParams, normalize_forward
from .pixio import GrayImage, tile_blocks
from .transform import dct2_forward

SSIM_WIN = 11
SSIM_SIGMA = 1.5
SSIM_K1, SSIM_K2 = 0.01, 0.03


@dataclass(frozen=True)
class QualityReport:
    rmse: float
    mpe: float
    ssim: float
    bpp: float = float("nan")


def _pair(a: GrayImage, b: GrayImage):
    if (a.width, a.height) != (b.width, b.height):
        raise DimensionMismatch(
            f"{a.width}x{a.height} vs {b.width}x{b.height}")
    return a.pixels.astype(np.float64), b.pixels.astype(np.float64)


def rmse(a: GrayImage, b: GrayImage) -> float:
    x, y = _pair(a, b)
    return float(np.sqrt(np.mean((x - y) ** 2)))


def block_responses(img: GrayImage, p: NormParams) -> np.ndarray:
    """(n_blocks, 256) perceptual responses of every 16x16 block."""
    grid = tile_blocks(img)
    y = dct2_forward(grid.blocks)
    return normalize_forward(y.reshape(len(y), -1), p)


def perceptual_block_errors(a: GrayImage, b: GrayImage, p: NormParams) -> np.ndarray:
    """Per-block RMS difference of responses, raster order."""
    _pair(a, b)
    ra = block_responses(a, p)
    rb = block_responses(b, p)
    return np.sqrt(np.mean((ra - rb) ** 2, axis=1))


def mpe(a: GrayImage, b: GrayImage, p: NormParams) -> float:
    """Maximum Perceptual Error: worst block's RMS response difference."""
    return float(perceptual_block_errors(a, b, p).max())


def _gaussian_window():
    x = np.arange(SSIM_WIN) - (SSIM_WIN - 1) / 2
    g = np.exp(-x ** 2 / (2 * SSIM_SIGMA ** 2))
    return g / g.sum()


def _filter_valid(img, g):
    half = SSIM_WIN // 2
    out = correlate1d(correlate1d(img, g, axis=0, mode="nearest"), g, axis=1, mode="nearest")
    return out[half:-half, half:-half]


def _ssim_pair(a, b):
    x, y = _pair(a, b)
    if min(x.shape) < SSIM_WIN:
        raise TooSmall(f"SSIM needs both sides >= {SSIM_WIN}")
    return x, y


def ssim_map(a: GrayImage, b: GrayImage) -> np.ndarray:
    x, y = _ssim_pair(a, b)
    c1 = (SSIM_K1 * 255) ** 2
    c2 = (SSIM_K2 * 255) ** 2
    g = _gaussian_window()
    mx, my = _filter_valid(x, g), _filter_valid(y, g)
    sxx = _filter_valid(x * x, g) - mx * mx
    syy = _filter_valid(y * y, g) - my * my
    sxy = _filter_valid(x * y, g) - mx * my
    return ((2 * mx * my + c1) * (2 * sxy + c2)
            / ((mx * mx + my * my + c1) * (sxx + syy + c2)))


def ssim(a: GrayImage, b: GrayImage) -> float:
    """Mean SSIM, 11x11 Gaussian window (std 1.5), dynamic range 255."""
    _ssim_pair(a, b)
    if a == b:
        return 1.0
    return float(ssim_map(a, b).mean())


def quality_report(ref: GrayImage, test: GrayImage, p: NormParams,
                   bpp: float = float("nan")) -> QualityReport:
    return QualityReport(rmse(ref, test), mpe(ref, test, p), ssim(ref, test), bpp)
