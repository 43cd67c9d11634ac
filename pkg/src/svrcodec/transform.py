"""Orthonormal 16x16 block DCT, coefficient frequencies and CSF weights."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.fft import dctn, idctn

N = 16
CSF_FLOOR = 0.01


@dataclass(frozen=True)
class ViewingGeometry:
    """Display sampling density; the default puts 256 pixels in 3 degrees."""

    samples_per_degree: float = 256.0 / 3.0

    def __post_init__(self):
        if not self.samples_per_degree > 0:
            raise ValueError("samples_per_degree must be positive")


DEFAULT_VIEW = ViewingGeometry()


def dct2_forward(block) -> np.ndarray:
    """Type-II 2-D DCT with orthonormal scaling; index (i, j) = (vertical, horizontal).

    Operates on the last two axes, so a stack of blocks transforms in one call.
    """
    return dctn(np.asarray(block, dtype=np.float64), type=2, norm="ortho", axes=(-2, -1))


def dct2_inverse(coeffs) -> np.ndarray:
    return idctn(np.asarray(coeffs, dtype=np.float64), type=2, norm="ortho", axes=(-2, -1))


def dct_matrix(n: int = N) -> np.ndarray:
    """Explicit orthonormal DCT-II matrix ``C`` with ``coeffs = C @ block @ C.T``."""
    k = np.arange(n)[:, None]
    x = np.arange(n)[None, :]
    c = np.cos(np.pi * (2 * x + 1) * k / (2 * n)) * np.sqrt(2.0 / n)
    c[0] /= np.sqrt(2.0)
    return c


def coeff_frequency(i: int, j: int, view: ViewingGeometry = DEFAULT_VIEW) -> float:
    """Radial frequency of DCT coefficient (i, j) in cycles/degree."""
    if not (0 <= i < N and 0 <= j < N):
        raise IndexError(f"coefficient index ({i}, {j}) outside 0..{N - 1}")
    step = view.samples_per_degree / (2 * N)
    return float(np.hypot(i * step, j * step))


def frequency_vectors(view: ViewingGeometry = DEFAULT_VIEW) -> np.ndarray:
    """(256, 2) array of (f_i, f_j) in cpd, raster order over (i, j)."""
    step = view.samples_per_degree / (2 * N)
    i, j = np.meshgrid(np.arange(N), np.arange(N), indexing="ij")
    return np.stack([i.ravel() * step, j.ravel() * step], axis=1)


def frequency_grid(view: ViewingGeometry = DEFAULT_VIEW) -> np.ndarray:
    """(16, 16) radial frequencies in cpd."""
    return np.linalg.norm(frequency_vectors(view), axis=1).reshape(N, N)


def _mannos_sakrison(f):
    f = np.asarray(f, dtype=np.float64)
    return 2.6 * (0.0192 + 0.114 * f) * np.exp(-(0.114 * f) ** 1.1)


# peak of the raw curve, located once by dense search + golden refinement
def _csf_peak():
    from scipy.optimize import minimize_scalar

    grid = np.linspace(0.0, 60.0, 60001)
    f0 = grid[np.argmax(_mannos_sakrison(grid))]
    res = minimize_scalar(lambda f: -_mannos_sakrison(f),
                          bounds=(f0 - 0.01, f0 + 0.01), method="bounded",
                          options={"xatol": 1e-10})
    return float(res.x), float(-res.fun)


CSF_PEAK_FREQ, _CSF_PEAK_VALUE = _csf_peak()


def csf_weight(f, floor: float = CSF_FLOOR):
    """Peak-normalized Mannos-Sakrison CSF, clamped below at ``floor``."""
    w = np.maximum(_mannos_sakrison(f) / _CSF_PEAK_VALUE, floor)
    w = np.minimum(w, 1.0)
    return float(w) if np.ndim(w) == 0 else w


def csf_weights(view: ViewingGeometry = DEFAULT_VIEW, floor: float = CSF_FLOOR) -> np.ndarray:
    """(16, 16) CSF weight per DCT coefficient."""
    return csf_weight(frequency_grid(view), floor)
