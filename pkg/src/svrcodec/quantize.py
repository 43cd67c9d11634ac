"""Weight quantizers and magnitude-category symbol coding."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_BITS = 5


@dataclass(frozen=True)
class QuantizerSpec:
    """Weight resolution in bits.

    For the fixed-range mid-rise quantizer (:func:`quantize_weights`) this is
    the usual ``2**bits`` levels. The codec instead uses a uniform step tied
    to the fit tolerance, ``step_factor * eps0 * scale`` with
    ``step_factor = 2**(6 - bits)``: every extra bit halves the step, and the
    default 5 bits quantizes weights to twice the insensitivity.
    """

    bits: int = DEFAULT_BITS

    def __post_init__(self):
        if not 2 <= self.bits <= 8:
            raise ValueError("weight quantizer needs 2..8 bits")

    @property
    def levels(self) -> int:
        return 1 << self.bits

    @property
    def step_factor(self) -> float:
        return 2.0 ** (6 - self.bits)


def quantize_weights(weights, q: QuantizerSpec, w_max: float | None = None):
    """Mid-rise quantizer with ``2**bits`` levels on [-w_max, w_max].

    Returns ``(symbols, w_max)``; reconstruction error is at most ``w_max / 2**bits``.
    """
    w = np.asarray(weights, dtype=np.float64)
    if w_max is None:
        w_max = float(np.abs(w).max(initial=0.0))
    if w_max == 0:
        return np.full(w.shape, q.levels // 2, dtype=np.int64), 0.0
    step = 2.0 * w_max / q.levels
    sym = np.floor(w / step).astype(np.int64) + q.levels // 2
    return np.clip(sym, 0, q.levels - 1), float(w_max)


def dequantize_weights(symbols, q: QuantizerSpec, w_max: float) -> np.ndarray:
    step = 2.0 * w_max / q.levels
    return (np.asarray(symbols, dtype=np.float64) - q.levels // 2 + 0.5) * step


def quantize_step(weights, step: float) -> np.ndarray:
    """Mid-tread uniform quantizer: signed integer indices ``round(w / step)``."""
    if not step > 0:
        raise ValueError("step must be positive")
    return np.rint(np.asarray(weights, dtype=np.float64) / step).astype(np.int64)


def dequantize_step(indices, step: float) -> np.ndarray:
    return np.asarray(indices, dtype=np.float64) * step


# --- category + raw-bits representation of non-negative integers ----------

def category(v: int) -> int:
    """Number of significant bits of ``v`` (0 for 0)."""
    return int(v).bit_length()


class BitWriter:
    def __init__(self):
        self._bits = []

    def write(self, value: int, n: int):
        for k in range(n - 1, -1, -1):
            self._bits.append((value >> k) & 1)

    def __len__(self):
        return len(self._bits)

    def getvalue(self) -> bytes:
        return np.packbits(np.array(self._bits, dtype=np.uint8)).tobytes()


class BitReader:
    def __init__(self, data: bytes, nbits: int | None = None):
        self._bits = np.unpackbits(np.frombuffer(bytes(data), dtype=np.uint8))
        self.limit = self._bits.size if nbits is None else nbits
        self.pos = 0

    def read(self, n: int) -> int:
        if self.pos + n > self.limit:
            raise EOFError("raw bit stream exhausted")
        v = 0
        for b in self._bits[self.pos:self.pos + n]:
            v = (v << 1) | int(b)
        self.pos += n
        return v


def put_magnitude(v: int, cats: list, raw: BitWriter):
    """Append ``v >= 0`` as a category symbol plus the bits below its MSB."""
    c = category(v)
    cats.append(c)
    if c > 1:
        raw.write(v - (1 << (c - 1)), c - 1)


def get_magnitude(c: int, raw: BitReader) -> int:
    if c == 0:
        return 0
    if c == 1:
        return 1
    return (1 << (c - 1)) + raw.read(c - 1)
