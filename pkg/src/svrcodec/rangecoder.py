"""Adaptive order-0 range coder.

Byte-oriented coder with 32-bit range and delayed carry propagation (the
scheme used by LZMA). Symbols not yet seen have zero frequency; the first
occurrence of a symbol is coded as an escape followed by its rank among the
unseen symbols, coded uniformly. A seen
symbol's count grows by ``INCREMENT`` per use and all counts are halved once
the total passes ``MAX_TOTAL``. Encoder and decoder update identically, so no
model is transmitted, and a stream dominated by a few symbols pays nothing
for the unused part of the alphabet.
"""
from __future__ import annotations

import numpy as np
from numba import njit

from .errors import CorruptPayload

MAX_ALPHABET = 257
INCREMENT = 32
# the escape grows with every new symbol and vanishes once none are left
ESCAPE_INCREMENT = 16
MAX_TOTAL = 1 << 16
_TOP = 1 << 24
_MASK32 = 0xFFFFFFFF
# encoder state slots
_LOW, _RANGE, _CACHE, _CSIZE, _POS = range(5)


@njit(cache=True)
def _rescale(freq):
    total = 0
    for s in range(freq.size):
        freq[s] = (freq[s] + 1) >> 1
        total += freq[s]
    return total


@njit(cache=True)
def _shift_low(st, out):
    low = st[_LOW]
    if low < 0xFF000000 or low > _MASK32:
        carry = low >> 32
        temp = st[_CACHE]
        while True:
            out[st[_POS]] = (temp + carry) & 0xFF
            st[_POS] += 1
            temp = 0xFF
            st[_CSIZE] -= 1
            if st[_CSIZE] == 0:
                break
        st[_CACHE] = (low >> 24) & 0xFF
    st[_CSIZE] += 1
    st[_LOW] = (low & 0x00FFFFFF) << 8


@njit(cache=True)
def _put(st, out, cum, f, total):
    r = st[_RANGE] // total
    st[_LOW] += r * cum
    st[_RANGE] = r * f
    while st[_RANGE] < _TOP:
        st[_RANGE] = (st[_RANGE] << 8) & _MASK32
        _shift_low(st, out)


@njit(cache=True)
def _encode(symbols, alphabet):
    n = symbols.size
    # a seen symbol costs just over 16 bits at most; a novel one about 25
    out = np.empty(2 * n + n // 64 + 4 * alphabet + 16, dtype=np.uint8)
    st = np.zeros(5, dtype=np.int64)
    st[_RANGE] = _MASK32
    st[_CSIZE] = 1
    freq = np.zeros(alphabet + 1, dtype=np.int64)
    freq[alphabet] = 1  # escape, kept last
    total = 1
    unseen = alphabet
    for idx in range(n):
        s = symbols[idx]
        if freq[s] == 0:
            _put(st, out, total - freq[alphabet], freq[alphabet], total)
            rank = 0
            for k in range(s):
                if freq[k] == 0:
                    rank += 1
            _put(st, out, rank, 1, unseen)
            unseen -= 1
            freq[alphabet] += ESCAPE_INCREMENT
            total += ESCAPE_INCREMENT
            if unseen == 0:
                total -= freq[alphabet]
                freq[alphabet] = 0
        else:
            cum = 0
            for k in range(s):
                cum += freq[k]
            _put(st, out, cum, freq[s], total)
        freq[s] += INCREMENT
        total += INCREMENT
        if total > MAX_TOTAL:
            total = _rescale(freq)
    for _ in range(5):
        _shift_low(st, out)
    return out[:st[_POS]]


@njit(cache=True)
def _decode(data, count, alphabet):
    out = np.empty(count, dtype=np.int64)
    freq = np.zeros(alphabet + 1, dtype=np.int64)
    freq[alphabet] = 1
    total = 1
    unseen = alphabet
    n = data.size
    pos = 0
    code = 0
    rng = _MASK32
    for _ in range(5):
        b = data[pos] if pos < n else 0
        pos += 1
        code = ((code << 8) | b) & _MASK32
    for idx in range(count):
        r = rng // total
        v = code // r
        if v >= total:
            return out, False
        cum = 0
        s = 0
        while cum + freq[s] <= v:
            cum += freq[s]
            s += 1
        code -= r * cum
        rng = r * freq[s]
        while rng < _TOP:
            b = data[pos] if pos < n else 0
            pos += 1
            code = ((code << 8) | b) & _MASK32
            rng = (rng << 8) & _MASK32
        if s == alphabet:
            if unseen == 0:
                return out, False
            r = rng // unseen
            rank = code // r
            if rank >= unseen:
                return out, False
            code -= r * rank
            rng = r
            while rng < _TOP:
                b = data[pos] if pos < n else 0
                pos += 1
                code = ((code << 8) | b) & _MASK32
                rng = (rng << 8) & _MASK32
            s = 0
            while True:
                if freq[s] == 0:
                    if rank == 0:
                        break
                    rank -= 1
                s += 1
            unseen -= 1
            freq[alphabet] += ESCAPE_INCREMENT
            total += ESCAPE_INCREMENT
            if unseen == 0:
                total -= freq[alphabet]
                freq[alphabet] = 0
        out[idx] = s
        freq[s] += INCREMENT
        total += INCREMENT
        if total > MAX_TOTAL:
            total = _rescale(freq)
    return out, pos <= n


def entropy_code(symbols, alphabet_size: int = 256) -> bytes:
    """Range-code integer symbols in ``[0, alphabet_size)``."""
    if not 1 <= alphabet_size <= MAX_ALPHABET:
        raise ValueError(f"alphabet size must be in 1..{MAX_ALPHABET}")
    s = np.asarray(symbols, dtype=np.int64).ravel()
    if s.size and (s.min() < 0 or s.max() >= alphabet_size):
        raise ValueError("symbol outside alphabet")
    if s.size == 0:
        return b""
    return _encode(s, int(alphabet_size)).tobytes()


def entropy_decode(data: bytes, count: int, alphabet_size: int = 256) -> np.ndarray:
    if not 1 <= alphabet_size <= MAX_ALPHABET:
        raise ValueError(f"alphabet size must be in 1..{MAX_ALPHABET}")
    if count == 0:
        return np.zeros(0, dtype=np.int64)
    buf = np.frombuffer(bytes(data), dtype=np.uint8)
    out, ok = _decode(buf, int(count), int(alphabet_size))
    if not ok:
        raise CorruptPayload("range-coded stream is inconsistent with its symbol count")
    return out


def order0_entropy_bits(symbols) -> float:
    """Empirical order-0 entropy of a stream, in bits (total, not per symbol)."""
    s = np.asarray(symbols).ravel()
    if s.size == 0:
        return 0.0
    _, counts = np.unique(s, return_counts=True)
    p = counts / s.size
    return float(-(counts * np.log2(p)).sum())
