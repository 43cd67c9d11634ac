"""JPEG-like 8x8 DCT baseline used only as a rate-distortion reference.

Follows baseline JPEG's quantization and symbol structure (DC DPCM size
categories, AC run/size pairs, EOB and ZRL, raw magnitude bits) but entropy
codes the category symbols with the adaptive range coder instead of Huffman
tables. Not interchange-format compatible.
"""
from __future__ import annotations

import struct

import numpy as np
from scipy.fft import dctn, idctn

from .errors import BadMagic, CorruptPayload
from .pixio import GrayImage
from .quantize import BitReader, BitWriter, category
from .rangecoder import entropy_code, entropy_decode

MAGIC = b"JPGL"

# ITU-T T.81 Annex K.1 luminance table
STD_LUMINANCE = np.array([
    [16, 11, 10, 16, 24, 40, 51, 61],
    [12, 12, 14, 19, 26, 58, 60, 55],
    [14, 13, 16, 24, 40, 57, 69, 56],
    [14, 17, 22, 29, 51, 87, 80, 62],
    [18, 22, 37, 56, 68, 109, 103, 77],
    [24, 35, 55, 64, 81, 104, 113, 92],
    [49, 64, 78, 87, 103, 121, 120, 101],
    [72, 92, 95, 98, 112, 100, 103, 99],
], dtype=np.int64)


def _zigzag(n=8):
    order = sorted(((i, j) for i in range(n) for j in range(n)),
                   key=lambda ij: (ij[0] + ij[1], ij[1] if (ij[0] + ij[1]) % 2 == 0 else ij[0]))
    return np.array([i * n + j for i, j in order])


ZIGZAG = _zigzag()


def quant_table(quality: int) -> np.ndarray:
    """IJG quality scaling of the standard luminance table."""
    if not 1 <= quality <= 100:
        raise ValueError("quality must be in 1..100")
    scale = 5000 // quality if quality < 50 else 200 - 2 * quality
    return np.clip((STD_LUMINANCE * scale + 50) // 100, 1, 255)


def _magnitude_bits(v, size):
    # JPEG convention: negatives stored as one's complement of |v|
    return v if v >= 0 else v + (1 << size) - 1


def _from_magnitude_bits(bits, size):
    if size == 0:
        return 0
    return bits if bits >> (size - 1) else bits - (1 << size) + 1


def jpeg_encode(img: GrayImage, quality: int) -> bytes:
    q = quant_table(quality)
    cols, rows = -(-img.width // 8), -(-img.height // 8)
    px = np.pad(img.pixels.astype(np.float64) - 128.0,
                ((0, rows * 8 - img.height), (0, cols * 8 - img.width)), mode="edge")
    blocks = px.reshape(rows, 8, cols, 8).transpose(0, 2, 1, 3).reshape(-1, 8, 8)
    coefs = np.rint(dctn(blocks, type=2, norm="ortho", axes=(1, 2)) / q).astype(np.int64)
    zz = coefs.reshape(-1, 64)[:, ZIGZAG]

    dc_syms, ac_syms = [], []
    bits = BitWriter()
    prev_dc = 0
    for blk in zz:
        diff = int(blk[0]) - prev_dc
        prev_dc = int(blk[0])
        size = category(abs(diff))
        dc_syms.append(size)
        bits.write(_magnitude_bits(diff, size), size)
        run = 0
        nz = np.flatnonzero(blk[1:])
        last = nz[-1] + 1 if nz.size else 0
        for k in range(1, last + 1):
            v = int(blk[k])
            if v == 0:
                run += 1
                continue
            while run > 15:
                ac_syms.append(0xF0)
                run -= 16
            size = category(abs(v))
            ac_syms.append((run << 4) | size)
            bits.write(_magnitude_bits(v, size), size)
            run = 0
        if last < 63:
            ac_syms.append(0x00)

    dc_bytes = entropy_code(dc_syms, 16)
    ac_bytes = entropy_code(ac_syms, 256)
    raw = bits.getvalue()
    head = MAGIC + struct.pack("<HHBIIIII", img.width, img.height, quality,
                               len(dc_syms), len(ac_syms), len(dc_bytes),
                               len(ac_bytes), len(raw))
    return head + dc_bytes + ac_bytes + raw


def jpeg_decode(data: bytes) -> GrayImage:
    if data[:4] != MAGIC:
        raise BadMagic("not a baseline stream")
    hdr = struct.Struct("<HHBIIIII")
    try:
        w, h, quality, n_dc, n_ac, l_dc, l_ac, l_raw = hdr.unpack_from(data, 4)
    except struct.error as exc:
        raise CorruptPayload("truncated baseline header") from exc
    pos = 4 + hdr.size
    n_blocks = (-(-w // 8)) * (-(-h // 8))
    if not 1 <= quality <= 100 or n_blocks == 0:
        raise CorruptPayload("bad baseline header fields")
    if n_dc != n_blocks or n_ac > 63 * n_blocks:
        raise CorruptPayload("symbol counts disagree with image size")
    if pos + l_dc + l_ac > len(data):
        raise CorruptPayload("baseline stream shorter than its directory")
    dc_syms = entropy_decode(data[pos:pos + l_dc], n_dc, 16)
    pos += l_dc
    ac_syms = entropy_decode(data[pos:pos + l_ac], n_ac, 256)
    pos += l_ac
    if pos + l_raw > len(data):
        raise CorruptPayload("baseline stream shorter than its directory")
    bits = BitReader(data[pos:pos + l_raw])

    q = quant_table(quality)
    cols, rows = -(-w // 8), -(-h // 8)
    try:
        zz = _unpack_blocks(rows * cols, dc_syms, ac_syms, n_ac, bits)
    except EOFError as exc:
        raise CorruptPayload("magnitude bits exhausted") from exc
    coefs = np.zeros_like(zz)
    coefs[:, ZIGZAG] = zz
    blocks = idctn(coefs.reshape(-1, 8, 8) * q, type=2, norm="ortho", axes=(1, 2)) + 128.0
    full = blocks.reshape(rows, cols, 8, 8).transpose(0, 2, 1, 3).reshape(rows * 8, cols * 8)
    return GrayImage.from_array(np.clip(np.rint(full[:h, :w]), 0, 255).astype(np.uint8))


def _unpack_blocks(n_blocks, dc_syms, ac_syms, n_ac, bits):
    if dc_syms.size != n_blocks:
        raise CorruptPayload("DC symbol count disagrees with image size")
    zz = np.zeros((n_blocks, 64), dtype=np.int64)
    prev_dc = 0
    ai = 0
    for b in range(n_blocks):
        size = int(dc_syms[b])
        prev_dc += _from_magnitude_bits(bits.read(size), size)
        zz[b, 0] = prev_dc
        k = 1
        while k < 64:
            if ai >= n_ac:
                raise CorruptPayload("AC symbols exhausted")
            sym = int(ac_syms[ai])
            ai += 1
            if sym == 0x00:
                break
            run, size = sym >> 4, sym & 15
            k += run
            if k >= 64:
                raise CorruptPayload("AC run past end of block")
            if size:
                zz[b, k] = _from_magnitude_bits(bits.read(size), size)
            k += 1
    return zz


def jpeg_baseline(img: GrayImage, quality: int) -> tuple[int, GrayImage]:
    """(coded size in bytes, decoded image) at the given quality."""
    data = jpeg_encode(img, quality)
    return len(data), jpeg_decode(data)
