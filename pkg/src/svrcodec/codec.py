"""SVR image codec: RKi-1, CSF-SVR and NL-SVR, plus the bitstream format.

Every 16x16 block is DCT transformed (and, for NL-SVR, divisively
normalized). The DC coefficient is quantized on its own; an SVR is fitted to
the magnitudes of the active AC coefficients over their 2-D frequency
positions with a per-coefficient insensitivity. The bitstream carries the
support positions, uniformly quantized weights and the signs of the
coefficients the model reconstructs above a threshold.

Stream layout (little endian)::

    header     magic "SVRC", version u8, method u8, width u16, height u16,
               eps0 f32, scale f32, sigma f32, quant bits u8, param digest 8B
    dc range   lo f32, hi f32
    directory  stream count u8, then (symbol count u32, byte length u32) each
    payloads   range-coded symbol streams, then the raw bit stream
"""
from __future__ import annotations

import enum
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import (BadMagic, CorruptPayload, NoConvergence, ParamDigestMismatch,
                     SingularSystem, VersionMismatch)
from .perceptual import NF, NormParams, normalize_forward, normalize_inverse_fixed
from .pixio import BLOCK, BlockGrid, GrayImage, assemble_blocks, tile_blocks
from .quantize import (BitReader, BitWriter, QuantizerSpec, dequantize_step,
                       get_magnitude, put_magnitude, quantize_step)
from .rangecoder import entropy_code, entropy_decode
from .svr import DEFAULT_C, TrainingSet, fit_svr, gram
from .transform import (DEFAULT_VIEW, N, ViewingGeometry, csf_weights, dct2_forward,
                        dct2_inverse, frequency_grid)

MAGIC = b"SVRC"
VERSION = 1
RKI1_CUTOFF_CPD = 20.0
DC_LEVELS = 256
SIGN_THRESHOLD = 1e-3
CODEC_MAX_SWEEPS = 2000

_HEADER = struct.Struct("<4sBBHHfffB8s")
_DC_RANGE = struct.Struct("<ff")
_DIR_ENTRY = struct.Struct("<II")

# symbol streams and their alphabets; the raw bit stream follows them
_STREAMS = (("dc", 10), ("count", 10), ("gap", 10), ("weight", 33),
            ("weight_sign", 2), ("coeff_sign", 2))

# raster index -> normalized 2-D position (i/15, j/15)
_II, _JJ = np.meshgrid(np.arange(N), np.arange(N), indexing="ij")
POSITIONS = np.stack([_II.ravel(), _JJ.ravel()], axis=1) / (N - 1.0)


class MethodId(enum.IntEnum):
    RKI1 = 0
    CSF_SVR = 1
    NL_SVR = 2
    JPEG_BASELINE = 3

    @classmethod
    def parse(cls, name) -> "MethodId":
        if isinstance(name, cls):
            return name
        key = str(name).strip().upper().replace("-", "_")
        aliases = {"CSF": "CSF_SVR", "NL": "NL_SVR", "JPEG": "JPEG_BASELINE",
                   "RKI_1": "RKI1"}
        try:
            return cls[aliases.get(key, key)]
        except KeyError:
            raise ValueError(f"unknown method {name!r}") from None

    @property
    def label(self) -> str:
        return {0: "rki1", 1: "csf-svr", 2: "nl-svr", 3: "jpeg"}[int(self)]


@dataclass(frozen=True)
class EpsProfile:
    eps: np.ndarray  # (16, 16), meaningful on active coefficients
    active: np.ndarray  # (16, 16) bool, DC always excluded


def active_mask(method, view: ViewingGeometry = DEFAULT_VIEW) -> np.ndarray:
    mask = np.ones((N, N), dtype=bool)
    mask[0, 0] = False
    if MethodId.parse(method) == MethodId.RKI1:
        mask &= frequency_grid(view) <= RKI1_CUTOFF_CPD
    return mask


def build_eps_profile(method, eps0: float, scale: float,
                      view: ViewingGeometry = DEFAULT_VIEW, alpha=None) -> EpsProfile:
    """Insensitivity per coefficient; ``scale`` is the rate-control factor."""
    method = MethodId.parse(method)
    if not eps0 > 0 or not scale > 0:
        raise ValueError("eps0 and scale must be positive")
    if method == MethodId.JPEG_BASELINE:
        raise ValueError("the JPEG baseline has no insensitivity profile")
    base = eps0 * scale
    if method == MethodId.CSF_SVR:
        a = csf_weights(view) if alpha is None else np.asarray(alpha).reshape(N, N)
        eps = base / a
    else:
        eps = np.full((N, N), base)
    return EpsProfile(eps, active_mask(method, view))


def weight_step(eps0: float, scale: float, q: QuantizerSpec) -> float:
    return q.step_factor * eps0 * scale


# --- bitstream -------------------------------------------------------------

@dataclass
class BlockRecord:
    dc: int  # DC quantizer level
    positions: np.ndarray  # raster indices of support vectors, increasing
    weights: np.ndarray  # signed quantizer indices, never zero
    signs: np.ndarray  # 1 = negative, one per signed coefficient

    @property
    def n_support(self) -> int:
        return int(self.positions.size)


@dataclass
class Bitstream:
    method: MethodId
    width: int
    height: int
    eps0: float
    scale: float
    sigma: float
    bits: int
    digest: bytes
    dc_range: tuple
    blocks: list
    # encoder-side diagnostics, not serialized
    models: list = field(default=None, repr=False, compare=False)
    # coefficient signs as parsed; they are split per block only at
    # reconstruction time, once the model magnitudes are known
    sign_stream: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def quantizer(self) -> QuantizerSpec:
        return QuantizerSpec(self.bits)

    @property
    def n_support(self) -> int:
        return sum(b.n_support for b in self.blocks)

    def to_bytes(self) -> bytes:
        syms = {name: [] for name, _ in _STREAMS}
        raw = BitWriter()
        prev = 0
        for b in self.blocks:
            d = b.dc - prev
            prev = b.dc
            put_magnitude(abs(d), syms["dc"], raw)
            if d:
                raw.write(int(d < 0), 1)
            put_magnitude(b.n_support, syms["count"], raw)
            last = -1
            for pos, w in zip(b.positions, b.weights):
                put_magnitude(int(pos) - last - 1, syms["gap"], raw)
                last = int(pos)
                put_magnitude(abs(int(w)) - 1, syms["weight"], raw)
                syms["weight_sign"].append(int(w < 0))
            if self.sign_stream is None:
                syms["coeff_sign"].extend(int(s) for s in b.signs)
        if self.sign_stream is not None:
            syms["coeff_sign"] = [int(s) for s in self.sign_stream]
        payloads = [entropy_code(syms[name], alpha) for name, alpha in _STREAMS]
        raw_bytes = raw.getvalue()
        out = [_HEADER.pack(MAGIC, VERSION, int(self.method), self.width, self.height,
                            self.eps0, self.scale, self.sigma, self.bits, self.digest),
               _DC_RANGE.pack(*self.dc_range), bytes([len(_STREAMS) + 1])]
        out += [_DIR_ENTRY.pack(len(syms[name]), len(pl))
                for (name, _), pl in zip(_STREAMS, payloads)]
        out.append(_DIR_ENTRY.pack(len(raw), len(raw_bytes)))
        out += payloads
        out.append(raw_bytes)
        return b"".join(out)

    @classmethod
    def from_bytes(cls, data: bytes) -> "Bitstream":
        data = bytes(data)
        if len(data) < 4 or data[:4] != MAGIC:
            raise BadMagic("not an SVRC stream")
        if len(data) < _HEADER.size + _DC_RANGE.size + 1:
            raise CorruptPayload("truncated header")
        _, version, method, w, h, eps0, scale, sigma, bits, digest = \
            _HEADER.unpack_from(data, 0)
        if version != VERSION:
            raise VersionMismatch(f"stream version {version}, decoder {VERSION}")
        try:
            method = MethodId(method)
            QuantizerSpec(bits)
        except ValueError as exc:
            raise CorruptPayload(str(exc)) from exc
        if method == MethodId.JPEG_BASELINE or w == 0 or h == 0:
            raise CorruptPayload("bad header fields")
        if not all(np.isfinite(v) and v > 0 for v in (eps0, scale, sigma)):
            raise CorruptPayload("non-positive model parameter in header")
        n_blocks = (-(-w // BLOCK)) * (-(-h // BLOCK))
        pos = _HEADER.size
        dc_range = _DC_RANGE.unpack_from(data, pos)
        pos += _DC_RANGE.size
        if not (np.isfinite(dc_range).all() and dc_range[0] <= dc_range[1]):
            raise CorruptPayload("bad DC range")
        n_streams = data[pos]
        pos += 1
        if n_streams != len(_STREAMS) + 1 or len(data) < pos + n_streams * _DIR_ENTRY.size:
            raise CorruptPayload("bad stream directory")
        directory = [_DIR_ENTRY.unpack_from(data, pos + k * _DIR_ENTRY.size)
                     for k in range(n_streams)]
        pos += n_streams * _DIR_ENTRY.size
        streams = {}
        for (name, alpha), (count, nbytes) in zip(_STREAMS, directory):
            if name in ("dc", "count") and count != n_blocks:
                raise CorruptPayload("block count disagrees with image size")
            if count > n_blocks * NF:
                raise CorruptPayload(f"{name} stream longer than the image allows")
            if pos + nbytes > len(data):
                raise CorruptPayload("stream runs past end of data")
            streams[name] = entropy_decode(data[pos:pos + nbytes], count, alpha)
            pos += nbytes
        nbits, nbytes = directory[-1]
        if pos + nbytes != len(data) or nbits > 8 * nbytes:
            raise CorruptPayload("raw bit stream length mismatch")
        raw = BitReader(data[pos:], nbits)
        if streams["dc"].size != n_blocks or streams["count"].size != n_blocks:
            raise CorruptPayload("block count disagrees with image size")
        gaps, wcat, wsgn = streams["gap"], streams["weight"], streams["weight_sign"]
        blocks = []
        si = 0
        prev = 0
        try:
            for k in range(n_blocks):
                d = get_magnitude(int(streams["dc"][k]), raw)
                if d and raw.read(1):
                    d = -d
                prev += d
                if not 0 <= prev < DC_LEVELS:
                    raise CorruptPayload("DC level out of range")
                m = get_magnitude(int(streams["count"][k]), raw)
                if si + m > gaps.size or si + m > wcat.size or si + m > wsgn.size:
                    raise CorruptPayload("support streams exhausted")
                positions = np.empty(m, dtype=np.int64)
                weights = np.empty(m, dtype=np.int64)
                last = -1
                for t in range(m):
                    last += get_magnitude(int(gaps[si + t]), raw) + 1
                    positions[t] = last
                    mag = get_magnitude(int(wcat[si + t]), raw) + 1
                    weights[t] = -mag if wsgn[si + t] else mag
                if m and positions[-1] >= NF:
                    raise CorruptPayload("support position outside block")
                si += m
                blocks.append(BlockRecord(prev, positions, weights, np.zeros(0, dtype=np.int64)))
        except EOFError as exc:
            raise CorruptPayload(str(exc)) from exc
        if si != gaps.size or si != wcat.size or si != wsgn.size or raw.pos != nbits:
            raise CorruptPayload("trailing symbols in support streams")
        return cls(method, w, h, eps0, scale, sigma, bits, digest, dc_range, blocks,
                   sign_stream=streams["coeff_sign"])


# --- shared encoder/decoder model ------------------------------------------

def _f32(x) -> float:
    return float(np.float32(x))


def _dc_step(dc_lo, dc_hi) -> float:
    span = dc_hi - dc_lo
    return span / (DC_LEVELS - 1) if span > 0 else 0.0


def _magnitudes(rec: BlockRecord, step: float, sigma: float,
                active_idx: np.ndarray) -> np.ndarray:
    """Model magnitudes at the active raster positions from a dequantized record."""
    if rec.n_support == 0:
        return np.zeros(active_idx.size)
    w = dequantize_step(rec.weights, step)
    return gram(POSITIONS[active_idx], POSITIONS[rec.positions], sigma) @ w


def _signed_mask(mags):
    return mags > SIGN_THRESHOLD


# --- encoder ---------------------------------------------------------------

def encode_image(img: GrayImage, method, eps0: float, scale: float, sigma: float,
                 q: QuantizerSpec = QuantizerSpec(), p: NormParams | None = None,
                 *, C: float = DEFAULT_C, max_sweeps: int = CODEC_MAX_SWEEPS) -> Bitstream:
    """Fit one SVR per block and return the (serializable) bitstream.

    Raises :class:`NoConvergence` naming the first block whose fit fails.
    """
    method = MethodId.parse(method)
    if method == MethodId.JPEG_BASELINE:
        raise ValueError("use jpeg_baseline for the JPEG reference")
    if p is None:
        p = NormParams.default()
    # header precision is what the decoder sees; fit with the same values
    eps0, scale, sigma = _f32(eps0), _f32(scale), _f32(sigma)
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    profile = build_eps_profile(method, eps0, scale, p.view, p.alpha)
    active_idx = np.flatnonzero(profile.active.ravel())
    eps_active = profile.eps.ravel()[active_idx]
    inputs = POSITIONS[active_idx]
    step = weight_step(eps0, scale, q)

    grid = tile_blocks(img)
    y = dct2_forward(grid.blocks).reshape(-1, NF)
    dc = y[:, 0]
    dc_lo, dc_hi = _f32(dc.min()), _f32(dc.max())
    if dc_hi < dc.max():
        dc_hi = float(np.nextafter(np.float32(dc_hi), np.float32(np.inf)))
    dstep = _dc_step(dc_lo, dc_hi)
    dc_sym = (np.zeros(dc.size, dtype=np.int64) if dstep == 0 else
              np.clip(np.rint((dc - dc_lo) / dstep), 0, DC_LEVELS - 1).astype(np.int64))

    domain = normalize_forward(y, p) if method == MethodId.NL_SVR else y
    blocks, models = [], []
    for k in range(len(domain)):
        target = domain[k, active_idx]
        try:
            model = fit_svr(TrainingSet(inputs, np.abs(target), eps_active), sigma, C,
                            max_sweeps=max_sweeps)
        except NoConvergence as exc:
            bx, by = k % grid.cols, k // grid.cols
            raise NoConvergence(f"block ({bx}, {by}): {exc}", exc.violation, (bx, by)) from exc
        models.append(model)
        positions = active_idx[model.support_index]
        idx = quantize_step(model.weights, step)
        keep = idx != 0
        order = np.argsort(positions[keep])
        rec = BlockRecord(int(dc_sym[k]), positions[keep][order], idx[keep][order],
                          np.zeros(0, dtype=np.int64))
        mags = _magnitudes(rec, step, sigma, active_idx)
        rec.signs = (target[_signed_mask(mags)] < 0).astype(np.int64)
        blocks.append(rec)
    return Bitstream(method, img.width, img.height, eps0, scale, sigma, q.bits,
                     p.digest(), (dc_lo, dc_hi), blocks, models)


# --- decoder ---------------------------------------------------------------

def reconstruct_coefficients(bs: Bitstream, p: NormParams) -> np.ndarray:
    """(n_blocks, 256) coefficients in the fitting domain, DC slot holding y_DC."""
    step = weight_step(bs.eps0, bs.scale, bs.quantizer)
    active_idx = np.flatnonzero(active_mask(bs.method, p.view).ravel())
    dc_lo, dc_hi = bs.dc_range
    dstep = _dc_step(dc_lo, dc_hi)
    pending = bs.sign_stream
    si = 0
    out = np.zeros((len(bs.blocks), NF))
    for k, rec in enumerate(bs.blocks):
        mags = _magnitudes(rec, step, bs.sigma, active_idx)
        signed = _signed_mask(mags)
        n = int(signed.sum())
        if pending is not None:
            if si + n > pending.size:
                raise CorruptPayload("sign stream exhausted")
            signs = pending[si:si + n]
            si += n
        else:
            signs = rec.signs
            if signs.size != n:
                raise CorruptPayload("sign count disagrees with model")
        vals = np.zeros(active_idx.size)
        vals[signed] = np.where(signs == 1, -mags[signed], mags[signed])
        out[k, active_idx] = vals
        out[k, 0] = dc_lo + rec.dc * dstep
    if pending is not None and si != pending.size:
        raise CorruptPayload("trailing sign symbols")
    return out


def decode_image(stream, p: NormParams | None = None) -> GrayImage:
    if p is None:
        p = NormParams.default()
    bs = Bitstream.from_bytes(stream) if isinstance(stream, (bytes, bytearray)) else stream
    if bs.digest != p.digest():
        raise ParamDigestMismatch("stream was encoded with different model parameters")
    coeffs = reconstruct_coefficients(bs, p)
    if bs.method == MethodId.NL_SVR:
        coeffs = _invert_responses(coeffs, p)
    blocks = dct2_inverse(coeffs.reshape(-1, N, N))
    cols, rows = -(-bs.width // BLOCK), -(-bs.height // BLOCK)
    return assemble_blocks(BlockGrid(cols, rows, bs.width, bs.height,
                                     np.clip(blocks, 0.0, 1.0)))


def _invert_responses(coeffs, p: NormParams) -> np.ndarray:
    dc_mask = np.zeros(NF, dtype=bool)
    dc_mask[0] = True
    try:
        return normalize_inverse_fixed(coeffs, p, dc_mask, coeffs)
    except SingularSystem:
        pass
    # block-wise fallback: shrink out-of-range responses until solvable
    out = np.empty_like(coeffs)
    for k in range(len(coeffs)):
        r = coeffs[k].copy()
        for _ in range(60):
            try:
                out[k] = normalize_inverse_fixed(r, p, dc_mask, coeffs[k])
                break
            except SingularSystem:
                r[1:] *= 0.9
        else:
            raise SingularSystem(f"block {k}: responses cannot be inverted")
    return out
