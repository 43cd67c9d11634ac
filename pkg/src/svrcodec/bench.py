"""Rate-distortion sweeps over an image corpus, averaged curves and
support-vector dumps.

For every (image, method, scale) the sweep encodes with each (eps0, sigma)
pair of the grids, decodes, scores, and keeps the best-scoring point. JPEG
rows use a quality ladder instead: ``scale`` holds the quality and ``eps0``
and ``sigma`` are zero.
"""
from __future__ import annotations

import csv
import math
import time
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from .codec import MethodId, decode_image, encode_image, weight_step
from .errors import NoConvergence, RaggedData
from .jpeg import jpeg_baseline
from .metrics import mpe, rmse, ssim
from .perceptual import NormParams, load_params
from .pixio import GrayImage, read_pgm
from .quantize import DEFAULT_BITS, QuantizerSpec, dequantize_step
from .transform import N

SVR_METHODS = (MethodId.RKI1, MethodId.CSF_SVR, MethodId.NL_SVR)
# base insensitivity per method; with the default ladder the rates span
# roughly 0.6 down to 0.1 bpp on natural images (NL-SVR rate falls more slowly)
DEFAULT_EPS0 = {MethodId.RKI1: 0.02, MethodId.CSF_SVR: 0.02, MethodId.NL_SVR: 0.03}
DEFAULT_SCALES = tuple(2.0 ** (k / 2) for k in range(8))
DEFAULT_SIGMAS = (0.02, 0.03, 0.05)
DEFAULT_QUALITIES = (1, 5, 8, 12, 17, 25, 35, 50)


@dataclass(frozen=True)
class SweepConfig:
    images: tuple
    methods: tuple = SVR_METHODS + (MethodId.JPEG_BASELINE,)
    scales: tuple = DEFAULT_SCALES
    sigmas: tuple = DEFAULT_SIGMAS
    # None: the single per-method value of DEFAULT_EPS0
    eps0: tuple | None = None
    bits: int = DEFAULT_BITS
    params: str | None = None
    out: str | None = None
    qualities: tuple = DEFAULT_QUALITIES
    select_by: str = "ssim"
    full_grid_dump: str | None = None
    max_sweeps: int = 2000

    def __post_init__(self):
        if not self.images or not self.methods or not self.scales:
            raise ValueError("sweep needs images, methods and scales")
        object.__setattr__(self, "methods", tuple(MethodId.parse(m) for m in self.methods))
        if any(s <= 0 for s in self.scales) or any(s <= 0 for s in self.sigmas):
            raise ValueError("scales and sigmas must be positive")
        if self.select_by not in ("ssim", "rmse", "mpe"):
            raise ValueError("select_by must be ssim, rmse or mpe")
        QuantizerSpec(self.bits)

    def eps0_grid(self, method) -> tuple:
        if self.eps0 is not None:
            return tuple(self.eps0)
        return (DEFAULT_EPS0[MethodId.parse(method)],)

    def norm_params(self) -> NormParams:
        return load_params(self.params)


@dataclass
class RdRow:
    image: str
    method: str
    eps0: float
    scale: float
    sigma: float
    bpp: float
    rmse: float
    mpe: float
    ssim: float
    n_support: int
    encode_ms: float


@dataclass
class GridPoint(RdRow):
    status: str = "ok"
    selected: bool = False


def _score(row: RdRow, key: str) -> float:
    # larger is better
    return row.ssim if key == "ssim" else -getattr(row, key)


def _image_id(path) -> str:
    return Path(path).stem


def evaluate_point(img: GrayImage, image_id: str, method, eps0, scale, sigma,
                   p: NormParams, bits: int = DEFAULT_BITS,
                   max_sweeps: int = 2000) -> RdRow:
    """Encode, decode and score one grid point; rate from actual bytes."""
    method = MethodId.parse(method)
    t0 = time.perf_counter()
    if method == MethodId.JPEG_BASELINE:
        nbytes, dec = jpeg_baseline(img, int(scale))
        n_sv = 0
        ms = (time.perf_counter() - t0) * 1e3
    else:
        bs = encode_image(img, method, eps0, scale, sigma, QuantizerSpec(bits), p,
                          max_sweeps=max_sweeps)
        data = bs.to_bytes()
        ms = (time.perf_counter() - t0) * 1e3
        nbytes, n_sv = len(data), bs.n_support
        dec = decode_image(data, p)
    bpp = 8.0 * nbytes / (img.width * img.height)
    return RdRow(image_id, method.label, float(eps0), float(scale), float(sigma), bpp,
                 rmse(img, dec), mpe(img, dec, p), ssim(img, dec), n_sv, ms)


def _grid(cfg: SweepConfig, method):
    if method == MethodId.JPEG_BASELINE:
        return [(0.0, float(q), 0.0) for q in cfg.qualities]
    return [(e, s, sg) for s in cfg.scales for e in cfg.eps0_grid(method) for sg in cfg.sigmas]


def run_sweep(cfg: SweepConfig, progress=None) -> list:
    """Selected rows in (image, method, scale) order; also written to ``cfg.out``."""
    p = cfg.norm_params()
    selected, grid_rows = [], []
    for path in cfg.images:
        try:
            img = read_pgm(path)
        except OSError as exc:
            raise OSError(f"{path}: {exc}") from exc
        image_id = _image_id(path)
        for method in cfg.methods:
            by_scale = {}
            for eps0, scale, sigma in _grid(cfg, method):
                try:
                    row = evaluate_point(img, image_id, method, eps0, scale, sigma, p,
                                         cfg.bits, cfg.max_sweeps)
                    point = GridPoint(**asdict(row))
                except NoConvergence:
                    nan = float("nan")
                    point = GridPoint(image_id, method.label, eps0, scale, sigma, nan, nan,
                                      nan, nan, 0, nan, status="infeasible")
                grid_rows.append(point)
                by_scale.setdefault(scale, []).append(point)
                if progress is not None:
                    progress(point)
            for scale, points in by_scale.items():
                ok = [pt for pt in points if pt.status == "ok"]
                if not ok:
                    raise NoConvergence(f"{image_id} {method.label} scale {scale:g}: "
                                        "no grid point converged")
                best = max(ok, key=lambda pt: _score(pt, cfg.select_by))
                best.selected = True
                selected.append(RdRow(**{f.name: getattr(best, f.name) for f in fields(RdRow)}))
    if cfg.out:
        write_rows(cfg.out, selected)
    if cfg.full_grid_dump:
        write_rows(cfg.full_grid_dump, grid_rows)
    return selected


def write_rows(path, rows) -> None:
    rows = list(rows)
    cls = type(rows[0]) if rows else RdRow
    names = [f.name for f in fields(cls)]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(names)
        for r in rows:
            w.writerow([_fmt(getattr(r, n)) for n in names])


def read_rows(path) -> list:
    out = []
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            out.append(RdRow(rec["image"], rec["method"], *(float(rec[k]) for k in
                             ("eps0", "scale", "sigma", "bpp", "rmse", "mpe", "ssim")),
                             int(rec["n_support"]), float(rec["encode_ms"])))
    return out


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


@dataclass
class CurvePoint:
    method: str
    scale: float
    bpp: float
    rmse: float
    mpe: float
    ssim: float
    n_images: int


def average_curves(rows, out=None) -> dict:
    """Per-method mean over images at each ladder point, ordered by scale.

    Raises :class:`RaggedData` unless every image of a method covers the same
    ladder exactly once.
    """
    groups: dict = {}
    for r in rows:
        groups.setdefault(r.method, {}).setdefault(r.scale, []).append(r)
    curves = {}
    for method, ladder in groups.items():
        images = None
        for scale, rs in ladder.items():
            ids = sorted(r.image for r in rs)
            if len(set(ids)) != len(ids):
                raise RaggedData(f"{method} scale {scale:g}: duplicate image rows")
            if images is None:
                images = ids
            elif ids != images:
                raise RaggedData(f"{method} scale {scale:g}: image set differs across ladder")
        curves[method] = [
            CurvePoint(method, scale, *(float(np.mean([getattr(r, k) for r in rs]))
                                        for k in ("bpp", "rmse", "mpe", "ssim")), len(rs))
            for scale, rs in sorted(ladder.items())]
    if out:
        write_rows(out, [pt for c in curves.values() for pt in c])
    return curves


def value_at_rate(curve, bpp: float, metric: str) -> float:
    """Linear interpolation of ``metric`` along a curve at the given rate.

    Returns NaN outside the curve's rate span.
    """
    pts = sorted(curve, key=lambda c: c.bpp)
    x = np.array([c.bpp for c in pts])
    if not x[0] <= bpp <= x[-1]:
        return math.nan
    return float(np.interp(bpp, x, [getattr(c, metric) for c in pts]))


@dataclass
class SvRecord:
    bx: int
    by: int
    i: int
    j: int
    weight: float


def dump_support_vectors(img: GrayImage, method, scale: float, cfg: SweepConfig,
                         sigma: float | None = None, eps0: float | None = None,
                         out=None) -> list:
    """Every transmitted support vector with its dequantized weight.

    Without an explicit sigma/eps0 the grid point is chosen the way the sweep
    chooses it.
    """
    method = MethodId.parse(method)
    if method == MethodId.JPEG_BASELINE:
        raise ValueError("the JPEG baseline has no support vectors")
    p = cfg.norm_params()
    if sigma is None or eps0 is None:
        cands = [(e, sg) for e in ((eps0,) if eps0 is not None else cfg.eps0_grid(method))
                 for sg in ((sigma,) if sigma is not None else cfg.sigmas)]
        best, best_score = None, -math.inf
        for e, sg in cands:
            try:
                row = evaluate_point(img, "", method, e, scale, sg, p, cfg.bits, cfg.max_sweeps)
            except NoConvergence:
                continue
            if _score(row, cfg.select_by) > best_score:
                best, best_score = (e, sg), _score(row, cfg.select_by)
        if best is None:
            raise NoConvergence("no grid point converged")
        eps0, sigma = best
    bs = encode_image(img, method, eps0, scale, sigma, QuantizerSpec(cfg.bits), p,
                      max_sweeps=cfg.max_sweeps)
    step = weight_step(bs.eps0, bs.scale, bs.quantizer)
    cols = -(-img.width // N)
    recs = []
    for k, b in enumerate(bs.blocks):
        for pos, w in zip(b.positions, dequantize_step(b.weights, step)):
            recs.append(SvRecord(k % cols, k // cols, int(pos) // N, int(pos) % N, float(w)))
    if out:
        with open(out, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["bx", "by", "i", "j", "weight"])
            for r in recs:
                wr.writerow([r.bx, r.by, r.i, r.j, repr(r.weight)])
    return recs
