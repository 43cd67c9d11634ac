"""Command line front end: ``svrcodec {encode,decode,metrics,sweep,dump-sv}``."""
from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from . import bench
from .codec import MAGIC, MethodId, decode_image, encode_image
from .errors import CodecError
from .jpeg import MAGIC as JPEG_MAGIC, jpeg_decode, jpeg_encode
from .metrics import quality_report
from .perceptual import load_params
from .pixio import read_pgm, write_pgm
from .quantize import DEFAULT_BITS, QuantizerSpec

DEFAULT_SIGMA = 0.03


def _method(text):
    try:
        return MethodId.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _common(sp, method=True):
    if method:
        sp.add_argument("--method", type=_method, default=MethodId.NL_SVR,
                        help="rki1 | csf-svr | nl-svr | jpeg (default nl-svr)")
    sp.add_argument("--params", help="perceptual model parameter file")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="svrcodec", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("encode", help="compress a PGM image")
    sp.add_argument("input")
    _common(sp)
    sp.add_argument("--eps0", type=float, help="base insensitivity (method default)")
    sp.add_argument("--scale", type=float, default=1.0,
                    help="rate-control factor; JPEG quality for --method jpeg")
    sp.add_argument("--sigma", type=float, default=DEFAULT_SIGMA)
    sp.add_argument("--bits", type=int, default=DEFAULT_BITS)
    sp.add_argument("--out", required=True)

    sp = sub.add_parser("decode", help="decompress to PGM")
    sp.add_argument("input")
    _common(sp, method=False)
    sp.add_argument("--out", required=True)

    sp = sub.add_parser("metrics", help="RMSE, MPE and SSIM of a test image")
    sp.add_argument("reference")
    sp.add_argument("test")
    _common(sp, method=False)
    sp.add_argument("--stream", help="coded file, to report bpp")
    sp.add_argument("--csv", help="also write the report as CSV")

    sp = sub.add_parser("sweep", help="rate-distortion sweep over images")
    sp.add_argument("images", nargs="+")
    sp.add_argument("--method", type=_method, action="append",
                    help="repeatable; default all four")
    sp.add_argument("--params")
    sp.add_argument("--eps0", type=float, action="append", help="repeatable eps0 grid")
    sp.add_argument("--scale", type=float, action="append", help="repeatable scale ladder")
    sp.add_argument("--sigma", type=float, action="append", help="repeatable sigma grid")
    sp.add_argument("--bits", type=int, default=DEFAULT_BITS)
    sp.add_argument("--select-by", choices=("ssim", "rmse", "mpe"), default="ssim")
    sp.add_argument("--csv", required=True, help="selected rows")
    sp.add_argument("--out", help="averaged curves")
    sp.add_argument("--full-grid-dump", help="every grid point, selected or not")

    sp = sub.add_parser("dump-sv", help="support vectors of every block")
    sp.add_argument("input")
    _common(sp)
    sp.add_argument("--eps0", type=float)
    sp.add_argument("--scale", type=float, default=1.0)
    sp.add_argument("--sigma", type=float, help="default: chosen by the sweep rule")
    sp.add_argument("--bits", type=int, default=DEFAULT_BITS)
    sp.add_argument("--csv", "--out", dest="csv", required=True)
    return ap


def _encode(a):
    img = read_pgm(a.input)
    if a.method == MethodId.JPEG_BASELINE:
        data = jpeg_encode(img, int(a.scale))
    else:
        eps0 = a.eps0 if a.eps0 is not None else bench.DEFAULT_EPS0[a.method]
        bs = encode_image(img, a.method, eps0, a.scale, a.sigma, QuantizerSpec(a.bits),
                          load_params(a.params))
        data = bs.to_bytes()
    Path(a.out).write_bytes(data)
    print(f"{len(data)} bytes, {8 * len(data) / (img.width * img.height):.4f} bpp")


def _decode_bytes(data: bytes, params):
    if data[:4] == JPEG_MAGIC:
        return jpeg_decode(data)
    if data[:4] == MAGIC:
        return decode_image(data, load_params(params))
    raise CodecError("unrecognized stream (expected SVRC or JPGL magic)")


def _decode(a):
    write_pgm(a.out, _decode_bytes(Path(a.input).read_bytes(), a.params))


def _metrics(a):
    ref, test = read_pgm(a.reference), read_pgm(a.test)
    bpp = float("nan")
    if a.stream:
        bpp = 8 * Path(a.stream).stat().st_size / (ref.width * ref.height)
    rep = quality_report(ref, test, load_params(a.params), bpp)
    print(f"rmse {rep.rmse:.4f}  mpe {rep.mpe:.6f}  ssim {rep.ssim:.6f}  bpp {rep.bpp:.4f}")
    if a.csv:
        with open(a.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["rmse", "mpe", "ssim", "bpp"])
            w.writerow([repr(rep.rmse), repr(rep.mpe), repr(rep.ssim), repr(rep.bpp)])


def _sweep(a):
    kw = dict(images=tuple(a.images), bits=a.bits, params=a.params, out=a.csv,
              select_by=a.select_by, full_grid_dump=a.full_grid_dump)
    if a.method:
        kw["methods"] = tuple(a.method)
    if a.scale:
        kw["scales"] = tuple(a.scale)
    if a.sigma:
        kw["sigmas"] = tuple(a.sigma)
    if a.eps0:
        kw["eps0"] = tuple(a.eps0)
    rows = bench.run_sweep(bench.SweepConfig(**kw))
    bench.average_curves(rows, a.out)
    print(f"{len(rows)} rows -> {a.csv}")


def _dump_sv(a):
    cfg = bench.SweepConfig(images=(a.input,), methods=(a.method,), bits=a.bits,
                            params=a.params)
    recs = bench.dump_support_vectors(read_pgm(a.input), a.method, a.scale, cfg,
                                      sigma=a.sigma, eps0=a.eps0, out=a.csv)
    print(f"{len(recs)} support vectors -> {a.csv}")


_COMMANDS = {"encode": _encode, "decode": _decode, "metrics": _metrics,
             "sweep": _sweep, "dump-sv": _dump_sv}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _COMMANDS[args.command](args)
    except (CodecError, OSError, ValueError) as exc:
        print(f"svrcodec {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
