"""Encode and decode one image with each method and compare at similar rates.

Run from the repository root: ``python3 demos/04_codec_round_trip.py``
"""
# %%
from pathlib import Path

from svrcodec import NormParams, decode_image, encode_image, jpeg_baseline, read_pgm, write_pgm
from svrcodec.metrics import mpe, rmse, ssim

img = read_pgm("tests/data/camera.pgm")
out = Path("demo_output")
out.mkdir(exist_ok=True)
n = img.width * img.height
p = NormParams.default()

# %% The three SVR variants differ only in the domain and the tolerance profile.
for method, eps0, scale in [("rki1", 0.02, 2.0), ("csf-svr", 0.02, 2.0), ("nl-svr", 0.03, 1.0)]:
    bs = encode_image(img, method, eps0, scale, sigma=0.03)
    data = bs.to_bytes()
    dec = decode_image(data)
    write_pgm(out / f"camera_{method}.pgm", dec)
    print(f"{method:8s} {8 * len(data) / n:.3f} bpp  {bs.n_support:6d} SVs  "
          f"RMSE {rmse(img, dec):5.2f}  SSIM {ssim(img, dec):.4f}  MPE {mpe(img, dec, p):.4f}")

# %% The JPEG-style reference at a comparable rate.
nbytes, dec = jpeg_baseline(img, 17)
write_pgm(out / "camera_jpeg.pgm", dec)
print(f"{'jpeg':8s} {8 * nbytes / n:.3f} bpp  {'':10s}  "
      f"RMSE {rmse(img, dec):5.2f}  SSIM {ssim(img, dec):.4f}  MPE {mpe(img, dec, p):.4f}")
print("decoded images written to", out)
