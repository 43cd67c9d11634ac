"""A small rate-distortion sweep and a support-vector dump.

The full benchmark runs the same code over a whole corpus
(``svrcodec sweep tests/data/*.pgm --csv rows.csv --out curves.csv``); this
demo keeps to two images and three rates so it finishes in about a minute.

Run from the repository root: ``python3 demos/05_rate_distortion.py``
"""
# %%
from collections import Counter
from pathlib import Path

from svrcodec import read_pgm
from svrcodec.bench import SweepConfig, average_curves, dump_support_vectors, run_sweep

out = Path("demo_output")
out.mkdir(exist_ok=True)
cfg = SweepConfig(images=("tests/data/camera.pgm", "tests/data/coffee.pgm"),
                  scales=(1.0, 2.0, 4.0), out=str(out / "rows.csv"),
                  full_grid_dump=str(out / "grid.csv"))
rows = run_sweep(cfg, progress=lambda pt: print(".", end="", flush=True))
print()

# %% Averaged curves; for JPEG the "scale" column is the quality setting.
curves = average_curves(rows, out / "curves.csv")
for method, curve in curves.items():
    print(method)
    for pt in curve:
        print(f"   scale {pt.scale:5g}: {pt.bpp:.3f} bpp  SSIM {pt.ssim:.4f}  MPE {pt.mpe:.4f}")

# %% Where do the support vectors go? Count them by frequency ring on a texture.
img = read_pgm("tests/data/grass.pgm")
for method in ("csf-svr", "nl-svr"):
    recs = dump_support_vectors(img, method, 2.0, cfg, sigma=0.03,
                                out=out / f"sv_{method}.csv")
    rings = Counter(min((r.i + r.j) // 4, 7) for r in recs)
    print(method, len(recs), "SVs; by ring i+j in steps of 4:",
          [rings.get(k, 0) for k in range(8)])
