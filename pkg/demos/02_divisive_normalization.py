"""Divisive normalization: responses, exact inversion, and a non-diagonal Jacobian.

Run from the repository root: ``python3 demos/02_divisive_normalization.py``
"""
# %%
import numpy as np

from svrcodec import (NormParams, diagonality_ratio, dct2_forward, normalize_forward,
                      normalize_inverse, normalize_jacobian, read_pgm)
from svrcodec.pixio import tile_blocks

p = NormParams.default()
print(p)

# %% Each response is a coefficient's energy divided by a weighted sum of its
# neighbours' energies. The map is invertible by one linear solve.
img = read_pgm("tests/data/grass.pgm")
y = dct2_forward(tile_blocks(img).blocks).reshape(-1, 256)
r = normalize_forward(y, p)
back = normalize_inverse(r, p)
print("responses span %.3g .. %.3g" % (r.min(), r.max()))
print("worst relative inversion error:",
      (np.linalg.norm(back - y, axis=1) / np.linalg.norm(y, axis=1)).max())

# %% Masking: the same coefficient responds less when its neighbours are busy.
quiet = np.zeros(256)
quiet[17] = 0.5
busy = np.full(256, 0.5)
print("response of coefficient 17 alone: %.4f, among active neighbours: %.4f"
      % (normalize_forward(quiet, p)[17], normalize_forward(busy, p)[17]))

# %% The Jacobian dr/dy is not diagonal: a scalar tolerance on y does not
# translate into a scalar tolerance on r.
ratios = np.array([diagonality_ratio(normalize_jacobian(b, p)) for b in y])
print("off-diagonal share of |J| on grass: min %.3f, median %.3f, max %.3f"
      % (ratios.min(), np.median(ratios), ratios.max()))
ident = p.with_interaction(np.eye(256))
print("with no interactions:", diagonality_ratio(normalize_jacobian(y[0], ident)))

# %% Flat image regions are the exception: with almost no energy around, the
# interaction terms vanish and J is nearly diagonal.
cam = dct2_forward(tile_blocks(read_pgm("tests/data/camera.pgm")).blocks).reshape(-1, 256)
cam_ratios = [diagonality_ratio(normalize_jacobian(b, p)) for b in cam]
print("camera: min %.1e, median %.3f" % (min(cam_ratios), np.median(cam_ratios)))
