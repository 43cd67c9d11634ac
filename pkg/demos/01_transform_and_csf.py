"""The linear stage: 16x16 block DCT and the CSF weighting of its coefficients.

Run from the repository root: ``python3 demos/01_transform_and_csf.py``
"""
# %%
import numpy as np

from svrcodec import csf_weights, dct2_forward, dct2_inverse, frequency_grid, read_pgm
from svrcodec.pixio import tile_blocks

img = read_pgm("tests/data/camera.pgm")
blocks = tile_blocks(img).blocks
print(f"{img.width}x{img.height} image -> {len(blocks)} blocks of 16x16")

# %% The transform is orthonormal: energy is preserved and the inverse is exact.
y = dct2_forward(blocks)
print("max round-trip error:", np.abs(dct2_inverse(y) - blocks).max())
print("energy ratio:", (y ** 2).sum() / (blocks ** 2).sum())

# %% Most of a natural image's energy sits in a handful of low frequencies.
energy = (y ** 2).mean(axis=0)
energy[0, 0] = 0
share = np.sort(energy.ravel())[::-1].cumsum() / energy.sum()
print("AC coefficients holding 90% of AC energy:", int(np.searchsorted(share, 0.9)) + 1, "of 255")

# %% Each coefficient maps to a spatial frequency in cycles per degree.
f = frequency_grid()
alpha = csf_weights()
print("frequency range (cpd): %.2f .. %.2f" % (f[0, 1], f.max()))
for i, j in [(0, 1), (1, 1), (2, 3), (5, 5), (10, 10), (15, 15)]:
    print(f"  coefficient ({i:2d},{j:2d}): {f[i, j]:6.2f} cpd, CSF weight {alpha[i, j]:.3f}")

# %% The CSF profile, as a coarse text plot along the diagonal.
for k in range(1, 16, 2):
    print(f"{f[k, k]:6.2f} cpd " + "#" * int(round(40 * alpha[k, k])))
