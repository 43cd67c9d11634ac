"""Fitting one block with epsilon-insensitive SVR.

The codec describes a block's coefficient magnitudes by the few samples (support
vectors) an RBF model needs to stay within a tolerance tube of width eps.

Run from the repository root: ``python3 demos/03_svr_fit.py``
"""
# %%
import numpy as np

from svrcodec import TrainingSet, dct2_forward, fit_svr, predict_svr, read_pgm
from svrcodec.codec import POSITIONS
from svrcodec.pixio import tile_blocks

img = read_pgm("tests/data/camera.pgm")
blocks = dct2_forward(tile_blocks(img).blocks).reshape(-1, 256)
k = int(np.argmax(blocks[:, 1:].std(axis=1)))
target = np.abs(blocks[k, 1:])
x = POSITIONS[1:]
print(f"block {k}: 255 AC magnitudes, largest {target.max():.2f}")

# %% A wider tube needs fewer support vectors; every residual stays inside it.
for eps in (0.02, 0.05, 0.1, 0.2, 0.4):
    m = fit_svr(TrainingSet(x, target, eps), sigma=0.03)
    resid = np.abs(predict_svr(m, x) - target)
    print(f"eps {eps:5}: {m.n_support:3d} support vectors, max residual {resid.max():.3f}, "
          f"{m.sweeps} sweeps")

# %% The solver maximises the dual objective; it never goes down.
m = fit_svr(TrainingSet(x, target, 0.05), sigma=0.03)
print("objective, first sweeps:", np.round(m.objective[:6], 2))
print("non-decreasing:", bool(np.all(np.diff(m.objective) >= -1e-9)))

# %% Kernel width trades locality against smoothness.
for sigma in (0.02, 0.03, 0.05, 0.08):
    m = fit_svr(TrainingSet(x, target, 0.05), sigma=sigma, raise_on_failure=False)
    print(f"sigma {sigma}: {m.n_support:3d} support vectors, KKT violation {m.violation:.1e}")
