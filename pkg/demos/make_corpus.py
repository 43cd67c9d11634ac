"""Build the 256x256 PGM test corpus from images bundled with scikit-image.

The eight images named in the original experiments (Lena, Barbara, ...) are
not redistributable here, so the corpus uses the closest bundled stand-ins:
``camera`` is the classic cameraman and the next five are natural photographs.
``grass`` is a dense texture, used where a block full of detail is needed
(non-diagonal Jacobians everywhere, support-vector distribution on texture).

Run from the repository root::

    python demos/make_corpus.py tests/data
"""
import sys
from pathlib import Path

import numpy as np
from skimage import color, data, transform

from svrcodec.pixio import GrayImage, write_pgm

SOURCES = {
    "camera": data.camera,
    "astronaut": data.astronaut,
    "coffee": data.coffee,
    "chelsea": data.chelsea,
    "rocket": data.rocket,
    "brick": data.brick,
    "grass": data.grass,
}


def to_corpus_image(raw):
    img = np.asarray(raw)
    if img.ndim == 3:
        img = color.rgb2gray(img[..., :3]) * 255.0
    img = img.astype(np.float64)
    h, w = img.shape
    side = min(h, w)
    top, left = (h - side) // 2, (w - side) // 2
    img = img[top:top + side, left:left + side]
    img = transform.resize(img, (256, 256), anti_aliasing=True, preserve_range=True)
    return GrayImage.from_array(np.clip(np.rint(img), 0, 255).astype(np.uint8))


def main(out_dir):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, loader in SOURCES.items():
        write_pgm(out / f"{name}.pgm", to_corpus_image(loader()))
        print("wrote", out / f"{name}.pgm")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tests/data")
