#!/usr/bin/env python3
"""Regenerate the committed test images under assets/.

The classic despeckling benchmark photos (Peppers, Parrots, Baboon, Caps) are
not redistributable, so the suite ships CC0 stand-ins with similar size and
texture balance, named for the role they play:

  peppers_gray.pgm   smooth regions + strong edges   (from skimage "coffee")
  parrots_gray.pgm   organic detail + flat background (from skimage "astronaut")
  baboon_color.ppm   heavy fine texture               (from skimage "chelsea")
  caps_color.ppm     smooth saturated color regions   (from skimage "coffee")
  sar_image1.pgm     synthetic single-look amplitude scene, SI ~ 1.02
  ultrasound_image2.pgm  synthetic phantom with correlated speckle, SI ~ 0.92

Run from the repository root: python3 scripts/make_test_images.py
Deterministic: fixed seeds, no downloads (all source images ship with skimage).
"""

import numpy as np
from pathlib import Path

import skimage.data as data
from skimage.transform import resize
from scipy.ndimage import gaussian_filter

OUT = Path(__file__).resolve().parent.parent / "assets"
SIZE = 256


def write_pgm(path, img):
    img = np.clip(np.rint(img), 0, 255).astype(np.uint8)
    with open(path, "wb") as f:
        f.write(b"P5\n%d %d\n255\n" % (img.shape[1], img.shape[0]))
        f.write(img.tobytes())
    print(f"{path.name}: {img.shape[1]}x{img.shape[0]} min={img.min()} max={img.max()}")


def write_ppm(path, img):
    img = np.clip(np.rint(img), 0, 255).astype(np.uint8)
    with open(path, "wb") as f:
        f.write(b"P6\n%d %d\n255\n" % (img.shape[1], img.shape[0]))
        f.write(img.tobytes())
    print(f"{path.name}: {img.shape[1]}x{img.shape[0]} min={img.min()} max={img.max()}")


def center_square(img):
    h, w = img.shape[:2]
    s = min(h, w)
    r0, c0 = (h - s) // 2, (w - s) // 2
    return img[r0:r0 + s, c0:c0 + s]


def to_256(img):
    return resize(center_square(img).astype(np.float64), (SIZE, SIZE) + img.shape[2:],
                  anti_aliasing=True, mode="reflect") * (255.0 if img.dtype == np.uint8 else 1.0)


def stretch(img, lo=10.0, hi=250.0):
    a, b = img.min(), img.max()
    return lo + (img - a) * (hi - lo) / (b - a)


def gray(img):
    return img @ np.array([0.299, 0.587, 0.114])


def speckle(shape, looks, rng):
    return rng.gamma(shape=looks, scale=1.0 / looks, size=shape)


def si(img):
    return img.std() / img.mean()


def main():
    OUT.mkdir(exist_ok=True)

    coffee = to_256(data.coffee())
    astro = to_256(data.astronaut())
    chelsea = to_256(data.chelsea())

    write_pgm(OUT / "peppers_gray.pgm", stretch(gray(coffee)))
    write_pgm(OUT / "parrots_gray.pgm", stretch(gray(astro)))
    write_ppm(OUT / "baboon_color.ppm", stretch(chelsea))
    write_ppm(OUT / "caps_color.ppm", stretch(coffee))

    # SAR stand-in: gently varying terrain times single-look speckle.
    # Constants tuned so the quantized file measures SI ~ 1.0 (clipping included).
    rng = np.random.default_rng(20240501)
    terrain = gaussian_filter(rng.standard_normal((SIZE, SIZE)), 12.0)
    terrain = 1.0 + 0.14 * terrain / terrain.std()
    scene = 40.0 * np.clip(terrain, 0.2, None)
    sar = np.clip(scene * speckle(scene.shape, 1, np.random.default_rng(99)), 0, 255)
    write_pgm(OUT / "sar_image1.pgm", sar)
    print(f"  sar file SI={si(np.rint(np.clip(sar, 0, 255))):.4f}")

    # Ultrasound stand-in: bright tissue with dark inclusions, correlated speckle.
    # Quantized file measures SI ~ 0.92.
    yy, xx = np.mgrid[0:SIZE, 0:SIZE]
    phantom = np.full((SIZE, SIZE), 1.0)
    for (cy, cx, r, v) in [(70, 80, 34, 0.35), (170, 160, 46, 0.5), (110, 200, 22, 0.25)]:
        phantom[(yy - cy) ** 2 + (xx - cx) ** 2 < r * r] = v
    phantom = gaussian_filter(phantom, 2.0) * 80.0
    noise = gaussian_filter(speckle(phantom.shape, 1, np.random.default_rng(7)) - 1.0, 0.6)
    noise = 1.0 + noise / noise.std()
    us = np.clip(phantom * np.clip(noise, 0.05, None), 0, 255)
    write_pgm(OUT / "ultrasound_image2.pgm", us)
    print(f"  ultrasound file SI={si(np.rint(np.clip(us, 0, 255))):.4f}")


if __name__ == "__main__":
    main()
