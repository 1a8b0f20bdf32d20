"""Synthetic rasters with exact ground truth, for tests and demo corpora."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .grid import BinaryMask, GrayImage, SeedSet, seed_set
from .imgio import save_mask, save_gray_image, save_seeds

_FG_LEVEL = 200
_BG_LEVEL = 20


def _render(mask: np.ndarray, fg: int, bg: int) -> GrayImage:
    return GrayImage(np.where(mask, fg, bg).astype(np.uint8))


def disc_phantom(size: int = 64, center: tuple[int, int] | None = None,
                 radius: int = 20, fg: int = _FG_LEVEL, bg: int = _BG_LEVEL
                 ) -> tuple[GrayImage, BinaryMask]:
    cx, cy = center if center else (size // 2, size // 2)
    yy, xx = np.mgrid[0:size, 0:size]
    mask = (xx - cx) ** 2 + (yy - cy) ** 2 <= radius * radius
    return _render(mask, fg, bg), BinaryMask(mask)


def ellipse_phantom(size: int = 64, center: tuple[int, int] | None = None,
                    semi_x: int = 24, semi_y: int = 13,
                    fg: int = _FG_LEVEL, bg: int = _BG_LEVEL
                    ) -> tuple[GrayImage, BinaryMask]:
    cx, cy = center if center else (size // 2, size // 2)
    yy, xx = np.mgrid[0:size, 0:size]
    mask = ((xx - cx) / semi_x) ** 2 + ((yy - cy) / semi_y) ** 2 <= 1.0
    return _render(mask, fg, bg), BinaryMask(mask)


def star_phantom(size: int = 64, center: tuple[int, int] | None = None,
                 r_body: float = 14.0, r_arm: float = 7.0, arms: int = 5,
                 fg: int = _FG_LEVEL, bg: int = _BG_LEVEL
                 ) -> tuple[GrayImage, BinaryMask]:
    """Spiculated blob: radius r_body + r_arm * cos(arms * angle)."""
    cx, cy = center if center else (size // 2, size // 2)
    yy, xx = np.mgrid[0:size, 0:size]
    dx = xx - cx
    dy = yy - cy
    rim = r_body + r_arm * np.cos(arms * np.arctan2(dy, dx))
    mask = np.sqrt(dx * dx + dy * dy) <= rim
    return _render(mask, fg, bg), BinaryMask(mask)


def add_noise(img: GrayImage, sigma: float, seed: int = 0) -> GrayImage:
    """Additive Gaussian noise, rounded and clipped back to 8 bits."""
    rng = np.random.default_rng(seed)
    noisy = img.pixels.astype(np.float64) + rng.normal(0.0, sigma, img.shape)
    return GrayImage(np.clip(np.rint(noisy), 0, 255).astype(np.uint8))


def _ring(center: tuple[int, int], radius: float, count: int,
          phase: float = 0.0) -> list[tuple[int, int]]:
    cx, cy = center
    pts = []
    for i in range(count):
        ang = phase + 2.0 * math.pi * i / count
        pts.append((int(round(cx + radius * math.cos(ang))),
                    int(round(cy + radius * math.sin(ang)))))
    return pts


def default_seeds(kind: str, size: int = 64) -> SeedSet:
    """Hand-placed 6 fg + 6 bg seeds for the standard phantoms.

    Foreground points sit well inside the shape, background points just
    outside its rim (close external seeds confine the growth best).
    """
    c = (size // 2, size // 2)
    if kind == "disc":
        fg = [c] + _ring(c, 10, 5)
        bg = _ring(c, 26, 6, phase=0.3)
    elif kind == "ellipse":
        cx, cy = c
        fg = [c, (cx - 14, cy), (cx + 14, cy), (cx, cy - 7), (cx, cy + 7), (cx - 7, cy + 4)]
        bg = [(cx - 28, cy), (cx + 28, cy), (cx, cy - 17), (cx, cy + 17),
              (cx - 21, cy - 12), (cx + 21, cy + 12)]
    elif kind == "star":
        # fg toward the arm tips, bg tucked into the concavities between arms
        fg = [c] + _ring(c, 9, 5)
        bg = _ring(c, 13, 5, phase=math.pi / 5) + [(c[0] - 26, c[1] - 26)]
    else:
        raise ValueError(f"unknown phantom kind {kind!r}")
    return seed_set([(x, y, "fg") for x, y in fg] + [(x, y, "bg") for x, y in bg])


def write_phantom_corpus(directory: str | Path, sigma: float = 10.0,
                         seed: int = 0, size: int = 64) -> list[str]:
    """Write disc/ellipse/star entries (<id>.png, <id>.gt.png, <id>.seeds.json)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    makers = {
        "disc": disc_phantom,
        "ellipse": ellipse_phantom,
        "star": star_phantom,
    }
    ids = []
    for i, (name, maker) in enumerate(makers.items()):
        img, gt = maker(size=size)
        noisy = add_noise(img, sigma, seed=seed + i)
        save_gray_image(noisy, directory / f"{name}.png")
        save_mask(gt, directory / f"{name}.gt.png")
        save_seeds(default_seeds(name, size), directory / f"{name}.seeds.json")
        ids.append(name)
    return ids
