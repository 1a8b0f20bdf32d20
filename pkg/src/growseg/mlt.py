"""Automatic seeding by smoothing, multilevel thresholding and region picking.

The pipeline: anisotropic diffusion tames noise while keeping edges, a
descending ladder of thresholds slices the result into nested bright
layers, the innermost layers are merged and the largest connected blob
is taken as the mass candidate. Foreground seeds go at its centroid,
background seeds on a thin ring just outside it, and the classical
growth engine finishes the job.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import ndimage

from .grid import BinaryMask, GrayImage, SeedSet, Seed, Label
from .growcut import GrowCutConfig, SegmentationResult, run

_EIGHT_CONN = np.ones((3, 3), dtype=bool)


@dataclass(frozen=True)
class DiffusionParams:
    """Explicit Perona-Malik scheme with exponential diffusivity."""

    iterations: int = 15
    time_step: float = 0.2
    contrast: float = 15.0

    def __post_init__(self) -> None:
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")
        if not 0.0 < self.time_step <= 0.25:
            # 4-neighbour explicit scheme is stable only up to 1/4
            raise ValueError("time_step must be in (0, 0.25]")
        if self.contrast <= 0.0:
            raise ValueError("contrast must be positive")


@dataclass(frozen=True)
class MltParams:
    level: int = 10
    depth: int = 2

    def __post_init__(self) -> None:
        if self.level < 1:
            raise ValueError("level must be >= 1")
        if self.depth < 1:
            raise ValueError("depth must be >= 1")


def _tensor_fields(u: np.ndarray, k2: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Diffusion tensor components (a, b, c) = (D_xx, D_xy, D_yy).

    Across the regularized gradient the diffusivity is exp(-|g|^2/k^2),
    along it the diffusivity stays 1, so edges block flow without
    freezing the noise that sits beside them.
    """
    v = ndimage.gaussian_filter(u, sigma=1.0, mode="nearest")
    gy, gx = np.gradient(v)
    mag2 = gx * gx + gy * gy
    lam = np.exp(-mag2 / k2)
    inv = np.where(mag2 > 0.0, 1.0 / np.where(mag2 > 0.0, mag2, 1.0), 0.0)
    a = np.where(mag2 > 0.0, (lam * gx * gx + gy * gy) * inv, 1.0)
    b = (lam - 1.0) * gx * gy * inv
    c = np.where(mag2 > 0.0, (lam * gy * gy + gx * gx) * inv, 1.0)
    return a, b, c


def _central(u: np.ndarray, axis: int) -> np.ndarray:
    d = np.empty_like(u)
    if axis == 0:
        d[1:-1, :] = 0.5 * (u[2:, :] - u[:-2, :])
        d[0, :] = u[1, :] - u[0, :]
        d[-1, :] = u[-1, :] - u[-2, :]
    else:
        d[:, 1:-1] = 0.5 * (u[:, 2:] - u[:, :-2])
        d[:, 0] = u[:, 1] - u[:, 0]
        d[:, -1] = u[:, -1] - u[:, -2]
    return d


def diffuse(img: GrayImage, params: DiffusionParams = DiffusionParams()) -> GrayImage:
    """Edge-enhancing anisotropic diffusion, explicit in time.

    Fluxes are accumulated per lattice edge with coefficients averaged
    from the two endpoints, so the total mass is conserved exactly up to
    the final rounding and a constant image is a fixed point.
    """
    u = img.pixels.astype(np.float64)
    k2 = params.contrast * params.contrast
    for _ in range(params.iterations):
        a, b, c = _tensor_fields(u, k2)
        dyu = _central(u, 0)
        dxu = _central(u, 1)
        flow = np.zeros_like(u)

        # horizontal edges: exact d/dx, averaged transverse d/dy
        ux = u[:, 1:] - u[:, :-1]
        uy = 0.5 * (dyu[:, 1:] + dyu[:, :-1])
        ae = 0.5 * (a[:, 1:] + a[:, :-1])
        be = 0.5 * (b[:, 1:] + b[:, :-1])
        jx = ae * ux + be * uy
        flow[:, :-1] += jx
        flow[:, 1:] -= jx

        # vertical edges: exact d/dy, averaged transverse d/dx
        uy = u[1:, :] - u[:-1, :]
        ux = 0.5 * (dxu[1:, :] + dxu[:-1, :])
        ce = 0.5 * (c[1:, :] + c[:-1, :])
        be = 0.5 * (b[1:, :] + b[:-1, :])
        jy = ce * uy + be * ux
        flow[:-1, :] += jy
        flow[1:, :] -= jy

        u = u + params.time_step * flow
    return GrayImage(np.clip(np.rint(u), 0, 255).astype(np.uint8))


def threshold_ladder(img: GrayImage, level: int) -> list[int]:
    """Thresholds max-level, max-2*level, ... while still above the minimum."""
    lo = int(img.pixels.min())
    hi = int(img.pixels.max())
    out = []
    t = hi - level
    while t > lo:
        out.append(t)
        t -= level
    return out


def multilevel_threshold(img: GrayImage, params: MltParams = MltParams(),
                         thresholds: list[int] | None = None) -> list[BinaryMask]:
    """Nested super-level sets, brightest (innermost) first."""
    if thresholds is None:
        thresholds = threshold_ladder(img, params.level)
    else:
        thresholds = list(thresholds)
        if any(b >= a for a, b in zip(thresholds, thresholds[1:])):
            raise ValueError("thresholds must be strictly decreasing")
    return [BinaryMask(img.pixels >= t) for t in thresholds]


def select_mass_region(layers: list[BinaryMask], depth: int | None = None) -> BinaryMask:
    """Union of the innermost `depth` layers, reduced to its largest 8-connected blob."""
    if not layers:
        raise ValueError("need at least one layer")
    if depth is None:
        depth = len(layers)
    if depth < 1:
        raise ValueError("depth must be >= 1")
    merged = np.zeros(layers[0].bits.shape, dtype=bool)
    for layer in layers[:depth]:
        merged |= layer.bits
    if not merged.any():
        return BinaryMask(merged)
    labeled, count = ndimage.label(merged, structure=_EIGHT_CONN)
    sizes = ndimage.sum_labels(merged, labeled, index=np.arange(1, count + 1))
    best = int(np.argmax(sizes)) + 1  # ties fall to the lowest label id
    return BinaryMask(labeled == best)


def synthesize_seeds(region: BinaryMask, dilation_radius: int = 5,
                     fg_radius: int = 2) -> SeedSet:
    """Foreground disc at the region centroid, background ring just outside.

    The ring is the dilation annulus: background pixels within
    `dilation_radius` (Euclidean) of the region. The foreground disc is
    clipped to the region so every seed is honest about its label.
    """
    if not region.bits.any():
        raise ValueError("no mass candidate found")
    if dilation_radius < 1 or fg_radius < 0:
        raise ValueError("radii must be positive")
    bits = region.bits
    dist, (iy, ix) = ndimage.distance_transform_edt(~bits, return_indices=True)
    ring = (dist > 0.0) & (dist <= dilation_radius)

    ys, xs = np.nonzero(bits)
    cx = float(xs.mean())
    cy = float(ys.mean())
    px = int(np.rint(cx))
    py = int(np.rint(cy))
    if not bits[py, px]:
        # centroid fell outside (crescent shapes): snap to the nearest region pixel
        py, px = int(iy[py, px]), int(ix[py, px])

    h, w = bits.shape
    seeds: list[Seed] = []
    y0 = max(0, py - fg_radius)
    y1 = min(h, py + fg_radius + 1)
    x0 = max(0, px - fg_radius)
    x1 = min(w, px + fg_radius + 1)
    for y in range(y0, y1):
        for x in range(x0, x1):
            if (x - px) ** 2 + (y - py) ** 2 <= fg_radius * fg_radius and bits[y, x]:
                seeds.append(Seed(x, y, Label.FOREGROUND))
    for y, x in zip(*np.nonzero(ring)):
        seeds.append(Seed(int(x), int(y), Label.BACKGROUND))
    return SeedSet(tuple(seeds))


def run_ssgc(img: GrayImage,
             mlt: MltParams = MltParams(),
             diffusion: DiffusionParams = DiffusionParams(),
             growcut: GrowCutConfig = GrowCutConfig(),
             dilation_radius: int = 5,
             fg_radius: int = 2,
             debug_dir: str | Path | None = None) -> SegmentationResult:
    """Fully automatic pipeline: diffuse, threshold, pick region, seed, grow."""
    smooth = diffuse(img, diffusion)
    layers = multilevel_threshold(smooth, mlt)
    if not layers:
        raise ValueError("no mass candidate found")
    region = select_mass_region(layers, mlt.depth)
    if region.area() == 0:
        raise ValueError("no mass candidate found")
    seeds = synthesize_seeds(region, dilation_radius, fg_radius)
    if debug_dir is not None:
        _dump_stages(Path(debug_dir), smooth, layers, region, seeds)
    return run(smooth, seeds, growcut)


def _dump_stages(directory: Path, smooth: GrayImage, layers: list[BinaryMask],
                 region: BinaryMask, seeds: SeedSet) -> None:
    from .imgio import save_gray_image, save_mask, save_seeds

    directory.mkdir(parents=True, exist_ok=True)
    save_gray_image(smooth, directory / "diffused.png")
    for i, layer in enumerate(layers):
        save_mask(layer, directory / f"layer_{i:02d}.png")
    save_mask(region, directory / "region.png")
    save_seeds(seeds, directory / "seeds.json")
