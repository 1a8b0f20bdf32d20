"""Seeded cellular-automaton segmentation.

Cells fight for their neighbors: a labeled neighbor q attacks p with strength
``g(|C_p - C_q|) * theta_q`` where g attenuates linearly with the intensity
difference.  p adopts the strongest attack that strictly beats its running
defense.  Sweeps are synchronous generations; the automaton has converged when
a sweep changes no label.  Unlabeled survivors count as background in the
output mask.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .grid import BinaryMask, CellGrid, GrayImage, Neighborhood, SeedSet

_MAX_ITERATIONS_DEFAULT = 10000


@dataclass(frozen=True)
class GrowCutConfig:
    neighborhood: Neighborhood = Neighborhood.MOORE8
    max_iterations: int = _MAX_ITERATIONS_DEFAULT
    max_intensity_norm: float = 255.0

    def __post_init__(self) -> None:
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not self.max_intensity_norm > 0:
            raise ValueError("max_intensity_norm must be positive")


@dataclass(frozen=True)
class SegmentationResult:
    mask: BinaryMask
    iterations_used: int
    converged: bool
    final_grid: CellGrid


def attenuation(delta: float, max_norm: float = 255.0) -> float:
    """Monotone attack damping: 1 at identical intensity, 0 at max difference."""
    if not 0.0 <= delta <= max_norm:
        raise ValueError(f"intensity difference {delta} outside [0, {max_norm}]")
    return 1.0 - delta / max_norm


def init_grid(img: GrayImage, seeds: SeedSet) -> CellGrid:
    """Blank automaton state with every seed planted at full strength."""
    seeds.check_bounds(img.width, img.height)
    labels = np.zeros(img.shape, dtype=np.int8)
    strengths = np.zeros(img.shape, dtype=np.float64)
    for s in seeds:
        labels[s.y, s.x] = int(s.label)
        strengths[s.y, s.x] = 1.0
    return CellGrid(labels, strengths)


def step(img: GrayImage, grid: CellGrid, cfg: GrowCutConfig = GrowCutConfig()
         ) -> tuple[CellGrid, int]:
    """Advance one synchronous generation; returns (new grid, labels changed)."""
    if grid.shape != img.shape:
        raise ValueError("grid and image dimensions differ")
    intensity = img.pixels.astype(np.float64)
    out_l = np.empty_like(grid.labels)
    out_s = np.empty_like(grid.strengths)
    changed = _kernels.growcut_sweep(
        intensity, grid.labels, grid.strengths, out_l, out_s,
        cfg.neighborhood is Neighborhood.MOORE8, cfg.max_intensity_norm)
    return CellGrid(out_l, out_s), int(changed)


def run(img: GrayImage, seeds: SeedSet, cfg: GrowCutConfig = GrowCutConfig()
        ) -> SegmentationResult:
    """Iterate to convergence (or the iteration cap) from the given seeds."""
    if not seeds.foreground():
        raise ValueError("no foreground seed")
    grid = init_grid(img, seeds)
    intensity = img.pixels.astype(np.float64)
    labels, strengths, iters, converged = _kernels.growcut_run(
        intensity, grid.labels, grid.strengths,
        cfg.neighborhood is Neighborhood.MOORE8,
        cfg.max_intensity_norm, cfg.max_iterations)
    final = CellGrid(labels, strengths)
    return SegmentationResult(
        mask=final.to_mask(),
        iterations_used=int(iters),
        converged=bool(converged),
        final_grid=final,
    )
