"""Classic region growing, the comparison baseline.

Breadth-first flood from the foreground seeds: a neighbour joins the
region when its intensity sits within a tolerance of the reference,
either the fixed seed mean or the running region mean. Each pixel is
examined once, so the result is deterministic for a fixed scan order.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .grid import BinaryMask, CellGrid, GrayImage, Label, Neighborhood, SeedSet, neighbors
from .growcut import SegmentationResult


class GrowCriterion(Enum):
    SEED_MEAN = "seed_mean"
    RUNNING_MEAN = "running_mean"


@dataclass(frozen=True)
class RegionGrowConfig:
    tolerance: float = 32.0
    criterion: GrowCriterion = GrowCriterion.SEED_MEAN
    neighborhood: Neighborhood = Neighborhood.MOORE8

    def __post_init__(self) -> None:
        if self.tolerance < 0.0:
            raise ValueError("tolerance must be >= 0")


def region_grow(img: GrayImage, seeds: SeedSet,
                config: RegionGrowConfig = RegionGrowConfig()) -> SegmentationResult:
    """Grow from the foreground seeds; background seeds are ignored."""
    seeds.check_bounds(img.width, img.height)
    fg = sorted(seeds.foreground(), key=lambda p: (p[1], p[0]))
    if not fg:
        raise ValueError("no foreground seed")

    h, w = img.height, img.width
    pixels = img.pixels
    region = np.zeros((h, w), dtype=bool)
    visited = np.zeros((h, w), dtype=bool)
    queue: deque[tuple[int, int]] = deque()

    total = 0.0
    count = 0
    for x, y in fg:
        if not region[y, x]:
            region[y, x] = True
            visited[y, x] = True
            total += float(pixels[y, x])
            count += 1
            queue.append((x, y))
    seed_mean = total / count

    running = config.criterion is GrowCriterion.RUNNING_MEAN
    tol = config.tolerance
    while queue:
        x, y = queue.popleft()
        for nx, ny in neighbors(w, h, x, y, config.neighborhood):
            if visited[ny, nx]:
                continue
            visited[ny, nx] = True
            ref = total / count if running else seed_mean
            if abs(float(pixels[ny, nx]) - ref) <= tol:
                region[ny, nx] = True
                total += float(pixels[ny, nx])
                count += 1
                queue.append((nx, ny))

    labels = np.where(region, np.int8(Label.FOREGROUND), np.int8(Label.BACKGROUND))
    strengths = np.ones((h, w), dtype=np.float64)
    grid = CellGrid(labels=labels, strengths=strengths)
    return SegmentationResult(mask=BinaryMask(region),
                              iterations_used=count,
                              converged=True,
                              final_grid=grid)
