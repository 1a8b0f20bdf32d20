"""Fault-tolerant automaton driven by a Gaussian object membership.

Takes foreground seeds only.  The seed cloud is summarized by a separable
Gaussian: cells whose object membership drops below one half form a background
zone that fights with full model strength and always pushes the background
label, so a stray seed cannot leak foreground across the membership frontier.
Only the seed centroid cell is planted in the grid; the seeds themselves shape
the membership surface.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .grid import CellGrid, GrayImage, Label, Neighborhood, SeedSet
from .growcut import SegmentationResult

_MAX_ITERATIONS_DEFAULT = 10000


@dataclass(frozen=True)
class FuzzyConfig:
    neighborhood: Neighborhood = Neighborhood.MOORE8
    max_iterations: int = _MAX_ITERATIONS_DEFAULT
    max_intensity_norm: float = 255.0
    alpha: float = 2.0
    sigma_floor: float = 1.0

    def __post_init__(self) -> None:
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not self.max_intensity_norm > 0:
            raise ValueError("max_intensity_norm must be positive")
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if not self.sigma_floor > 0:
            raise ValueError("sigma_floor must be positive")


@dataclass(frozen=True)
class MembershipModel:
    """Separable Gaussian centered on the seed centroid."""

    xm: float
    ym: float
    sx: float
    sy: float
    alpha_x: float
    alpha_y: float

    def mu_obj(self, x: float, y: float) -> float:
        dx2 = 2.0 * self.alpha_x * self.sx ** 2
        dy2 = 2.0 * self.alpha_y * self.sy ** 2
        return math.exp(-((x - self.xm) ** 2) / dx2) * math.exp(-((y - self.ym) ** 2) / dy2)

    def mu_bkg(self, x: float, y: float) -> float:
        return 1.0 - self.mu_obj(x, y)

    def center_cell(self, width: int, height: int) -> tuple[int, int]:
        # Nearest cell; half-way values round toward the lower index.
        cx = int(math.ceil(self.xm - 0.5))
        cy = int(math.ceil(self.ym - 0.5))
        return min(max(cx, 0), width - 1), min(max(cy, 0), height - 1)

    def membership_grid(self, width: int, height: int) -> np.ndarray:
        return _kernels.membership_grid(
            width, height, self.xm, self.ym,
            2.0 * self.alpha_x * self.sx ** 2, 2.0 * self.alpha_y * self.sy ** 2)


def _require_fg_only(seeds: SeedSet) -> list[tuple[int, int]]:
    if seeds.background():
        raise ValueError("this engine takes foreground seeds only")
    fg = seeds.foreground()
    if not fg:
        raise ValueError("no foreground seed")
    return fg


def fit_membership_model(seeds: SeedSet, cfg: FuzzyConfig = FuzzyConfig()) -> MembershipModel:
    """Centroid and floored population spread of the foreground seed cloud."""
    fg = _require_fg_only(seeds)
    xs = np.array([p[0] for p in fg], dtype=np.float64)
    ys = np.array([p[1] for p in fg], dtype=np.float64)
    sx = max(float(xs.std()), cfg.sigma_floor)
    sy = max(float(ys.std()), cfg.sigma_floor)
    return MembershipModel(xm=float(xs.mean()), ym=float(ys.mean()),
                           sx=sx, sy=sy, alpha_x=cfg.alpha, alpha_y=cfg.alpha)


def model_strength(model: MembershipModel, theta: float, x: float, y: float) -> float:
    """Effective defense/attack strength at (x, y) for stored strength theta."""
    if model.mu_bkg(x, y) > model.mu_obj(x, y):
        return 1.0
    return theta


def init_fuzzy(img: GrayImage, seeds: SeedSet, cfg: FuzzyConfig = FuzzyConfig()
               ) -> tuple[CellGrid, MembershipModel]:
    """Blank state with only the seed-centroid cell planted as foreground."""
    seeds.check_bounds(img.width, img.height)
    model = fit_membership_model(seeds, cfg)
    labels = np.zeros(img.shape, dtype=np.int8)
    strengths = np.zeros(img.shape, dtype=np.float64)
    cx, cy = model.center_cell(img.width, img.height)
    labels[cy, cx] = int(Label.FOREGROUND)
    strengths[cy, cx] = 1.0
    return CellGrid(labels, strengths), model


def step_fuzzy(img: GrayImage, grid: CellGrid, model: MembershipModel,
               cfg: FuzzyConfig = FuzzyConfig()) -> tuple[CellGrid, int]:
    """Advance one synchronous generation; returns (new grid, labels changed)."""
    if grid.shape != img.shape:
        raise ValueError("grid and image dimensions differ")
    intensity = img.pixels.astype(np.float64)
    mu = model.membership_grid(img.width, img.height)
    out_l = np.empty_like(grid.labels)
    out_s = np.empty_like(grid.strengths)
    changed = _kernels.fuzzy_sweep(
        intensity, grid.labels, grid.strengths, mu, out_l, out_s,
        cfg.neighborhood is Neighborhood.MOORE8, cfg.max_intensity_norm)
    return CellGrid(out_l, out_s), int(changed)


def run_fuzzy(img: GrayImage, seeds: SeedSet, cfg: FuzzyConfig = FuzzyConfig()
              ) -> SegmentationResult:
    """Iterate to convergence (or the iteration cap) from fg-only seeds."""
    grid, model = init_fuzzy(img, seeds, cfg)
    intensity = img.pixels.astype(np.float64)
    mu = model.membership_grid(img.width, img.height)
    labels, strengths, iters, converged = _kernels.fuzzy_run(
        intensity, grid.labels, grid.strengths, mu,
        cfg.neighborhood is Neighborhood.MOORE8,
        cfg.max_intensity_norm, cfg.max_iterations)
    final = CellGrid(labels, strengths)
    return SegmentationResult(
        mask=final.to_mask(),
        iterations_used=int(iters),
        converged=bool(converged),
        final_grid=final,
    )
