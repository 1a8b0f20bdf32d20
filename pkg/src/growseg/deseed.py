"""Evolutionary seed placement: bright, mutually spread points inside a ROI.

A rand/1/bin differential evolution over flat vectors of (x, y) pairs.
Fitness rewards high mean intensity at the points and a large minimum
pairwise distance, each normalized to [0, 1] and blended by a weight.
Selection is greedy, so the best fitness never decreases between
generations and a fixed rng seed reproduces the whole run bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .grid import GrayImage, SeedSet, Seed, Label


@dataclass(frozen=True)
class DeParams:
    points: int = 30
    population: int = 20
    generations: int = 100
    differential_weight: float = 0.8
    crossover_rate: float = 0.9
    brightness_weight: float = 0.5
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.points < 1:
            raise ValueError("points must be >= 1")
        if self.population < 4:
            # rand/1 mutation draws three distinct partners besides the target
            raise ValueError("population must be >= 4")
        if self.generations < 1:
            raise ValueError("generations must be >= 1")
        if not 0.0 < self.differential_weight <= 2.0:
            raise ValueError("differential_weight must be in (0, 2]")
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise ValueError("crossover_rate must be in [0, 1]")
        if not 0.0 <= self.brightness_weight <= 1.0:
            raise ValueError("brightness_weight must be in [0, 1]")


@dataclass(frozen=True)
class SeedSolution:
    points: tuple[tuple[float, float], ...]
    fitness: float


def _round_coord(v: float, limit: int) -> int:
    p = int(math.floor(v + 0.5))
    return min(max(p, 0), limit - 1)


def seed_fitness(img: GrayImage, points: np.ndarray,
                 brightness_weight: float = 0.5) -> float:
    """Blend of normalized brightness and normalized minimum pairwise distance.

    points: (n, 2) array of real (x, y) positions inside the image frame.
    A single point scores full marks on the spread term.
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    n = pts.shape[0]
    if n == 0:
        raise ValueError("need at least one point")
    total = 0.0
    for x, y in pts:
        total += img.pixels[_round_coord(y, img.height), _round_coord(x, img.width)]
    bright = total / (255.0 * n)

    diag = math.hypot(img.width - 1, img.height - 1)
    if n < 2 or diag == 0.0:
        spread = 1.0
    else:
        diff = pts[:, None, :] - pts[None, :, :]
        d2 = (diff * diff).sum(axis=2)
        iu = np.triu_indices(n, k=1)
        spread = math.sqrt(float(d2[iu].min())) / diag

    w = brightness_weight
    return w * bright + (1.0 - w) * spread


def evolve(img: GrayImage, params: DeParams = DeParams(),
           on_generation: Callable[[int, float], None] | None = None) -> SeedSolution:
    if img.width < 2 or img.height < 2:
        raise ValueError("ROI must be at least 2x2")
    rng = np.random.default_rng(params.rng_seed)
    dim = 2 * params.points
    lo = np.tile([0.0, 0.0], params.points)
    hi = np.tile([float(img.width - 1), float(img.height - 1)], params.points)

    pop = lo + rng.random((params.population, dim)) * (hi - lo)
    fit = np.array([seed_fitness(img, v, params.brightness_weight) for v in pop])

    f = params.differential_weight
    cr = params.crossover_rate
    for gen in range(params.generations):
        for i in range(params.population):
            picks = rng.choice(params.population - 1, size=3, replace=False)
            a, b, c = (p + 1 if p >= i else p for p in picks)
            mutant = np.clip(pop[a] + f * (pop[b] - pop[c]), lo, hi)
            cross = rng.random(dim) < cr
            cross[rng.integers(dim)] = True
            trial = np.where(cross, mutant, pop[i])
            trial_fit = seed_fitness(img, trial, params.brightness_weight)
            if trial_fit >= fit[i]:
                pop[i] = trial
                fit[i] = trial_fit
        if on_generation is not None:
            on_generation(gen, float(fit.max()))

    best = int(np.argmax(fit))
    pts = tuple((float(x), float(y)) for x, y in pop[best].reshape(-1, 2))
    return SeedSolution(points=pts, fitness=float(fit[best]))


def generate_seeds(img: GrayImage, params: DeParams = DeParams(),
                   on_generation: Callable[[int, float], None] | None = None) -> SeedSet:
    """Run the search and round the winning points to foreground seeds."""
    best = evolve(img, params, on_generation)
    seen: set[tuple[int, int]] = set()
    seeds: list[Seed] = []
    for x, y in best.points:
        px = _round_coord(x, img.width)
        py = _round_coord(y, img.height)
        if (px, py) not in seen:
            seen.add((px, py))
            seeds.append(Seed(px, py, Label.FOREGROUND))
    return SeedSet(tuple(seeds))
