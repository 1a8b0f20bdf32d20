"""Core grid types shared by every segmentation engine.

Coordinates are (x, y) with x the column and y the row; (0, 0) is the top-left
pixel.  Images are 8-bit grayscale stored row-major, so ``pixels[y, x]`` is the
intensity at (x, y).  Everything here is immutable after construction except
CellGrid, which is the engines' mutable workspace.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

import numpy as np


class Label(enum.IntEnum):
    UNLABELED = 0
    FOREGROUND = 1
    BACKGROUND = 2


class Neighborhood(enum.Enum):
    MOORE8 = "moore8"
    VON_NEUMANN4 = "von_neumann4"

    @property
    def offsets(self) -> tuple[tuple[int, int], ...]:
        return _OFFSETS[self]


# (dx, dy) offsets in row-major scan order of the 3x3 window; every engine and
# every tie-break in the package iterates neighbors in exactly this order.
_OFFSETS = {
    Neighborhood.MOORE8: (
        (-1, -1), (0, -1), (1, -1),
        (-1, 0), (1, 0),
        (-1, 1), (0, 1), (1, 1),
    ),
    Neighborhood.VON_NEUMANN4: ((0, -1), (-1, 0), (1, 0), (0, 1)),
}


def neighbors(width: int, height: int, x: int, y: int,
              hood: Neighborhood = Neighborhood.MOORE8) -> list[tuple[int, int]]:
    """In-bounds neighbor coordinates of (x, y), in deterministic scan order."""
    if not (0 <= x < width and 0 <= y < height):
        raise ValueError(f"cell ({x}, {y}) outside {width}x{height} grid")
    out = []
    for dx, dy in hood.offsets:
        nx, ny = x + dx, y + dy
        if 0 <= nx < width and 0 <= ny < height:
            out.append((nx, ny))
    return out


@dataclass(frozen=True)
class GrayImage:
    """A read-only 8-bit grayscale raster."""

    pixels: np.ndarray

    def __post_init__(self) -> None:
        px = np.asarray(self.pixels)
        if px.ndim != 2:
            raise ValueError(f"image must be 2-D, got shape {px.shape}")
        if px.shape[0] == 0 or px.shape[1] == 0:
            raise ValueError("zero-dimension image")
        if px.dtype != np.uint8:
            if not np.issubdtype(px.dtype, np.integer):
                raise ValueError(f"image dtype must be integer, got {px.dtype}")
            if px.min() < 0 or px.max() > 255:
                raise ValueError("intensities outside [0, 255]")
            px = px.astype(np.uint8)
        px = np.ascontiguousarray(px)
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.pixels.shape

    def at(self, x: int, y: int) -> int:
        return int(self.pixels[y, x])


def crop_roi(img: GrayImage, x0: int, y0: int, width: int, height: int) -> GrayImage:
    """Rectangular crop; the window must lie fully inside the image."""
    if width <= 0 or height <= 0:
        raise ValueError("crop window must have positive size")
    if x0 < 0 or y0 < 0 or x0 + width > img.width or y0 + height > img.height:
        raise ValueError(
            f"crop window {width}x{height}+{x0}+{y0} exceeds image {img.width}x{img.height}")
    return GrayImage(img.pixels[y0:y0 + height, x0:x0 + width].copy())


@dataclass(frozen=True)
class BinaryMask:
    """A boolean raster; True marks foreground."""

    bits: np.ndarray

    def __post_init__(self) -> None:
        b = np.asarray(self.bits)
        if b.ndim != 2 or b.shape[0] == 0 or b.shape[1] == 0:
            raise ValueError(f"mask must be non-empty 2-D, got shape {b.shape}")
        if b.dtype != np.bool_:
            b = b.astype(np.bool_)
        b = np.ascontiguousarray(b)
        b.setflags(write=False)
        object.__setattr__(self, "bits", b)

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.bits.shape

    def area(self) -> int:
        return int(self.bits.sum())


class Seed(NamedTuple):
    x: int
    y: int
    label: Label


@dataclass(frozen=True)
class SeedSet:
    """Validated collection of seed points.

    Exact duplicates collapse silently; the same coordinate under two different
    labels is a contract violation and raises.
    """

    seeds: tuple[Seed, ...] = field(default=())

    def __post_init__(self) -> None:
        seen: dict[tuple[int, int], Label] = {}
        ordered: list[Seed] = []
        for s in self.seeds:
            s = Seed(int(s[0]), int(s[1]), Label(s[2]))
            if s.label == Label.UNLABELED:
                raise ValueError(f"seed at ({s.x}, {s.y}) must be fg or bg")
            prev = seen.get((s.x, s.y))
            if prev is None:
                seen[(s.x, s.y)] = s.label
                ordered.append(s)
            elif prev != s.label:
                raise ValueError(f"conflicting labels for seed at ({s.x}, {s.y})")
        object.__setattr__(self, "seeds", tuple(ordered))

    def __len__(self) -> int:
        return len(self.seeds)

    def __iter__(self):
        return iter(self.seeds)

    def check_bounds(self, width: int, height: int) -> None:
        for s in self.seeds:
            if not (0 <= s.x < width and 0 <= s.y < height):
                raise ValueError(f"seed ({s.x}, {s.y}) outside {width}x{height} image")

    def points(self, label: Label) -> list[tuple[int, int]]:
        return [(s.x, s.y) for s in self.seeds if s.label == label]

    def foreground(self) -> list[tuple[int, int]]:
        return self.points(Label.FOREGROUND)

    def background(self) -> list[tuple[int, int]]:
        return self.points(Label.BACKGROUND)


def seed_set(points: Iterable[tuple[int, int, str | int | Label]]) -> SeedSet:
    """Build a SeedSet from (x, y, label) triples; label may be 'fg'/'bg'."""
    names = {"fg": Label.FOREGROUND, "bg": Label.BACKGROUND}
    seeds = []
    for x, y, lab in points:
        if isinstance(lab, str):
            if lab not in names:
                raise ValueError(f"unknown seed label {lab!r}")
            lab = names[lab]
        seeds.append(Seed(int(x), int(y), Label(lab)))
    return SeedSet(tuple(seeds))


@dataclass
class CellGrid:
    """Mutable automaton state: a label and a strength per cell.

    Strengths live in [0, 1]; unlabeled cells always carry strength 0.
    """

    labels: np.ndarray
    strengths: np.ndarray

    def __post_init__(self) -> None:
        self.labels = np.ascontiguousarray(np.asarray(self.labels, dtype=np.int8))
        self.strengths = np.ascontiguousarray(np.asarray(self.strengths, dtype=np.float64))
        if self.labels.ndim != 2 or self.labels.shape != self.strengths.shape:
            raise ValueError("labels and strengths must be 2-D arrays of equal shape")
        self.validate()

    @property
    def shape(self) -> tuple[int, int]:
        return self.labels.shape

    def validate(self) -> None:
        if not np.isin(self.labels, (0, 1, 2)).all():
            raise ValueError("labels must be 0 (unlabeled), 1 (fg) or 2 (bg)")
        if self.strengths.min() < 0.0 or self.strengths.max() > 1.0:
            raise ValueError("strengths must lie in [0, 1]")
        off = (self.labels == Label.UNLABELED) & (self.strengths != 0.0)
        if off.any():
            raise ValueError("unlabeled cells must have strength 0")

    def copy(self) -> "CellGrid":
        return CellGrid(self.labels.copy(), self.strengths.copy())

    def to_mask(self) -> BinaryMask:
        """Foreground mask; unlabeled cells count as background."""
        return BinaryMask(self.labels == Label.FOREGROUND)
