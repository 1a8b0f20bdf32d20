"""File I/O for images, masks and seed lists.

Supported rasters: binary PGM (P5, maxval up to 65535; wide values are scaled
down to [0, 255] by integer division) and 8-bit grayscale PNG.  Masks are
written as 0/255 images.  Seed lists travel as JSON
(``[{"x": 3, "y": 4, "label": "fg"}, ...]``) or as CSV with an ``x,y,label``
header.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np
from PIL import Image

from .grid import BinaryMask, GrayImage, Label, SeedSet, seed_set

_LABEL_NAMES = {Label.FOREGROUND: "fg", Label.BACKGROUND: "bg"}


def _read_pgm(data: bytes) -> GrayImage:
    pos = 0

    def token() -> bytes:
        nonlocal pos
        while pos < len(data):
            c = data[pos:pos + 1]
            if c == b"#":
                while pos < len(data) and data[pos:pos + 1] != b"\n":
                    pos += 1
            elif c.isspace():
                pos += 1
            else:
                break
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ValueError("truncated PGM header")
        return data[start:pos]

    if token() != b"P5":
        raise ValueError("unsupported format: not a binary PGM (P5)")
    width, height, maxval = int(token()), int(token()), int(token())
    if width <= 0 or height <= 0:
        raise ValueError("zero-dimension image")
    if not (0 < maxval < 65536):
        raise ValueError(f"PGM maxval {maxval} out of range")
    pos += 1  # single whitespace byte after maxval
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype(np.uint8)
    n = width * height
    raw = data[pos:pos + n * dtype.itemsize]
    if len(raw) < n * dtype.itemsize:
        raise ValueError("truncated PGM data")
    px = np.frombuffer(raw, dtype=dtype).reshape(height, width)
    if maxval > 255:
        px = (px.astype(np.uint32) * 255 // maxval).astype(np.uint8)
    return GrayImage(px.astype(np.uint8))


def _write_pgm(img: GrayImage) -> bytes:
    header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + img.pixels.tobytes()


def load_gray_image(path: str | Path) -> GrayImage:
    """Read a PGM or PNG file into a GrayImage."""
    path = Path(path)
    data = path.read_bytes()
    if data[:2] == b"P5":
        return _read_pgm(data)
    if data[:8] == b"\x89PNG\r\n\x1a\n":
        with Image.open(io.BytesIO(data)) as im:
            if im.mode != "L":
                raise ValueError(
                    f"unsupported format: PNG mode {im.mode!r}, need 8-bit grayscale")
            px = np.asarray(im, dtype=np.uint8)
        if px.size == 0:
            raise ValueError("zero-dimension image")
        return GrayImage(px)
    raise ValueError(f"unsupported format: {path.name} is neither P5 PGM nor PNG")


def save_gray_image(img: GrayImage, path: str | Path) -> None:
    """Write PGM or PNG according to the file extension."""
    path = Path(path)
    ext = path.suffix.lower()
    if ext == ".pgm":
        path.write_bytes(_write_pgm(img))
    elif ext == ".png":
        Image.fromarray(img.pixels, mode="L").save(path, format="PNG")
    else:
        raise ValueError(f"unsupported format: cannot write {ext!r}")


def load_mask(path: str | Path) -> BinaryMask:
    """Read a mask image; any intensity above 127 counts as foreground."""
    return BinaryMask(load_gray_image(path).pixels > 127)


def save_mask(mask: BinaryMask, path: str | Path) -> None:
    img = GrayImage(np.where(mask.bits, 255, 0).astype(np.uint8))
    save_gray_image(img, path)


def load_seeds(path: str | Path) -> SeedSet:
    path = Path(path)
    if path.suffix.lower() == ".json":
        rows = json.loads(path.read_text())
        if not isinstance(rows, list):
            raise ValueError("seed JSON must be a list of objects")
        return seed_set((r["x"], r["y"], r["label"]) for r in rows)
    if path.suffix.lower() == ".csv":
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames != ["x", "y", "label"]:
                raise ValueError("seed CSV must have header x,y,label")
            return seed_set((r["x"], r["y"], r["label"]) for r in reader)
    raise ValueError(f"unsupported seed format {path.suffix!r}")


def save_seeds(seeds: SeedSet, path: str | Path) -> None:
    path = Path(path)
    if path.suffix.lower() == ".json":
        rows = [{"x": s.x, "y": s.y, "label": _LABEL_NAMES[s.label]} for s in seeds]
        path.write_text(json.dumps(rows, indent=2) + "\n")
    elif path.suffix.lower() == ".csv":
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x", "y", "label"])
            for s in seeds:
                writer.writerow([s.x, s.y, _LABEL_NAMES[s.label]])
    else:
        raise ValueError(f"unsupported seed format {path.suffix!r}")
