"""Stateless HTTP facade over the segmentation library.

Every request decodes its own image, runs the chosen method and encodes
the answer; nothing is shared between requests, so the mask returned over
HTTP is byte-identical to a direct library call with the same inputs.
"""

from __future__ import annotations

import base64
import io
from pathlib import Path
from typing import Any

import numpy as np
from PIL import Image
from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field
from scipy import ndimage

from . import config as cfg
from .deseed import generate_seeds
from .grid import BinaryMask, GrayImage, Label, Seed, SeedSet
from .harness import segment_with_method
from .metrics import metrics_report, trace_contours
from .mlt import diffuse, multilevel_threshold, select_mass_region, synthesize_seeds

_LABEL_NAMES = {Label.FOREGROUND: "fg", Label.BACKGROUND: "bg"}
_EIGHT_CONN = np.ones((3, 3), dtype=bool)


class SeedModel(BaseModel):
    x: int
    y: int
    label: str = Field(pattern="^(fg|bg)$")


class SegmentRequest(BaseModel):
    image: str
    seeds: list[SeedModel] = []
    method: str = "growcut"
    params: dict[str, Any] = {}
    gt: str | None = None


class AutoseedRequest(BaseModel):
    image: str
    strategy: str = Field(default="mlt", pattern="^(mlt|de)$")
    params: dict[str, Any] = {}


def _decode_image(data: str) -> GrayImage:
    try:
        raw = base64.b64decode(data, validate=True)
        with Image.open(io.BytesIO(raw)) as im:
            if im.mode != "L":
                im = im.convert("L")
            pixels = np.asarray(im, dtype=np.uint8)
        return GrayImage(pixels)
    except HTTPException:
        raise
    except Exception as exc:
        raise HTTPException(status_code=422, detail=f"bad image payload: {exc}")


def _decode_mask(data: str) -> BinaryMask:
    img = _decode_image(data)
    return BinaryMask(img.pixels > 127)


def _encode_mask(mask: BinaryMask) -> str:
    pixels = np.where(mask.bits, 255, 0).astype(np.uint8)
    buf = io.BytesIO()
    Image.fromarray(pixels, mode="L").save(buf, format="PNG")
    return base64.b64encode(buf.getvalue()).decode("ascii")


def _seed_set(models: list[SeedModel]) -> SeedSet:
    label_of = {"fg": Label.FOREGROUND, "bg": Label.BACKGROUND}
    return SeedSet(tuple(Seed(m.x, m.y, label_of[m.label]) for m in models))


def _largest_component_contour(mask: BinaryMask) -> list[list[int]]:
    if not mask.bits.any():
        return []
    labeled, count = ndimage.label(mask.bits, structure=_EIGHT_CONN)
    sizes = ndimage.sum_labels(mask.bits, labeled, index=np.arange(1, count + 1))
    keep = BinaryMask(labeled == int(np.argmax(sizes)) + 1)
    contour = trace_contours(keep)[0]
    return [[int(x), int(y)] for x, y in contour]


def create_app(static_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="growseg service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.get("/health")
    def health() -> dict[str, str]:
        return {"status": "ok"}

    @app.post("/segment")
    def segment(req: SegmentRequest) -> dict[str, Any]:
        if req.method not in cfg.METHOD_NAMES:
            raise HTTPException(status_code=422, detail=f"unknown method {req.method!r}")
        img = _decode_image(req.image)
        # an empty list still becomes a SeedSet so the engines' own
        # "no foreground seed" contract error surfaces as the 422 detail
        seeds = _seed_set(req.seeds)
        try:
            result = segment_with_method(img, req.method, seeds,
                                         {req.method: req.params} if req.params else {})
        except (ValueError, KeyError, TypeError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        body: dict[str, Any] = {
            "mask": _encode_mask(result.mask),
            "contour": _largest_component_contour(result.mask),
            "iterations": result.iterations_used,
            "converged": result.converged,
        }
        if req.gt is not None:
            gt = _decode_mask(req.gt)
            try:
                rep = metrics_report(img, result.mask, gt)
            except ValueError as exc:
                raise HTTPException(status_code=422, detail=str(exc))
            body["metrics"] = {
                "dsc": rep.overlap.dsc,
                "sensitivity": rep.overlap.sensitivity,
                "specificity": rep.overlap.specificity,
                "bac": rep.overlap.bac,
                "shape_errors": dict(rep.shape_errors),
                "spectrum_p": rep.spectrum_p,
            }
        return body

    @app.post("/autoseed")
    def autoseed(req: AutoseedRequest) -> dict[str, Any]:
        img = _decode_image(req.image)
        try:
            if req.strategy == "de":
                seeds = generate_seeds(img, cfg.de_params(req.params or None))
            else:
                kw = cfg.ssgc_params(req.params or None)
                layers = multilevel_threshold(diffuse(img, kw["diffusion"]), kw["mlt"])
                if not layers:
                    raise ValueError("no mass candidate found")
                region = select_mass_region(layers, kw["mlt"].depth)
                seeds = synthesize_seeds(region,
                                         kw.get("dilation_radius", 5),
                                         kw.get("fg_radius", 2))
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return {"seeds": [{"x": s.x, "y": s.y, "label": _LABEL_NAMES[s.label]}
                          for s in seeds.seeds]}

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")
    return app


def serve(port: int = 8000, host: str = "127.0.0.1",
          static_dir: str | Path | None = None) -> None:
    import uvicorn
    uvicorn.run(create_app(static_dir), host=host, port=port)
