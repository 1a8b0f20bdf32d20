"""JSON-friendly parameter blocks shared by the CLI, batch driver and service.

Each parser takes an optional mapping (as decoded from a config file or a
request body) and returns the corresponding frozen config object. Unknown
keys raise, so typos fail loudly instead of silently running defaults.
"""

from __future__ import annotations

from typing import Any, Mapping

from .deseed import DeParams
from .fuzzy import FuzzyConfig
from .grid import Neighborhood
from .growcut import GrowCutConfig
from .mlt import DiffusionParams, MltParams
from .regiongrow import GrowCriterion, RegionGrowConfig

METHOD_NAMES = ("growcut", "fuzzy", "ssgc", "regiongrow")


def _take(block: Mapping[str, Any] | None, allowed: tuple[str, ...],
          what: str) -> dict[str, Any]:
    if block is None:
        return {}
    extra = set(block) - set(allowed)
    if extra:
        raise ValueError(f"unknown {what} option(s): {', '.join(sorted(extra))}")
    return dict(block)


def neighborhood_from_name(name: str) -> Neighborhood:
    for hood in Neighborhood:
        if hood.value == name:
            return hood
    raise ValueError(f"unknown neighborhood {name!r}")


def growcut_config(block: Mapping[str, Any] | None = None) -> GrowCutConfig:
    opts = _take(block, ("neighborhood", "max_iterations", "max_intensity_norm"),
                 "growcut")
    if "neighborhood" in opts:
        opts["neighborhood"] = neighborhood_from_name(opts["neighborhood"])
    return GrowCutConfig(**opts)


def fuzzy_config(block: Mapping[str, Any] | None = None) -> FuzzyConfig:
    opts = _take(block, ("neighborhood", "max_iterations", "max_intensity_norm",
                         "alpha", "sigma_floor"), "fuzzy")
    if "neighborhood" in opts:
        opts["neighborhood"] = neighborhood_from_name(opts["neighborhood"])
    return FuzzyConfig(**opts)


def regiongrow_config(block: Mapping[str, Any] | None = None) -> RegionGrowConfig:
    opts = _take(block, ("tolerance", "criterion", "neighborhood"), "regiongrow")
    if "criterion" in opts:
        opts["criterion"] = GrowCriterion(opts["criterion"])
    if "neighborhood" in opts:
        opts["neighborhood"] = neighborhood_from_name(opts["neighborhood"])
    return RegionGrowConfig(**opts)


def de_params(block: Mapping[str, Any] | None = None) -> DeParams:
    opts = _take(block, ("points", "population", "generations",
                         "differential_weight", "crossover_rate",
                         "brightness_weight", "rng_seed"), "de")
    return DeParams(**opts)


def diffusion_params(block: Mapping[str, Any] | None = None) -> DiffusionParams:
    opts = _take(block, ("iterations", "time_step", "contrast"), "diffusion")
    return DiffusionParams(**opts)


def ssgc_params(block: Mapping[str, Any] | None = None) -> dict[str, Any]:
    """Keyword arguments for run_ssgc, nested blocks resolved."""
    opts = _take(block, ("level", "depth", "diffusion", "growcut",
                         "dilation_radius", "fg_radius"), "ssgc")
    out: dict[str, Any] = {
        "mlt": MltParams(level=opts.get("level", 10), depth=opts.get("depth", 2)),
        "diffusion": diffusion_params(opts.get("diffusion")),
        "growcut": growcut_config(opts.get("growcut")),
    }
    if "dilation_radius" in opts:
        out["dilation_radius"] = opts["dilation_radius"]
    if "fg_radius" in opts:
        out["fg_radius"] = opts["fg_radius"]
    return out
