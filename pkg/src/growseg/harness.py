"""Batch experiment driver: corpora in, CSVs, masks, overlays and stats out.

Corpus layout is one flat directory: ``<id>.png`` (or .pgm), ``<id>.gt.png``
and optionally ``<id>.seeds.json`` per entry. Every (image, method) pair
yields one row in results.csv with a fixed column set:

    image, method, iterations, area, perimeter, form_factor, solidity,
    feret_x, feret_y, gt_area, gt_perimeter, gt_form_factor, gt_solidity,
    gt_feret_x, gt_feret_y, tp, fp, fn, tn, dsc, sensitivity, specificity,
    bac, err_area, err_perimeter, err_form_factor, err_solidity,
    err_feret_x, err_feret_y, spectrum_p

Floats are written as %.6f, so a rerun over the same corpus is
byte-identical. Wall-clock times go to a separate timings.csv because they
are not reproducible. Per-image failures are recorded and the run carries
on; failures.csv is written only when something failed.
"""

from __future__ import annotations

import csv
import json
import time
import zlib
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np
from PIL import Image
from scipy import ndimage

from . import config as cfg
from .deseed import generate_seeds
from .fuzzy import run_fuzzy
from .grid import BinaryMask, GrayImage, Label, SeedSet
from .growcut import SegmentationResult, run
from .imgio import load_gray_image, load_mask, load_seeds, save_mask
from .metrics import MetricsReport, metrics_report, _SHAPE_FIELDS
from .mlt import run_ssgc
from .regiongrow import region_grow

RESULT_COLUMNS = (
    "image", "method", "iterations",
    "area", "perimeter", "form_factor", "solidity", "feret_x", "feret_y",
    "gt_area", "gt_perimeter", "gt_form_factor", "gt_solidity",
    "gt_feret_x", "gt_feret_y",
    "tp", "fp", "fn", "tn", "dsc", "sensitivity", "specificity", "bac",
    "err_area", "err_perimeter", "err_form_factor", "err_solidity",
    "err_feret_x", "err_feret_y", "spectrum_p",
)

_INT_COLUMNS = {"iterations", "area", "gt_area", "feret_x", "feret_y",
                "gt_feret_x", "gt_feret_y", "tp", "fp", "fn", "tn"}

SUMMARY_METRICS = (
    "dsc", "sensitivity", "specificity", "bac",
    "err_area", "err_perimeter", "err_form_factor", "err_solidity",
    "err_feret_x", "err_feret_y",
)

DEFAULT_ALPHA = 0.05


@dataclass(frozen=True)
class ExperimentSpec:
    corpus_dir: Path
    output_dir: Path
    methods: tuple[str, ...]
    configs: Mapping[str, Any]
    rng_seed: int = 0

    def __post_init__(self) -> None:
        for m in self.methods:
            if m not in cfg.METHOD_NAMES:
                raise ValueError(f"unknown method {m!r}")
        if not self.methods:
            raise ValueError("need at least one method")

    @classmethod
    def from_json(cls, path: str | Path) -> "ExperimentSpec":
        raw = json.loads(Path(path).read_text())
        method = raw.get("method", "growcut")
        methods = tuple(method) if isinstance(method, list) else (method,)
        return cls(corpus_dir=Path(raw["corpus_dir"]),
                   output_dir=Path(raw["output_dir"]),
                   methods=methods,
                   configs=raw.get("configs", {}),
                   rng_seed=int(raw.get("rng_seed", 0)))


@dataclass(frozen=True)
class RunRecord:
    image_id: str
    method: str
    report: MetricsReport
    iterations_used: int
    wall_time_ms: float


@dataclass(frozen=True)
class RunFailure:
    image_id: str
    method: str
    error: str


def discover_corpus(corpus_dir: str | Path) -> list[tuple[str, Path, Path, Path | None]]:
    """Sorted (id, image, gt, seeds-or-None) tuples; gt presence is mandatory."""
    corpus_dir = Path(corpus_dir)
    entries = []
    for ext in ("png", "pgm"):
        for p in corpus_dir.glob(f"*.{ext}"):
            if p.name.endswith(f".gt.{ext}") or ".gt." in p.name:
                continue
            image_id = p.name[: -len(ext) - 1]
            if image_id.endswith(".mask") or image_id.endswith(".overlay"):
                continue
            gt = corpus_dir / f"{image_id}.gt.{ext}"
            seeds = corpus_dir / f"{image_id}.seeds.json"
            entries.append((image_id, p, gt, seeds if seeds.exists() else None))
    return sorted(entries, key=lambda e: e[0])


def _fuzzy_seed_fallback(img: GrayImage, image_id: str, rng_seed: int,
                         configs: Mapping[str, Any]) -> SeedSet:
    block = dict(configs.get("de") or {})
    block.setdefault("points", 8)
    block["rng_seed"] = rng_seed ^ zlib.crc32(image_id.encode())
    return generate_seeds(img, cfg.de_params(block))


def segment_with_method(img: GrayImage, method: str, seeds: SeedSet | None,
                        configs: Mapping[str, Any], rng_seed: int = 0,
                        image_id: str = "") -> SegmentationResult:
    if method == "growcut":
        if seeds is None:
            raise ValueError("growcut needs a seeds file")
        return run(img, seeds, cfg.growcut_config(configs.get("growcut")))
    if method == "fuzzy":
        if seeds is not None:
            fg = SeedSet(tuple(s for s in seeds.seeds if s.label == Label.FOREGROUND))
        else:
            fg = _fuzzy_seed_fallback(img, image_id, rng_seed, configs)
        return run_fuzzy(img, fg, cfg.fuzzy_config(configs.get("fuzzy")))
    if method == "ssgc":
        return run_ssgc(img, **cfg.ssgc_params(configs.get("ssgc")))
    if method == "regiongrow":
        if seeds is None:
            raise ValueError("regiongrow needs a seeds file")
        return region_grow(img, seeds, cfg.regiongrow_config(configs.get("regiongrow")))
    raise ValueError(f"unknown method {method!r}")


def _boundary(mask: np.ndarray) -> np.ndarray:
    return mask & ~ndimage.binary_erosion(mask, structure=np.ones((3, 3), bool),
                                          border_value=0)


def overlay_rgb(img: GrayImage, seg: BinaryMask, gt: BinaryMask | None) -> np.ndarray:
    """Gray base, black ground-truth contour underneath a green segmentation contour."""
    rgb = np.stack([img.pixels] * 3, axis=2).astype(np.uint8)
    if gt is not None:
        rgb[_boundary(gt.bits)] = (0, 0, 0)
    rgb[_boundary(seg.bits)] = (0, 255, 0)
    return rgb


def _format_cell(column: str, value: Any) -> str:
    if column in ("image", "method"):
        return str(value)
    if column in _INT_COLUMNS:
        return str(int(value))
    return f"{float(value):.6f}"


def record_row(rec: RunRecord) -> dict[str, Any]:
    rep = rec.report
    row: dict[str, Any] = {"image": rec.image_id, "method": rec.method,
                           "iterations": rec.iterations_used}
    for f in _SHAPE_FIELDS:
        row[f] = getattr(rep.seg_shape, f)
        row[f"gt_{f}"] = getattr(rep.gt_shape, f)
    for f in ("tp", "fp", "fn", "tn", "dsc", "sensitivity", "specificity", "bac"):
        row[f] = getattr(rep.overlap, f)
    for f in _SHAPE_FIELDS:
        row[f"err_{f}"] = rep.shape_errors[f]
    row["spectrum_p"] = rep.spectrum_p
    return row


def write_results_csv(records: Sequence[RunRecord], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RESULT_COLUMNS)
        for rec in records:
            row = record_row(rec)
            writer.writerow([_format_cell(c, row[c]) for c in RESULT_COLUMNS])


def write_timings_csv(records: Sequence[RunRecord], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("image", "method", "wall_time_ms"))
        for rec in records:
            writer.writerow((rec.image_id, rec.method, f"{rec.wall_time_ms:.3f}"))


def run_experiment(spec: ExperimentSpec) -> tuple[list[RunRecord], list[RunFailure]]:
    entries = discover_corpus(spec.corpus_dir)
    out = Path(spec.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    records: list[RunRecord] = []
    failures: list[RunFailure] = []
    for image_id, img_path, gt_path, seeds_path in entries:
        for method in spec.methods:
            try:
                if not gt_path.exists():
                    raise FileNotFoundError(f"missing ground truth {gt_path.name}")
                img = load_gray_image(img_path)
                gt = load_mask(gt_path)
                seeds = load_seeds(seeds_path) if seeds_path else None
                t0 = time.perf_counter()
                result = segment_with_method(img, method, seeds, spec.configs,
                                             spec.rng_seed, image_id)
                elapsed_ms = (time.perf_counter() - t0) * 1000.0
                report = metrics_report(img, result.mask, gt)
                save_mask(result.mask, out / f"{image_id}.{method}.mask.png")
                rgb = overlay_rgb(img, result.mask, gt)
                Image.fromarray(rgb).save(out / f"{image_id}.{method}.overlay.png")
                records.append(RunRecord(image_id, method, report,
                                         result.iterations_used, elapsed_ms))
            except Exception as exc:
                failures.append(RunFailure(image_id, method, str(exc)))
    write_results_csv(records, out / "results.csv")
    write_timings_csv(records, out / "timings.csv")
    if failures:
        with open(out / "failures.csv", "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(("image", "method", "error"))
            for f in failures:
                writer.writerow((f.image_id, f.method, f.error))
    return records, failures


# ---------------------------------------------------------------------------
# Statistics over finished runs


@dataclass(frozen=True)
class MetricSummary:
    method: str
    metric: str
    mean: float
    maximum: float
    minimum: float
    std: float
    q1: float
    median: float
    q3: float


@dataclass(frozen=True)
class HypothesisRow:
    """Per-technique aggregate of the per-image spectrum p-values."""

    technique: str
    avg_p: float
    rejected: int
    not_rejected: int
    min_p: float
    max_p: float
    std_p: float


def _sample_std(values: np.ndarray) -> float:
    return float(values.std(ddof=1)) if values.size > 1 else 0.0


def summarize_rows(rows: Sequence[Mapping[str, Any]],
                   alpha: float = DEFAULT_ALPHA
                   ) -> tuple[list[MetricSummary], list[HypothesisRow]]:
    if not rows:
        raise ValueError("no records to summarize")
    methods = sorted({str(r["method"]) for r in rows})
    stats: list[MetricSummary] = []
    tests: list[HypothesisRow] = []
    for method in methods:
        sub = [r for r in rows if r["method"] == method]
        for metric in SUMMARY_METRICS:
            vals = np.array([float(r[metric]) for r in sub], dtype=np.float64)
            q1, med, q3 = np.percentile(vals, [25.0, 50.0, 75.0])
            stats.append(MetricSummary(method, metric,
                                       mean=float(vals.mean()),
                                       maximum=float(vals.max()),
                                       minimum=float(vals.min()),
                                       std=_sample_std(vals),
                                       q1=float(q1), median=float(med),
                                       q3=float(q3)))
        pvals = np.array([float(r["spectrum_p"]) for r in sub], dtype=np.float64)
        rejected = int((pvals < alpha).sum())
        tests.append(HypothesisRow(technique=method,
                                   avg_p=float(pvals.mean()),
                                   rejected=rejected,
                                   not_rejected=int(pvals.size) - rejected,
                                   min_p=float(pvals.min()),
                                   max_p=float(pvals.max()),
                                   std_p=_sample_std(pvals)))
    return stats, tests


def summarize(records: Sequence[RunRecord], alpha: float = DEFAULT_ALPHA
              ) -> tuple[list[MetricSummary], list[HypothesisRow]]:
    return summarize_rows([record_row(r) for r in records], alpha)


def read_results_csv(path: str | Path) -> list[dict[str, str]]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ValueError("no records to summarize")
    missing = set(RESULT_COLUMNS) - set(rows[0])
    if missing:
        raise ValueError(f"records file lacks column(s): {', '.join(sorted(missing))}")
    return rows


def _boxplot_figure(rows: Sequence[Mapping[str, Any]], metrics: Sequence[str],
                    path: Path, title: str) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    methods = sorted({str(r["method"]) for r in rows})
    ncols = 3 if len(metrics) > 4 else len(metrics)
    nrows = -(-len(metrics) // ncols)
    fig, axes = plt.subplots(nrows, ncols, figsize=(4.0 * ncols, 3.2 * nrows),
                             squeeze=False)
    for i, metric in enumerate(metrics):
        ax = axes[i // ncols][i % ncols]
        data = [[float(r[metric]) for r in rows if r["method"] == m] for m in methods]
        ax.boxplot(data, tick_labels=methods)
        ax.set_title(metric)
        ax.tick_params(axis="x", rotation=20)
    for j in range(len(metrics), nrows * ncols):
        axes[j // ncols][j % ncols].axis("off")
    fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def report(records_path: str | Path, out_dir: str | Path,
           alpha: float = DEFAULT_ALPHA) -> list[Path]:
    """Summary CSVs plus boxplot figures rendered next to them."""
    rows = read_results_csv(records_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stats, tests = summarize_rows(rows, alpha)

    written = []
    path = out / "summary.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("method", "metric", "mean", "max", "min", "std",
                         "q1", "median", "q3"))
        for s in stats:
            writer.writerow((s.method, s.metric, f"{s.mean:.6f}", f"{s.maximum:.6f}",
                             f"{s.minimum:.6f}", f"{s.std:.6f}", f"{s.q1:.6f}",
                             f"{s.median:.6f}", f"{s.q3:.6f}"))
    written.append(path)

    path = out / "wilcoxon.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("technique", "avg_p", "rejected", "not_rejected",
                         "min_p", "max_p", "std_p"))
        for t in tests:
            writer.writerow((t.technique, f"{t.avg_p:.6f}", t.rejected,
                             t.not_rejected, f"{t.min_p:.6f}", f"{t.max_p:.6f}",
                             f"{t.std_p:.6f}"))
    written.append(path)

    err_metrics = [m for m in SUMMARY_METRICS if m.startswith("err_")]
    overlap_metrics = [m for m in SUMMARY_METRICS if not m.startswith("err_")]
    path = out / "boxplot_errors.png"
    _boxplot_figure(rows, err_metrics, path, "relative errors by technique")
    written.append(path)
    path = out / "boxplot_overlap.png"
    _boxplot_figure(rows, overlap_metrics, path, "overlap metrics by technique")
    written.append(path)
    return written
