"""Command-line front end: segment, batch, report, serve."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import config as cfg
from .harness import ExperimentSpec, report, run_experiment, segment_with_method
from .imgio import load_gray_image, load_seeds, save_mask


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    blocks = json.loads(Path(path).read_text())
    if not isinstance(blocks, dict):
        raise ValueError("config file must hold a JSON object of parameter blocks")
    return blocks


def _cmd_segment(args: argparse.Namespace) -> int:
    img = load_gray_image(args.image)
    seeds = load_seeds(args.seeds) if args.seeds else None
    configs = _load_config(args.config)
    result = segment_with_method(img, args.method, seeds, configs)
    save_mask(result.mask, args.out)
    status = "converged" if result.converged else "iteration limit hit"
    print(f"{args.method}: {result.iterations_used} iterations, {status}, "
          f"mask -> {args.out}")
    return 0


def _cmd_batch(args: argparse.Namespace) -> int:
    spec = ExperimentSpec.from_json(args.spec)
    records, failures = run_experiment(spec)
    print(f"{len(records)} run(s) completed, {len(failures)} failed, "
          f"results in {spec.output_dir}")
    for f in failures:
        print(f"  failed {f.image_id} [{f.method}]: {f.error}", file=sys.stderr)
    if failures and records:
        return 2
    return 1 if failures else 0


def _cmd_report(args: argparse.Namespace) -> int:
    written = report(args.records, args.out)
    for path in written:
        print(f"wrote {path}")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    from .server import serve
    serve(port=args.port, host=args.host, static_dir=args.static)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="growseg",
                                     description="seeded segmentation toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("segment", help="segment one image")
    p.add_argument("--method", required=True, choices=cfg.METHOD_NAMES)
    p.add_argument("--image", required=True)
    p.add_argument("--seeds", help="seed file (json or csv); optional for ssgc")
    p.add_argument("--out", required=True, help="output mask path (png or pgm)")
    p.add_argument("--config", help="json file with parameter blocks")
    p.set_defaults(func=_cmd_segment)

    p = sub.add_parser("batch", help="run an experiment spec over a corpus")
    p.add_argument("--spec", required=True, help="experiment spec json")
    p.set_defaults(func=_cmd_batch)

    p = sub.add_parser("report", help="summarize a results.csv into stats and figures")
    p.add_argument("--records", required=True, help="results.csv from a batch run")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--static", help="directory of UI files to serve at /")
    p.set_defaults(func=_cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
