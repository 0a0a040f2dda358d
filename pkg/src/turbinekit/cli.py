"""Command-line entry point: generate, evaluate, preview, default-config.

Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 parse error.
All randomness flows from the master seed; nothing reads system entropy.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path

from . import __version__
from .config import ConfigError, GeneratorConfig, load_config
from .render import BackgroundLibraryError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_PARSE = 4

BACKGROUND_ENV = "TURBINEKIT_BACKGROUNDS"

log = logging.getLogger("turbinekit")


def _setup_logging(args) -> None:
    level = logging.WARNING if args.quiet else logging.INFO
    if args.json_logs:
        handler = logging.StreamHandler()
        handler.setFormatter(
            logging.Formatter('{"time": "%(asctime)s", "level": "%(levelname)s", "message": "%(message)s"}')
        )
        logging.basicConfig(level=level, handlers=[handler])
    else:
        logging.basicConfig(level=level, format="%(message)s")


def _load_generator_config(args) -> GeneratorConfig:
    config = load_config(args.config) if args.config else GeneratorConfig()
    if args.seed is not None:
        config.master_seed = args.seed
    if args.count is not None:
        config.image_count = args.count
    env_library = os.environ.get(BACKGROUND_ENV)
    if env_library:
        config.background_library = env_library
    return config


def cmd_generate(args) -> int:
    try:
        config = _load_generator_config(args)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG

    from .dataset import write_dataset
    from .pipeline import open_library

    try:
        open_library(config.background_library)  # fail fast on a bad library
    except BackgroundLibraryError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG

    started = time.perf_counter()
    last_report = [0.0]

    def progress(done, total):
        now = time.perf_counter()
        if not args.quiet and (now - last_report[0] > 2.0 or done == total):
            last_report[0] = now
            log.info("generated %d/%d images", done, total)

    try:
        manifest = write_dataset(
            config,
            args.out,
            workers=args.workers,
            progress=progress,
        )
    except OSError as exc:
        log.error("i/o error: %s", exc)
        return EXIT_IO
    elapsed = time.perf_counter() - started
    count = manifest["image_count"]
    rate = count / elapsed if elapsed > 0 else float("inf")
    log.info(
        "wrote %d images (%d train / %d val) to %s in %.1fs (%.1f img/s)",
        count,
        manifest["counts"]["train"],
        manifest["counts"]["val"],
        args.out,
        elapsed,
        rate,
    )
    return EXIT_OK


def cmd_evaluate(args) -> int:
    from .metrics import load_ground_truth_dir, load_prediction_dir, map_report

    image_size = tuple(args.image_size)
    manifest_path = _find_manifest(args.gt)
    if manifest_path is not None:
        try:
            with open(manifest_path) as fh:
                image_size = tuple(json.load(fh)["image_size"])
        except (OSError, ValueError, KeyError):
            pass  # fall back to the flag

    try:
        gts = load_ground_truth_dir(args.gt, image_size)
        dets = load_prediction_dir(args.pred, image_size)
    except FileNotFoundError as exc:
        log.error("i/o error: %s", exc)
        return EXIT_IO
    except ValueError as exc:
        log.error("parse error: %s", exc)
        return EXIT_PARSE

    report = map_report(dets, gts, oks_sigmas=args.oks_sigma)
    if args.report:
        try:
            Path(args.report).parent.mkdir(parents=True, exist_ok=True)
            Path(args.report).write_text(report.to_json())
        except OSError as exc:
            log.error("i/o error: %s", exc)
            return EXIT_IO

    print(f"{'':14s}{'mAP50':>10s}{'mAP50-95':>12s}")
    print(f"{'Box':14s}{report.map50_box:10.4f}{report.map50_95_box:12.4f}")
    print(f"{'Pose':14s}{report.map50_pose:10.4f}{report.map50_95_pose:12.4f}")
    return EXIT_OK


def _find_manifest(gt_dir):
    p = Path(gt_dir)
    for candidate in (p, p.parent, p.parent.parent):
        m = candidate / "manifest.json"
        if m.is_file():
            return m
    return None


def cmd_preview(args) -> int:
    from .preview import preview_dataset

    if not Path(args.dataset).is_dir():
        log.error("i/o error: dataset directory %s not found", args.dataset)
        return EXIT_IO
    try:
        produced = preview_dataset(args.dataset, args.n, args.out)
    except ValueError as exc:
        log.error("parse error: %s", exc)
        return EXIT_PARSE
    except OSError as exc:
        log.error("i/o error: %s", exc)
        return EXIT_IO
    log.info("wrote %d overlay image(s) to %s", produced, args.out)
    return EXIT_OK


def cmd_default_config(args) -> int:
    print(GeneratorConfig().to_json(), end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="turbinekit",
        description="Generate and evaluate synthetic wind-turbine keypoint datasets.",
    )
    parser.add_argument("--version", action="version", version=f"turbinekit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write an annotated dataset")
    gen.add_argument("--config", type=Path, default=None, help="generator config JSON")
    gen.add_argument("--seed", type=int, default=None, help="master seed override")
    gen.add_argument("--count", type=int, default=None, help="image count override")
    gen.add_argument("--out", type=Path, required=True, help="output dataset directory")
    gen.add_argument(
        "--workers", type=int, default=os.cpu_count() or 1,
        help="parallel workers (output is identical for any value)",
    )
    gen.set_defaults(func=cmd_generate)

    ev = sub.add_parser("evaluate", help="score predictions against ground truth")
    ev.add_argument("--gt", type=Path, required=True, help="ground-truth label directory")
    ev.add_argument("--pred", type=Path, required=True, help="prediction label directory")
    ev.add_argument("--report", type=Path, default=None, help="write the JSON report here")
    ev.add_argument("--image-size", type=int, nargs=2, default=(1280, 720), metavar=("W", "H"))
    ev.add_argument("--oks-sigma", type=float, default=0.1, help="per-keypoint OKS constant")
    ev.set_defaults(func=cmd_evaluate)

    pv = sub.add_parser("preview", help="draw annotation overlays for inspection")
    pv.add_argument("--dataset", type=Path, required=True)
    pv.add_argument("--n", type=int, default=8)
    pv.add_argument("--out", type=Path, required=True)
    pv.set_defaults(func=cmd_preview)

    dc = sub.add_parser("default-config", help="print the default generator config")
    dc.set_defaults(func=cmd_default_config)

    for p in (gen, ev, pv, dc):
        p.add_argument("--quiet", action="store_true", help="suppress progress output")
        p.add_argument("--json-logs", action="store_true", help="machine-readable log lines")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    _setup_logging(args)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
