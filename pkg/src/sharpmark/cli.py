"""Command-line interface: ``sharpmark {score,map,sweep,eval,aggregate}``."""
from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

import numpy as np

from .evaluation import (
    ManifestError,
    aggregate_reports,
    evaluate_manifest,
    fmt,
    ordered_map,
    read_report_csv,
    worker_count,
    write_per_image_csv,
    write_report_csv,
    write_summary_csv,
)
from .filters import gaussian_blur
from .image import load_image, write_pgm
from .sharpness import Backend, GrayMode, SharpnessConfig, score_and_maps, sharpness_score

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_PARTIAL = 2
EXIT_BAD_MANIFEST = 3

log = logging.getLogger("sharpmark")


def _float_list(text: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _metric_flags(alpha_list: bool = False, backend: bool = True) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("metric parameters")
    if backend:
        g.add_argument("--backend", choices=[b.value for b in Backend], default="hpf",
                       help="high-frequency stimulus: Gaussian high-pass or Haar UWT diagonal")
    if alpha_list:
        g.add_argument("--alpha", type=_float_list, default=[2.0],
                       help="stimulus exponent; a comma list runs one evaluation per value")
    else:
        g.add_argument("--alpha", type=float, default=2.0, help="stimulus exponent")
    g.add_argument("--block", type=int, default=7, help="odd block size for means and local std")
    g.add_argument("--epsilon", type=float, default=1e-4, help="numerical stabiliser")
    g.add_argument("--border", type=int, default=None, help="border crop width (default: block)")
    g.add_argument("--gray-mode", choices=[m.value for m in GrayMode], default="single",
                   help="total stimulus for grayscale input")
    g.add_argument("--out", type=Path, default=None, help="output directory")
    return p


def _config(args, alpha: float | None = None, backend: str | None = None) -> SharpnessConfig:
    return SharpnessConfig(
        alpha=args.alpha if alpha is None else alpha,
        block=args.block,
        epsilon=args.epsilon,
        backend=backend or getattr(args, "backend", "hpf"),
        border=args.border,
        gray_mode=args.gray_mode,
    )


def _out_dir(args) -> Path:
    out = args.out if args.out is not None else Path(".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_score(args) -> int:
    cfg = _config(args)

    def run(path):
        try:
            return sharpness_score(load_image(path), cfg), None
        except (OSError, ValueError) as exc:
            return None, exc

    status = EXIT_OK
    for path, (score, err) in zip(args.paths, ordered_map(run, args.paths, worker_count())):
        if err is not None:
            print(f"sharpmark: {path}: {err}", file=sys.stderr)
            status = EXIT_PARTIAL
        else:
            print(f"{path}\t{fmt(score)}\t{cfg.backend.value}")
    return status


def cmd_map(args) -> int:
    cfg = _config(args)
    img = load_image(args.path)
    result = score_and_maps(img, cfg)
    out = _out_dir(args)
    stem = Path(args.path).stem
    write_pgm(out / f"{stem}.smap.pgm", result.bs_map)
    write_pgm(out / f"{stem}.lbsmap.pgm", result.lbs_map)
    print(f"{args.path}\t{fmt(result.score)}\t{cfg.backend.value}")
    return EXIT_OK


def sweep_rows(img, sigmas, cfg_hpf: SharpnessConfig, cfg_uwt: SharpnessConfig) -> list[list[str]]:
    """Blur the pristine image once per sigma and score it with both backends."""

    def run(sigma):
        blurred = img.map_planes(lambda p: np.clip(gaussian_blur(p, sigma), 0.0, 1.0))
        return [fmt(sigma), fmt(sharpness_score(blurred, cfg_hpf)), fmt(sharpness_score(blurred, cfg_uwt))]

    return ordered_map(run, list(sigmas), worker_count())


def cmd_sweep(args) -> int:
    img = load_image(args.path)
    rows = sweep_rows(img, args.sigmas, _config(args, backend="hpf"), _config(args, backend="uwt"))
    if args.out is None:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(["sigma", "qs_hpf", "qs_uwt"])
        writer.writerows(rows)
    else:
        path = _out_dir(args) / f"{Path(args.path).stem}.sweep.csv"
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["sigma", "qs_hpf", "qs_uwt"])
            writer.writerows(rows)
    return EXIT_OK


def cmd_eval(args) -> int:
    out = _out_dir(args)
    stem = Path(args.manifest).stem
    alphas = args.alpha
    sweep = len(alphas) > 1
    reports = []
    for alpha in alphas:
        cfg = _config(args, alpha=alpha)
        report = evaluate_manifest(args.manifest, cfg)
        suffix = f".alpha{fmt(alpha)}" if sweep else ""
        write_per_image_csv(out / f"{stem}{suffix}.per_image.csv", report)
        reports.append(report)
    write_report_csv(out / f"{stem}.report.csv", reports, alphas if sweep else None)
    for alpha, report in zip(alphas, reports):
        prefix = f"alpha={fmt(alpha)}\t" if sweep else ""
        print(f"{prefix}n={report.n}\tsrocc={fmt(report.srocc)}\tkrocc={fmt(report.krocc)}"
              f"\tplcc={fmt(report.plcc)}\trmse={fmt(report.rmse)}")
    skipped = reports[0].skipped
    for path in skipped:
        print(f"sharpmark: skipped unreadable image {path}", file=sys.stderr)
    return EXIT_PARTIAL if skipped else EXIT_OK


def cmd_aggregate(args) -> int:
    rows = []
    for path in args.reports:
        rows.extend(read_report_csv(path))
    if args.weights is not None:
        if len(args.weights) != len(rows):
            print(f"sharpmark: {len(args.weights)} weights given for {len(rows)} report rows",
                  file=sys.stderr)
            return EXIT_ERROR
        weights = args.weights
    else:
        weights = [r.n for r in rows]
    summary = aggregate_reports(list(zip(rows, weights)))
    if args.out is None:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(["summary", "srocc", "krocc", "plcc", "rmse"])
        writer.writerows(r.row() for r in summary)
    else:
        write_summary_csv(_out_dir(args) / "summary.csv", summary)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sharpmark", description="No-reference perceptual sharpness scoring and evaluation.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("score", parents=[_metric_flags()], help="print the sharpness score of images")
    p.add_argument("paths", nargs="+")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("map", parents=[_metric_flags()], help="write normalised sharpness maps as PGM")
    p.add_argument("path")
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("sweep", parents=[_metric_flags(backend=False)],
                       help="score Gaussian-blurred copies of an image with both backends")
    p.add_argument("path")
    p.add_argument("--sigmas", type=_float_list, default=[0.0, 0.5, 1.0, 2.0, 4.0],
                   help="comma-separated blur standard deviations")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("eval", parents=[_metric_flags(alpha_list=True)],
                       help="correlate scores with the subjective ratings of a manifest")
    p.add_argument("manifest")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("aggregate", help="direct and weighted averages of report CSVs")
    p.add_argument("reports", nargs="+")
    p.add_argument("--weights", type=_int_list, default=None,
                   help="one positive weight per report row (default: each row's n)")
    p.add_argument("--out", type=Path, default=None, help="output directory")
    p.set_defaults(func=cmd_aggregate)
    return parser


def _validate(parser, args) -> None:
    if hasattr(args, "block"):
        alphas = args.alpha if isinstance(args.alpha, list) else [args.alpha]
        try:
            for alpha in alphas:
                _config(args, alpha=alpha)
        except ValueError as exc:
            parser.error(str(exc))
    if getattr(args, "sigmas", None) is not None and any(s < 0 for s in args.sigmas):
        parser.error("--sigmas must be non-negative")
    if getattr(args, "weights", None) is not None and any(w <= 0 for w in args.weights):
        parser.error("--weights must be positive")
    try:
        worker_count()
    except ValueError as exc:
        parser.error(str(exc))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _validate(parser, args)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="sharpmark: %(message)s")
    try:
        return args.func(args)
    except ManifestError as exc:
        print(f"sharpmark: {exc}", file=sys.stderr)
        return EXIT_BAD_MANIFEST
    except (OSError, ValueError) as exc:
        print(f"sharpmark: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
