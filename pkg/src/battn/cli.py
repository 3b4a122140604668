"""Command-line front end.

    battn map --landmarks F --width W --height H --out-dir D [...]
    battn hull --landmarks F
    battn eval --task {category,attribute,landmark} --pred P --gt G [...]
    battn transform --landmarks F --bboxes B --size S

Exit codes: 0 success, 2 I/O failure, 3 parse failure, 4 data mismatch.
Status lines go to stdout, diagnostics to stderr.
"""
from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path, PurePosixPath

import numpy as np

from . import ingest
from .attention import AttentionConfig, LandmarkSet, attention_map, usable_pixels
from .geometry import convex_boundary
from .losses import HeatmapTargetConfig, LossConfig, asym_weighted_bce, heatmap_target, mse_loss, softmax_cross_entropy
from .metrics import IdMismatchError, match, normalized_error, topk_accuracy, topk_recall
from .raster import BlurConfig, encode_pgm

EXIT_OK = 0
EXIT_IO = 2
EXIT_PARSE = 3
EXIT_MISMATCH = 4


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def default_threads() -> int:
    env = os.environ.get("BATTN_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise CliError(EXIT_PARSE, f"BATTN_THREADS must be a positive integer, got {env!r}") from None
        if n < 1:
            raise CliError(EXIT_PARSE, f"BATTN_THREADS must be a positive integer, got {env!r}")
        return n
    return os.cpu_count() or 1


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            return fh.read()
    except (OSError, UnicodeDecodeError) as e:
        raise CliError(EXIT_IO, f"cannot read {path}: {e}") from None


def _parse(fn, path: str, *args, **kwargs):
    text = _read(path)
    try:
        return fn(text, *args, **kwargs)
    except ValueError as e:
        raise CliError(EXIT_PARSE, f"{path}: {e}") from None


def _sigma(text: str):
    if text == "auto":
        return "auto"
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or 'auto', got {text!r}") from None
    if not v >= 0:
        raise argparse.ArgumentTypeError("sigma must be >= 0")
    return v


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _k_list(text: str) -> list[int]:
    try:
        ks = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not ks or any(k < 1 for k in ks):
        raise argparse.ArgumentTypeError("k values must be >= 1")
    return ks


def _output_path(out_dir: Path, image_id: str) -> Path:
    rel = PurePosixPath(image_id)
    if rel.is_absolute() or ".." in rel.parts or not rel.parts:
        raise CliError(EXIT_PARSE, f"image id {image_id!r} cannot be used as an output path")
    return out_dir.joinpath(*rel.parts).with_name(rel.name + ".pgm")


# --- commands ----------------------------------------------------------------

def render_one(lm: LandmarkSet, width: int, height: int, cfg: AttentionConfig) -> tuple[bytes, str]:
    result = attention_map(lm, width, height, cfg)
    status = f"OK {lm.image_id}" if result.fallback is None else f"FALLBACK {lm.image_id} {result.fallback}"
    return encode_pgm(result.grid), status


def cmd_map(args) -> int:
    sets = _parse(ingest.parse_landmarks, args.landmarks)
    try:
        cfg = AttentionConfig(
            include_occluded=args.include_occluded,
            blur=BlurConfig(args.sigma),
            floor=args.floor,
            fallback_sigma=args.fallback_sigma,
        )
    except ValueError as e:
        raise CliError(EXIT_PARSE, str(e)) from None
    out_dir = Path(args.out_dir)
    paths = [_output_path(out_dir, s.image_id) for s in sets]
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        for p in {p.parent for p in paths}:
            p.mkdir(parents=True, exist_ok=True)
        if not os.access(out_dir, os.W_OK):
            raise PermissionError(f"{out_dir} is not writable")
    except OSError as e:
        raise CliError(EXIT_IO, f"cannot prepare output directory: {e}") from None

    threads = args.threads or default_threads()

    def work(i: int) -> str:
        data, status = render_one(sets[i], args.width, args.height, cfg)
        with open(paths[i], "wb") as fh:
            fh.write(data)
        return status

    try:
        if threads == 1:
            statuses = [work(i) for i in range(len(sets))]
        else:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                statuses = list(pool.map(work, range(len(sets))))
    except OSError as e:
        raise CliError(EXIT_IO, f"cannot write attention map: {e}") from None
    for line in statuses:
        print(line)
    return EXIT_OK


def format_hull(lm: LandmarkSet, include_occluded: bool = True) -> str:
    pts = usable_pixels(lm, include_occluded)
    if not pts:
        return f"{lm.image_id} 0 dropped=0"
    b = convex_boundary(pts)
    coords = " ".join(f"{v.x} {v.y}" for v in b.vertices)
    return f"{lm.image_id} {len(b.vertices)} {coords} dropped={len(b.dropped)}"


def cmd_hull(args) -> int:
    sets = _parse(ingest.parse_landmarks, args.landmarks)
    for s in sets:
        print(format_hull(s, args.include_occluded))
    return EXIT_OK


def _eval_category(args) -> list[str]:
    n_classes, truths = _parse(ingest.parse_categories, args.gt)
    records = _parse(ingest.parse_scores, args.pred, n_classes, kind="category")
    lines = [f"top-{k} {100.0 * topk_accuracy(records, truths, k):.2f}" for k in args.topk]
    if args.loss:
        losses = [softmax_cross_entropy(r.category_scores, t.category)[0] for r, t in match(records, truths)]
        lines.append(f"CE {np.mean(losses):.6f}")
    return lines


def _eval_attribute(args) -> list[str]:
    n_attrs, truths = _parse(ingest.parse_attributes, args.gt)
    records = _parse(ingest.parse_scores, args.pred, n_attrs, kind="attribute")
    lines = [f"top-{k} {100.0 * topk_recall(records, truths, k, args.average):.2f}" for k in args.topk]
    if args.loss:
        cfg = LossConfig(args.pos_weight)
        losses = []
        for r, t in match(records, truths):
            y = np.zeros(n_attrs)
            y[list(t.attributes)] = 1.0
            losses.append(asym_weighted_bce(r.attribute_scores, y, cfg)[0])
        lines.append(f"BCE-W {np.mean(losses):.6f}")
    return lines


def _eval_landmark(args) -> list[str]:
    gt_sets = _parse(ingest.parse_landmarks, args.gt)
    pred_sets = _parse(ingest.parse_landmarks, args.pred)
    if args.coords == "original":
        if not args.sizes:
            raise CliError(EXIT_PARSE, "--coords original needs --sizes with per-image dimensions")
        sizes = _parse(ingest.parse_sizes, args.sizes)
        missing = [s.image_id for s in gt_sets if s.image_id not in sizes]
        if missing:
            raise IdMismatchError(missing)
    else:
        sizes = {s.image_id: (float(args.width), float(args.height)) for s in gt_sets}
    truths = ingest.landmark_truths(gt_sets, sizes)
    records = ingest.landmark_records(pred_sets)
    lines = [f"NE {normalized_error(records, truths, args.visible_only):.4f}"]
    if args.loss:
        hm = HeatmapTargetConfig()
        losses = []
        for rec, gt in match(records, truths):
            sx, sy = hm.out_width / gt.image_width, hm.out_height / gt.image_height
            target = heatmap_target(_scaled(gt.landmarks, sx, sy), hm)
            pred_pts = tuple(
                (x, y, p.visibility) for (x, y), p in zip(rec.predicted_landmarks, gt.landmarks.points)
            )
            pred = heatmap_target(_scaled(LandmarkSet(rec.image_id, pred_pts), sx, sy), hm)
            losses.append(mse_loss(pred, target)[0])
        lines.append(f"MSE {np.mean(losses):.6g}")
    return lines


def _scaled(lm: LandmarkSet, sx: float, sy: float) -> LandmarkSet:
    return LandmarkSet(lm.image_id, tuple((p.x * sx, p.y * sy, p.visibility) for p in lm.points))


def cmd_eval(args) -> int:
    if args.task == "landmark" and not args.coords:
        raise CliError(EXIT_PARSE, "--task landmark needs --coords crop or --coords original")
    handler = {"category": _eval_category, "attribute": _eval_attribute, "landmark": _eval_landmark}[args.task]
    try:
        lines = handler(args)
    except IdMismatchError as e:
        shown = "\n".join(f"  {i}" for i in e.offenders[:10])
        raise CliError(EXIT_MISMATCH, f"{len(e.offenders)} mismatched image ids, first offenders:\n{shown}") from None
    except ValueError as e:
        raise CliError(EXIT_MISMATCH, str(e)) from None
    for line in lines:
        print(line)
    return EXIT_OK


def cmd_transform(args) -> int:
    sets = _parse(ingest.parse_landmarks, args.landmarks)
    boxes = _parse(ingest.parse_bboxes, args.bboxes)
    missing = [s.image_id for s in sets if s.image_id not in boxes]
    if missing:
        raise CliError(EXIT_MISMATCH, "no bounding box for: " + ", ".join(missing[:10]))
    moved = []
    for s in sets:
        t, outside = ingest.transform_landmarks(s, boxes[s.image_id], args.size)
        if outside:
            print(f"OUTSIDE {s.image_id} " + ",".join(map(str, outside)), file=sys.stderr)
        moved.append(t)
    cap = max((len(s.points) for s in sets), default=0)
    text = ingest.format_landmarks(moved, cap)
    if args.out:
        try:
            Path(args.out).write_text(text, encoding="utf-8")
        except OSError as e:
            raise CliError(EXIT_IO, f"cannot write {args.out}: {e}") from None
    else:
        sys.stdout.write(text)
    return EXIT_OK


# --- argument parsing --------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="battn", description="Landmark boundary attention maps and evaluation.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("map", help="render one PGM attention map per landmark row")
    p.add_argument("--landmarks", required=True)
    p.add_argument("--width", type=_positive_int, required=True)
    p.add_argument("--height", type=_positive_int, required=True)
    p.add_argument("--sigma", type=_sigma, default="auto", help="blur sigma in pixels, or 'auto'")
    p.add_argument("--floor", type=float, default=0.0)
    p.add_argument("--fallback-sigma", type=float, default=8.0)
    p.add_argument("--include-occluded", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--threads", type=_positive_int, default=None)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("hull", help="dump the convex boundary of each landmark row")
    p.add_argument("--landmarks", required=True)
    p.add_argument("--include-occluded", action=argparse.BooleanOptionalAction, default=True)
    p.set_defaults(func=cmd_hull)

    p = sub.add_parser("eval", help="score a prediction file against ground truth")
    p.add_argument("--task", choices=["category", "attribute", "landmark"], required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--topk", type=_k_list, default=[3, 5])
    p.add_argument("--average", choices=["micro", "macro"], default="micro")
    p.add_argument("--visible-only", action="store_true")
    p.add_argument("--coords", choices=["crop", "original"], default=None,
                   help="landmark coordinate space: crop uses --width/--height, original uses --sizes")
    p.add_argument("--width", type=_positive_int, default=256)
    p.add_argument("--height", type=_positive_int, default=256)
    p.add_argument("--sizes")
    p.add_argument("--loss", action="store_true", help="also report the training loss for the task")
    p.add_argument("--pos-weight", type=float, default=332.0)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("transform", help="map landmarks into bbox-cropped, resized coordinates")
    p.add_argument("--landmarks", required=True)
    p.add_argument("--bboxes", required=True)
    p.add_argument("--size", type=_positive_int, default=256)
    p.add_argument("--out")
    p.set_defaults(func=cmd_transform)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as e:
        print(f"battn: {e}", file=sys.stderr)
        return e.code


if __name__ == "__main__":
    sys.exit(main())
