from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import SidecarConfig
from .emit import emit_regions
from .errors import SidecarError


def _config(args) -> SidecarConfig:
    return SidecarConfig(
        points_per_side=args.points,
        nms_iou=args.nms,
        ocr_confidence_floor=args.ocr_floor,
    )


def _add_model_flags(p):
    p.add_argument("--points", type=int, default=32, help="seed grid points per side")
    p.add_argument("--nms", type=float, default=0.6, help="mask NMS IoU threshold")
    p.add_argument("--ocr-floor", type=float, default=0.5, help="text confidence floor")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sidecar",
        description="Extract segmentation masks and text boxes into regions JSON.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("emit", help="process one image")
    p.add_argument("--image", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    _add_model_flags(p)

    p = sub.add_parser("batch", help="process an NDJSON list of image paths")
    p.add_argument("--list", type=Path, required=True, dest="list_path")
    p.add_argument("--out-dir", type=Path, required=True)
    _add_model_flags(p)

    return parser


def _cmd_emit(args) -> int:
    path = emit_regions(args.image, _config(args), args.out)
    print(str(path))
    return 0


def _cmd_batch(args) -> int:
    cfg = _config(args)
    failures = 0
    for line_no, line in enumerate(args.list_path.read_text("utf-8").splitlines(), 1):
        if not line.strip():
            continue
        entry = json.loads(line)
        image = Path(entry["image"] if isinstance(entry, dict) else entry)
        out = args.out_dir / f"{image.stem}.regions.json"
        try:
            emit_regions(image, cfg, out)
            print(str(out))
        except SidecarError as exc:
            failures += 1
            print(f"error: line {line_no} ({image}): {exc}", file=sys.stderr)
    return 0 if failures == 0 else 3


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "emit":
            return _cmd_emit(args)
        return _cmd_batch(args)
    except (SidecarError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
