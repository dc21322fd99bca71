"""Compose segmentation and text detection into the regions JSON contract."""

from __future__ import annotations

import json
from pathlib import Path

from .config import SidecarConfig
from .errors import WriteFailure
from .segment import load_image, segment_image
from .textdetect import detect_text


def build_regions_document(image_path, cfg: SidecarConfig = SidecarConfig()) -> dict:
    image = load_image(image_path)
    height, width = image.shape[:2]
    regions = segment_image(image_path, cfg) + detect_text(image_path, cfg)
    return {
        "image": {"width": int(width), "height": int(height)},
        "producer": {
            "model": cfg.producer_name(),
            "points_per_side": cfg.points_per_side,
            "nms_iou": cfg.nms_iou,
            "ocr_confidence_floor": cfg.ocr_confidence_floor,
        },
        "regions": [r.to_json() for r in regions],
    }


def emit_regions(image_path, cfg: SidecarConfig, out_path) -> Path:
    """Write the regions document atomically (temp file + rename)."""
    out_path = Path(out_path)
    doc = build_regions_document(image_path, cfg)
    try:
        out_path.parent.mkdir(parents=True, exist_ok=True)
        tmp = out_path.with_name(out_path.name + ".tmp")
        tmp.write_text(json.dumps(doc, indent=2), "utf-8")
        tmp.replace(out_path)
    except OSError as exc:
        raise WriteFailure(f"cannot write {out_path}: {exc}") from exc
    return out_path
