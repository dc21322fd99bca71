"""Promptable segmentation backends.

The built-in ``grid-flood`` backend seeds a uniform point grid over the image
and grows one region per uncovered seed with fixed-range flood fill, then
prunes near-duplicates with mask NMS. It is fully deterministic for a given
image, which the heavier model-based backends cannot generally promise across
hardware; those plug in through the same interface when their packages are
installed.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import cv2
import numpy as np

from .config import SidecarConfig
from .errors import ModelLoadFailure, UnreadableImage

FLOOD_TOLERANCE = 12


@dataclass
class RawRegion:
    kind: str
    bbox: tuple[int, int, int, int]
    area: int
    score: float
    mask: Optional[np.ndarray] = None

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "bbox": [int(v) for v in self.bbox],
            "area": int(self.area),
            "score": round(float(self.score), 6),
        }


def load_image(path) -> np.ndarray:
    image = cv2.imread(str(path), cv2.IMREAD_COLOR)
    if image is None or image.size == 0:
        raise UnreadableImage(f"cannot read image {path}")
    return image


def _seed_points(width: int, height: int, per_side: int):
    seen = set()
    for i in range(per_side):
        for j in range(per_side):
            x = min(width - 1, int((j + 0.5) * width / per_side))
            y = min(height - 1, int((i + 0.5) * height / per_side))
            if (x, y) not in seen:
                seen.add((x, y))
                yield x, y


def _flood_mask(image: np.ndarray, seed: tuple[int, int]) -> np.ndarray:
    h, w = image.shape[:2]
    mask = np.zeros((h + 2, w + 2), np.uint8)
    flags = 4 | cv2.FLOODFILL_MASK_ONLY | cv2.FLOODFILL_FIXED_RANGE | (255 << 8)
    tol = (FLOOD_TOLERANCE,) * 3
    cv2.floodFill(image, mask, seed, 0, loDiff=tol, upDiff=tol, flags=flags)
    return mask[1:-1, 1:-1] > 0


def _uniformity_score(gray: np.ndarray, mask: np.ndarray) -> float:
    values = gray[mask]
    if values.size == 0:
        return 0.0
    return float(max(0.0, 1.0 - float(values.std()) / 64.0))


def _mask_iou(a: RawRegion, b: RawRegion) -> float:
    ax, ay, aw, ah = a.bbox
    bx, by, bw, bh = b.bbox
    x0, x1 = max(ax, bx), min(ax + aw, bx + bw)
    y0, y1 = max(ay, by), min(ay + ah, by + bh)
    if x0 >= x1 or y0 >= y1:
        return 0.0
    inter = int(
        np.logical_and(
            a.mask[y0 - ay : y1 - ay, x0 - ax : x1 - ax],
            b.mask[y0 - by : y1 - by, x0 - bx : x1 - bx],
        ).sum()
    )
    union = a.area + b.area - inter
    return inter / union if union else 0.0


def mask_nms(regions: list[RawRegion], iou_threshold: float) -> list[RawRegion]:
    """Greedy suppression of near-duplicate masks, highest score first."""
    ordered = sorted(regions, key=lambda r: (-r.score, -r.area, r.bbox))
    kept: list[RawRegion] = []
    for candidate in ordered:
        if all(_mask_iou(candidate, k) < iou_threshold for k in kept):
            kept.append(candidate)
    return kept


def _grid_flood_segment(image: np.ndarray, cfg: SidecarConfig) -> list[RawRegion]:
    h, w = image.shape[:2]
    gray = cv2.cvtColor(image, cv2.COLOR_BGR2GRAY)
    covered = np.zeros((h, w), bool)
    regions: list[RawRegion] = []
    for x, y in _seed_points(w, h, cfg.points_per_side):
        if covered[y, x]:
            continue
        mask = _flood_mask(image, (x, y))
        area = int(mask.sum())
        if area == 0:
            continue
        covered |= mask
        xs = np.any(mask, axis=0)
        ys = np.any(mask, axis=1)
        x0, x1 = int(np.argmax(xs)), int(w - np.argmax(xs[::-1]))
        y0, y1 = int(np.argmax(ys)), int(h - np.argmax(ys[::-1]))
        regions.append(
            RawRegion(
                kind="mask",
                bbox=(x0, y0, x1 - x0, y1 - y0),
                area=area,
                score=_uniformity_score(gray, mask),
                mask=mask[y0:y1, x0:x1],
            )
        )
    return mask_nms(regions, cfg.nms_iou)


def _sam2_segment(image: np.ndarray, cfg: SidecarConfig) -> list[RawRegion]:
    try:
        import sam2  # noqa: F401
    except ImportError as exc:
        raise ModelLoadFailure(
            "the 'sam2' package (and its weights) are not installed; "
            "use the grid-flood backend or install the model"
        ) from exc
    raise ModelLoadFailure("sam2 backend wiring requires local model weights")


SEGMENTERS = {
    "grid-flood": _grid_flood_segment,
    "sam2": _sam2_segment,
}


def segment_image(path, cfg: SidecarConfig = SidecarConfig()) -> list[RawRegion]:
    """One region per surviving mask after NMS; area is the mask pixel count."""
    if cfg.segmenter not in SEGMENTERS:
        raise ModelLoadFailure(f"unknown segmenter {cfg.segmenter!r}")
    image = load_image(path)
    return SEGMENTERS[cfg.segmenter](image, cfg)
