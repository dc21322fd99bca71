"""Text-box detection backends.

The built-in ``contrast-text`` detector binarizes with Otsu, closes gaps
horizontally so glyphs fuse into line boxes, and scores each box by the
ink/background contrast; boxes below the confidence floor are dropped.
"""

from __future__ import annotations

import cv2
import numpy as np

from .config import SidecarConfig
from .errors import ModelLoadFailure
from .segment import RawRegion, load_image

MIN_BOX_HEIGHT = 4
MIN_BOX_WIDTH = 6


def _contrast_text(image: np.ndarray, cfg: SidecarConfig) -> list[RawRegion]:
    gray = cv2.cvtColor(image, cv2.COLOR_BGR2GRAY)
    h, w = gray.shape
    _, binary = cv2.threshold(gray, 0, 255, cv2.THRESH_BINARY | cv2.THRESH_OTSU)
    ink = binary == 0
    # Ink is the minority class; a (near-)constant image has no text.
    total = h * w
    ink_count = int(ink.sum())
    if ink_count == 0 or ink_count == total:
        return []
    if ink_count > total - ink_count:
        ink = ~ink
        ink_count = total - ink_count

    kernel_w = max(3, w // 64)
    kernel = cv2.getStructuringElement(cv2.MORPH_RECT, (kernel_w, 3))
    joined = cv2.morphologyEx(ink.astype(np.uint8) * 255, cv2.MORPH_CLOSE, kernel)
    count, _, stats, _ = cv2.connectedComponentsWithStats(joined, connectivity=8)

    regions: list[RawRegion] = []
    for label in range(1, count):
        x, y, bw, bh, _ = stats[label]
        if bh < MIN_BOX_HEIGHT or bw < MIN_BOX_WIDTH:
            continue
        if bh > h // 2 or bw / bh < 1.2:
            continue
        window_ink = ink[y : y + bh, x : x + bw]
        density = float(window_ink.mean())
        if not 0.05 <= density <= 0.95:
            continue
        window_gray = gray[y : y + bh, x : x + bw]
        ink_mean = float(window_gray[window_ink].mean())
        bg = window_gray[~window_ink]
        bg_mean = float(bg.mean()) if bg.size else float(gray.mean())
        score = min(1.0, abs(bg_mean - ink_mean) / 255.0)
        regions.append(
            RawRegion(
                kind="text",
                bbox=(int(x), int(y), int(bw), int(bh)),
                area=int(bw) * int(bh),
                score=score,
            )
        )
    return [r for r in regions if r.score >= cfg.ocr_confidence_floor]


def _paddleocr_text(image: np.ndarray, cfg: SidecarConfig) -> list[RawRegion]:
    try:
        import paddleocr  # noqa: F401
    except ImportError as exc:
        raise ModelLoadFailure(
            "the 'paddleocr' package is not installed; "
            "use the contrast-text backend or install the model"
        ) from exc
    raise ModelLoadFailure("paddleocr backend wiring requires local model weights")


TEXT_DETECTORS = {
    "contrast-text": _contrast_text,
    "paddleocr": _paddleocr_text,
}


def detect_text(path, cfg: SidecarConfig = SidecarConfig()) -> list[RawRegion]:
    """Text boxes with confidence at or above the configured floor."""
    if cfg.text_detector not in TEXT_DETECTORS:
        raise ModelLoadFailure(f"unknown text detector {cfg.text_detector!r}")
    image = load_image(path)
    return TEXT_DETECTORS[cfg.text_detector](image, cfg)
