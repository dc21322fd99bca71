from __future__ import annotations

from dataclasses import dataclass

DEFAULT_POINTS_PER_SIDE = 32
DEFAULT_NMS_IOU = 0.6
DEFAULT_OCR_FLOOR = 0.5


@dataclass(frozen=True)
class SidecarConfig:
    """Extraction settings; the defaults are the reference evaluation setup."""

    points_per_side: int = DEFAULT_POINTS_PER_SIDE
    nms_iou: float = DEFAULT_NMS_IOU
    ocr_confidence_floor: float = DEFAULT_OCR_FLOOR
    device: str = "cpu"
    segmenter: str = "grid-flood"
    text_detector: str = "contrast-text"

    def producer_name(self) -> str:
        return f"{self.segmenter}+{self.text_detector}"
