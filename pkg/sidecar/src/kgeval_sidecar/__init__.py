"""Vision sidecar: emits the regions JSON documents consumed by kgeval."""

from .config import SidecarConfig
from .emit import build_regions_document, emit_regions
from .errors import ModelLoadFailure, SidecarError, UnreadableImage, WriteFailure
from .segment import RawRegion, mask_nms, segment_image
from .textdetect import detect_text

__version__ = "0.1.0"

__all__ = [
    "ModelLoadFailure",
    "RawRegion",
    "SidecarConfig",
    "SidecarError",
    "UnreadableImage",
    "WriteFailure",
    "build_regions_document",
    "detect_text",
    "emit_regions",
    "mask_nms",
    "segment_image",
]
