"""Visual readability from segmentation masks and OCR text boxes.

Overlapping regions are merged with union-find; the surviving group count
feeds a piecewise-linear score that is 1 at or below ``n_min`` regions, 0 at
or above ``n_max``, and linear in between.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from .errors import InvalidRegion, InvalidThresholds, MalformedJson

DEFAULT_N_MIN = 70
DEFAULT_N_MAX = 160
DEFAULT_OVERLAP_THRESHOLD = 0.5

REGION_KINDS = ("mask", "text")


@dataclass(frozen=True)
class Region:
    """A segmentation mask or OCR text box with pixel geometry.

    ``area`` is the mask pixel count when known (masks are rarely
    rectangular); it falls back to the bbox area. An optional bbox-cropped
    boolean ``mask`` enables mask-precise overlap checks.
    """

    kind: str
    bbox: tuple[int, int, int, int]
    area: Optional[int] = None
    score: Optional[float] = None
    mask: Optional[np.ndarray] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.kind not in REGION_KINDS:
            raise InvalidRegion(f"unknown region kind {self.kind!r}")
        x, y, w, h = self.bbox
        if w <= 0 or h <= 0:
            raise InvalidRegion(f"bbox {self.bbox} must have positive width and height")
        if self.area is not None:
            if self.area <= 0:
                raise InvalidRegion(f"area {self.area} must be positive")
            if self.area > w * h:
                raise InvalidRegion(f"area {self.area} exceeds bbox area {w * h}")
        if self.score is not None and not 0.0 <= self.score <= 1.0:
            raise InvalidRegion(f"score {self.score} outside [0, 1]")
        if self.mask is not None and self.mask.shape != (h, w):
            raise InvalidRegion(
                f"mask shape {self.mask.shape} does not match bbox {self.bbox}"
            )

    @property
    def pixel_area(self) -> int:
        x, y, w, h = self.bbox
        return self.area if self.area is not None else w * h


@dataclass(frozen=True)
class RegionSet:
    """All regions extracted from one image, plus producer provenance."""

    image_width: int
    image_height: int
    regions: tuple[Region, ...]
    producer: Mapping[str, object]

    def __post_init__(self):
        object.__setattr__(self, "regions", tuple(self.regions))
        object.__setattr__(self, "producer", dict(self.producer))
        if not self.producer:
            raise InvalidRegion("producer metadata is required")
        if self.image_width <= 0 or self.image_height <= 0:
            raise InvalidRegion("image dimensions must be positive")
        for r in self.regions:
            x, y, w, h = r.bbox
            if x < 0 or y < 0 or x + w > self.image_width or y + h > self.image_height:
                raise InvalidRegion(
                    f"bbox {r.bbox} outside image "
                    f"{self.image_width}x{self.image_height}"
                )


def _bbox_intersection(a: Region, b: Region) -> int:
    ax, ay, aw, ah = a.bbox
    bx, by, bw, bh = b.bbox
    iw = min(ax + aw, bx + bw) - max(ax, bx)
    ih = min(ay + ah, by + bh) - max(ay, by)
    if iw <= 0 or ih <= 0:
        return 0
    return iw * ih


def _mask_intersection(a: Region, b: Region) -> int:
    ax, ay, aw, ah = a.bbox
    bx, by, bw, bh = b.bbox
    x0, x1 = max(ax, bx), min(ax + aw, bx + bw)
    y0, y1 = max(ay, by), min(ay + ah, by + bh)
    if x0 >= x1 or y0 >= y1:
        return 0
    win_a = a.mask[y0 - ay : y1 - ay, x0 - ax : x1 - ax]
    win_b = b.mask[y0 - by : y1 - by, x0 - bx : x1 - bx]
    return int(np.logical_and(win_a, win_b).sum())


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        root = i
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[i] != root:
            self.parent[i], i = root, self.parent[i]
        return root

    def union(self, i: int, j: int):
        ri, rj = self.find(i), self.find(j)
        if ri != rj:
            # Smaller root wins so grouping is canonical for any union order.
            if rj < ri:
                ri, rj = rj, ri
            self.parent[rj] = ri


def merge_regions(
    rs: RegionSet,
    overlap_threshold: float = DEFAULT_OVERLAP_THRESHOLD,
    mask_precise: bool = False,
) -> tuple[int, list[int]]:
    """Group regions whose overlap ratio reaches the threshold.

    Two regions join one group when intersection / min(area_a, area_b) >=
    overlap_threshold, and grouping is transitive. Intersections use bboxes
    unless ``mask_precise`` is set and both regions carry masks. Returns the
    group count and a group id per region (ids numbered by first occurrence),
    with the partition independent of input order.
    """
    if not 0.0 <= overlap_threshold <= 1.0:
        raise InvalidRegion(f"overlap threshold {overlap_threshold} outside [0, 1]")
    regions = rs.regions
    uf = _UnionFind(len(regions))
    for i in range(len(regions)):
        for j in range(i + 1, len(regions)):
            a, b = regions[i], regions[j]
            if mask_precise and a.mask is not None and b.mask is not None:
                inter = _mask_intersection(a, b)
            else:
                inter = _bbox_intersection(a, b)
            if inter / min(a.pixel_area, b.pixel_area) >= overlap_threshold:
                uf.union(i, j)

    group_ids: list[int] = []
    relabel: dict[int, int] = {}
    for i in range(len(regions)):
        root = uf.find(i)
        if root not in relabel:
            relabel[root] = len(relabel)
        group_ids.append(relabel[root])
    return len(relabel), group_ids


def readability_score(
    n_vis: int, n_min: int = DEFAULT_N_MIN, n_max: int = DEFAULT_N_MAX
) -> float:
    """Piecewise-linear penalty on the merged region count."""
    if n_min >= n_max:
        raise InvalidThresholds(f"n_min {n_min} must be below n_max {n_max}")
    if n_vis <= n_min:
        return 1.0
    if n_vis >= n_max:
        return 0.0
    return (n_max - n_vis) / (n_max - n_min)


@dataclass(frozen=True)
class ReadabilityConfig:
    overlap_threshold: float = DEFAULT_OVERLAP_THRESHOLD
    n_min: int = DEFAULT_N_MIN
    n_max: int = DEFAULT_N_MAX
    mask_precise: bool = False


@dataclass(frozen=True)
class ReadabilityResult:
    n_vis: int
    score: float
    n_min: int
    n_max: int


def readability(rs: RegionSet, config: ReadabilityConfig | None = None) -> ReadabilityResult:
    config = config or ReadabilityConfig()
    n_vis, _ = merge_regions(rs, config.overlap_threshold, config.mask_precise)
    return ReadabilityResult(
        n_vis=n_vis,
        score=readability_score(n_vis, config.n_min, config.n_max),
        n_min=config.n_min,
        n_max=config.n_max,
    )


# --- regions JSON contract ----------------------------------------------------


def load_regions_json(data: Union[bytes, str]) -> tuple[RegionSet, list[str]]:
    """Parse a regions JSON document into a RegionSet.

    Returns the set plus a list of benign warnings (currently only regions
    whose area was missing and defaulted to the bbox area); structural
    violations raise instead.
    """
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise MalformedJson(f"invalid regions JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise MalformedJson("regions document must be a JSON object")
    image = doc.get("image")
    producer = doc.get("producer")
    raw_regions = doc.get("regions")
    if not isinstance(image, dict) or not isinstance(raw_regions, list):
        raise MalformedJson("regions document needs 'image' and 'regions'")
    if not isinstance(producer, dict) or not producer:
        raise MalformedJson("regions document needs non-empty 'producer' metadata")

    warnings: list[str] = []
    regions: list[Region] = []
    for i, raw in enumerate(raw_regions):
        if not isinstance(raw, dict) or "kind" not in raw or "bbox" not in raw:
            raise MalformedJson(f"regions[{i}] needs 'kind' and 'bbox'")
        bbox = raw["bbox"]
        if not (isinstance(bbox, list) and len(bbox) == 4):
            raise MalformedJson(f"regions[{i}].bbox must be [x, y, w, h]")
        area = raw.get("area")
        if area is None:
            warnings.append(f"regions[{i}]: missing area, using bbox area")
        try:
            regions.append(
                Region(
                    kind=raw["kind"],
                    bbox=tuple(int(v) for v in bbox),
                    area=int(area) if area is not None else None,
                    score=float(raw["score"]) if raw.get("score") is not None else None,
                )
            )
        except (TypeError, ValueError) as exc:
            raise MalformedJson(f"regions[{i}]: {exc}") from exc

    rs = RegionSet(
        image_width=int(image.get("width", 0)),
        image_height=int(image.get("height", 0)),
        regions=tuple(regions),
        producer=producer,
    )
    return rs, warnings


def read_regions(path: Union[str, Path]) -> tuple[RegionSet, list[str]]:
    return load_regions_json(Path(path).read_bytes())
