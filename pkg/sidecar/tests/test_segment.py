from __future__ import annotations

import numpy as np
import pytest

from kgeval_sidecar import ModelLoadFailure, SidecarConfig, UnreadableImage, segment_image
from kgeval_sidecar.segment import RawRegion, mask_nms

from .conftest import solid_image, text_image


class TestGridFloodSegmenter:
    def test_solid_image_near_degenerate(self, tmp_path):
        # Golden: one region spanning the whole frame.
        path = solid_image(tmp_path / "solid.png")
        regions = segment_image(path)
        assert len(regions) <= 2
        assert len(regions) == 1
        assert regions[0].bbox == (0, 0, 256, 256)
        assert regions[0].area == 256 * 256

    def test_shapes_golden_count(self, shapes_path):
        # Golden capture for the canned shapes fixture on this backend.
        regions = segment_image(shapes_path)
        assert len(regions) == 14

    def test_one_by_one_pixel(self, tmp_path):
        # Golden: a single readable pixel yields one single-pixel region.
        path = solid_image(tmp_path / "one.png", size=1)
        regions = segment_image(path)
        assert len(regions) == 1
        assert regions[0].bbox == (0, 0, 1, 1)
        assert regions[0].area == 1

    def test_regions_inside_bounds_with_valid_fields(self, shapes_path):
        for r in segment_image(shapes_path):
            x, y, w, h = r.bbox
            assert w > 0 and h > 0
            assert x >= 0 and y >= 0
            assert x + w <= 256 and y + h <= 256
            assert 1 <= r.area <= w * h
            assert 0.0 <= r.score <= 1.0
            assert r.kind == "mask"

    def test_deterministic_across_runs(self, shapes_path):
        first = [(r.bbox, r.area, r.score) for r in segment_image(shapes_path)]
        second = [(r.bbox, r.area, r.score) for r in segment_image(shapes_path)]
        assert first == second

    def test_unreadable_image(self, tmp_path):
        missing = tmp_path / "missing.png"
        with pytest.raises(UnreadableImage):
            segment_image(missing)
        garbage = tmp_path / "garbage.png"
        garbage.write_bytes(b"not an image at all")
        with pytest.raises(UnreadableImage):
            segment_image(garbage)

    def test_text_pixels_become_regions_too(self, tmp_path):
        # Glyph strokes differ from the background, so the segmenter sees them.
        path = text_image(tmp_path / "text.png")
        regions = segment_image(path)
        assert len(regions) >= 2


class TestMaskNms:
    def _region(self, x, y, w, h, score, full=True):
        mask = np.ones((h, w), bool) if full else np.zeros((h, w), bool)
        return RawRegion("mask", (x, y, w, h), int(mask.sum()) or 1, score, mask)

    def test_duplicates_suppressed(self):
        a = self._region(0, 0, 10, 10, score=0.9)
        b = self._region(0, 0, 10, 10, score=0.8)
        kept = mask_nms([a, b], 0.6)
        assert kept == [a]

    def test_partial_overlap_below_threshold_kept(self):
        a = self._region(0, 0, 10, 10, score=0.9)
        b = self._region(5, 0, 10, 10, score=0.8)  # IoU = 50/150 = 1/3
        kept = mask_nms([a, b], 0.6)
        assert len(kept) == 2

    def test_threshold_inclusive_behavior(self):
        a = self._region(0, 0, 10, 10, score=0.9)
        b = self._region(0, 0, 10, 10, score=0.8)
        assert len(mask_nms([a, b], 1.1)) == 2  # IoU 1.0 < 1.1 keeps both

    def test_higher_score_wins_regardless_of_order(self):
        a = self._region(0, 0, 10, 10, score=0.5)
        b = self._region(0, 0, 10, 10, score=0.95)
        assert mask_nms([a, b], 0.6) == [b]
        assert mask_nms([b, a], 0.6) == [b]


class TestBackendRegistry:
    def test_unknown_backend(self, shapes_path):
        with pytest.raises(ModelLoadFailure):
            segment_image(shapes_path, SidecarConfig(segmenter="imaginary"))

    def test_sam2_adapter_requires_package(self, shapes_path):
        with pytest.raises(ModelLoadFailure):
            segment_image(shapes_path, SidecarConfig(segmenter="sam2"))
