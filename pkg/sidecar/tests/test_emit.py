from __future__ import annotations

import json
from importlib import resources

import jsonschema
import pytest

from kgeval_sidecar import SidecarConfig, WriteFailure, build_regions_document, emit_regions


def load_schema():
    raw = resources.files("kgeval_sidecar").joinpath("regions.schema.json").read_text()
    return json.loads(raw)


class TestBuildDocument:
    def test_schema_valid(self, shapes_path):
        doc = build_regions_document(shapes_path)
        jsonschema.validate(doc, load_schema())

    def test_producer_defaults(self, shapes_path):
        producer = build_regions_document(shapes_path)["producer"]
        assert producer["points_per_side"] == 32
        assert producer["nms_iou"] == 0.6
        assert producer["model"] == "grid-flood+contrast-text"

    def test_config_overrides_recorded(self, shapes_path):
        cfg = SidecarConfig(points_per_side=16, nms_iou=0.5, ocr_confidence_floor=0.3)
        producer = build_regions_document(shapes_path, cfg)["producer"]
        assert producer["points_per_side"] == 16
        assert producer["nms_iou"] == 0.5
        assert producer["ocr_confidence_floor"] == 0.3

    def test_mixed_kinds_present(self, shapes_path):
        kinds = {r["kind"] for r in build_regions_document(shapes_path)["regions"]}
        assert kinds == {"mask", "text"}


class TestEmitRegions:
    def test_writes_parseable_file(self, shapes_path, tmp_path):
        out = tmp_path / "out" / "shapes.regions.json"
        emit_regions(shapes_path, SidecarConfig(), out)
        doc = json.loads(out.read_text())
        jsonschema.validate(doc, load_schema())
        assert not list(out.parent.glob("*.tmp"))

    def test_byte_identical_across_runs(self, shapes_path, tmp_path):
        a = tmp_path / "a.regions.json"
        b = tmp_path / "b.regions.json"
        emit_regions(shapes_path, SidecarConfig(), a)
        emit_regions(shapes_path, SidecarConfig(), b)
        assert a.read_bytes() == b.read_bytes()

    def test_write_failure(self, shapes_path, tmp_path):
        target = tmp_path / "occupied"
        target.mkdir()
        with pytest.raises(WriteFailure):
            emit_regions(shapes_path, SidecarConfig(), target)
