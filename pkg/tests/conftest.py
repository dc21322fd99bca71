from __future__ import annotations

import json
import random

import pytest

from kgeval.dsl import parse_dependency, parse_kg_json, serialize_dependency
from kgeval.model import (
    Dependency,
    DependencyVerdict,
    GroundingVerdicts,
    KnowledgeGraph,
    PredicateKind,
    Term,
    validate_graph,
)
from kgeval.readability import Region, RegionSet

NEURON_ENTITIES = [
    "dendrites",
    "cell body",
    "nucleus",
    "axon",
    "myelin sheath",
    "schwann cell",
    "node of ranvier",
    "action potential propagation",
    "depolarization",
]

NEURON_DEPENDENCIES = [
    "Contains(dendrites, cell body)",
    "Contains(cell body, nucleus)",
    "Contains(cell body, axon)",
    "Contains(axon, myelin sheath)",
    "Contains(myelin sheath, schwann cell)",
    "Contains(axon, node of Ranvier)",
    "Causes(depolarization, action potential propagation)",
    "Requires(action potential propagation, axon)",
]


def neuron_document() -> dict:
    return {
        "Visual Components": {
            "elements": list(NEURON_ENTITIES),
            "dependencies": list(NEURON_DEPENDENCIES),
        }
    }


@pytest.fixture
def neuron_kg() -> KnowledgeGraph:
    return parse_kg_json(json.dumps(neuron_document()))


def make_verdicts(
    ref: KnowledgeGraph,
    false_entities: set[str] = frozenset(),
    false_deps: set[str] = frozenset(),
) -> GroundingVerdicts:
    """All-true verdicts except the named entities / dependency strings."""
    false_dep_objs = {parse_dependency(s) for s in false_deps}
    return GroundingVerdicts(
        {e: e not in false_entities for e in ref.entities},
        {
            d: DependencyVerdict(d not in false_dep_objs, "seen")
            for d in ref.dependencies
        },
    )


def make_reply(
    ref: KnowledgeGraph,
    false_entities: set[str] = frozenset(),
    false_deps: set[str] = frozenset(),
    omit_entities: set[str] = frozenset(),
    omit_deps: set[str] = frozenset(),
) -> str:
    """A well-formed grounding reply in the structured output shape."""
    false_dep_objs = {parse_dependency(s) for s in false_deps}
    omit_dep_objs = {parse_dependency(s) for s in omit_deps}
    elements = {
        e: "yes" if e not in false_entities else "no"
        for e in ref.entities
        if e not in omit_entities
    }
    deps = {
        serialize_dependency(d): (
            "yes  [clearly drawn and labeled]"
            if d not in false_dep_objs
            else "no  [not depicted]"
        )
        for d in ref.dependencies
        if d not in omit_dep_objs
    }
    return json.dumps(
        {
            "Image_Description": "A labeled diagram.",
            "Element_and_Dependency_Analysis": {
                "Element_Evaluation": elements,
                "Dependency_Evaluation": deps,
            },
        },
        indent=2,
    )


def dep(kind: str, left: str, right: str, lmod=None, rmod=None) -> Dependency:
    return Dependency(PredicateKind(kind), Term(left, lmod), Term(right, rmod))


def random_graph(rng: random.Random, max_entities=8, max_deps=10) -> KnowledgeGraph:
    n = rng.randint(1, max_entities)
    entities = [f"entity {i}" for i in range(n)]
    kinds = list(PredicateKind)
    modifiers = [None, None, "change", "increase", "decrease"]
    deps = []
    seen = set()
    for _ in range(rng.randint(0, max_deps)):
        d = Dependency(
            rng.choice(kinds),
            Term(rng.choice(entities), rng.choice(modifiers)),
            Term(rng.choice(entities), rng.choice(modifiers)),
        )
        if d not in seen:
            seen.add(d)
            deps.append(d)
    return validate_graph(entities, deps)


def random_verdicts(rng: random.Random, ref: KnowledgeGraph) -> GroundingVerdicts:
    return GroundingVerdicts(
        {e: rng.random() < 0.6 for e in ref.entities},
        {d: DependencyVerdict(rng.random() < 0.6, "") for d in ref.dependencies},
    )


def box(x, y, w, h, kind="mask", score=0.9) -> Region:
    return Region(kind=kind, bbox=(x, y, w, h), area=w * h, score=score)


def region_set(regions, width=4096, height=4096, producer=None) -> RegionSet:
    return RegionSet(
        image_width=width,
        image_height=height,
        regions=tuple(regions),
        producer=producer or {"model": "test", "points_per_side": 32, "nms_iou": 0.6},
    )


def disjoint_regions(n: int, size: int = 8) -> list[Region]:
    # 4096/16 = 256 slots per row, plenty for the counts used in tests
    step = size * 2
    per_row = 4096 // step
    return [
        box((i % per_row) * step, (i // per_row) * step, size, size) for i in range(n)
    ]


def midpoint_regions() -> list[Region]:
    """180 regions that merge into exactly 115 groups (ramp midpoint)."""
    regions = []
    for i in range(65):
        x = (i % 16) * 250
        y = (i // 16) * 250
        regions.append(box(x, y, 40, 40))
        regions.append(box(x + 10, y + 10, 40, 40))
    for r in disjoint_regions(50):
        regions.append(box(r.bbox[0], r.bbox[1] + 3800, r.bbox[2], r.bbox[3]))
    return regions


def regions_doc(regions, width=4096, height=4096, producer=None) -> dict:
    return {
        "image": {"width": width, "height": height},
        "producer": producer
        or {"model": "test-segmenter", "points_per_side": 32, "nms_iou": 0.6},
        "regions": [
            {
                "kind": r.kind,
                "bbox": list(r.bbox),
                "area": r.pixel_area,
                **({"score": r.score} if r.score is not None else {}),
            }
            for r in regions
        ],
    }


class MappingBackend:
    """Backend that looks replies up by the prompt text; thread-safe."""

    model_id = "scripted"

    def __init__(self, replies_by_prompt: dict[str, str]):
        self.replies = dict(replies_by_prompt)

    def send(self, text, image):
        return self.replies[text]


class SentinelBackend:
    """Fails loudly if anything bypasses the transcript cache."""

    model_id = "scripted"

    def send(self, text, image):
        raise AssertionError("backend was called despite a warm cache")


def small_graph(item_id: str) -> KnowledgeGraph:
    return validate_graph(
        [f"{item_id} core", f"{item_id} part"],
        [dep("Contains", f"{item_id} core", f"{item_id} part")],
    )


def build_workspace(tmp_path, specs):
    """Write images, region files, and a manifest for scripted batch runs.

    Each spec: {id, level, discipline, model?, kg?, regions?, false_entities?,
    false_deps?, skip_image?, skip_regions?}. Returns (manifest_path, backend).
    """
    from kgeval.dsl import serialize_kg_json
    from kgeval.extraction import render_eval_prompt

    images = tmp_path / "images"
    images.mkdir(exist_ok=True)
    lines = []
    replies = {}
    for spec in specs:
        item_id = spec["id"]
        graph = spec.get("kg") or small_graph(item_id)
        if not spec.get("skip_image"):
            (images / f"{item_id}.png").write_bytes(b"png bytes " + item_id.encode())
        if spec.get("regions") is not None and not spec.get("skip_regions"):
            (images / f"{item_id}.regions.json").write_text(
                json.dumps(regions_doc(spec["regions"]))
            )
        lines.append(
            json.dumps(
                {
                    "id": item_id,
                    "prompt": f"Draw {item_id}.",
                    "education_level": spec.get("level", "primary"),
                    "discipline": spec.get("discipline", "biology"),
                    "model": spec.get("model"),
                    "kg": json.loads(serialize_kg_json(graph)),
                    "generated_image_path": str(images / f"{item_id}.png"),
                }
            )
        )
        replies[render_eval_prompt(graph).text] = make_reply(
            graph,
            false_entities=spec.get("false_entities", frozenset()),
            false_deps=spec.get("false_deps", frozenset()),
        )
    manifest_path = tmp_path / "manifest.ndjson"
    manifest_path.write_text("\n".join(lines) + "\n")
    return manifest_path, MappingBackend(replies)
