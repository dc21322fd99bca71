"""Batch evaluation: compose the per-item score, run manifests, classify errors.

The per-item score is the product of knowledge fidelity (1 - normalized GED)
and visual readability, so an image must both carry the reference knowledge
and stay legible to score well.
"""

from __future__ import annotations

import logging
import subprocess
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

from .dsl import ManifestItem
from .errors import (
    BackendUnavailable,
    EmptyManifest,
    KgEvalError,
    MissingImage,
    MissingRegions,
)
from .extraction import (
    ChatBackend,
    ImageAttachment,
    RetryPolicy,
    TranscriptCache,
    ground_image,
    parse_eval_response,
    prompt_hash,
    render_eval_prompt,
)
from .fidelity import FidelityScore, fidelity_from_verdicts
from .readability import (
    ReadabilityConfig,
    ReadabilityResult,
    read_regions,
    readability,
)

log = logging.getLogger(__name__)

ERROR_VISUAL = "VisualReadability"
ERROR_ENTITY = "EntityRepresentation"
ERROR_DEPENDENCY = "DependencyStructure"
ERROR_CLASSES = (ERROR_VISUAL, ERROR_ENTITY, ERROR_DEPENDENCY)


def combined_score(fidelity: FidelityScore, read: ReadabilityResult) -> float:
    """Readability times knowledge fidelity, in [0, 1]."""
    return read.score * fidelity.one_minus_ged


@dataclass(frozen=True)
class ErrorThresholds:
    """Failure-classification cutoffs, applied only to low-scoring items."""

    low_score_gate: float = 0.5
    readability: float = 0.5
    entity_recall: float = 0.3
    dependency_accuracy: float = 0.4


def categorize_errors(
    score: float,
    fidelity: FidelityScore,
    read: ReadabilityResult,
    thresholds: ErrorThresholds = ErrorThresholds(),
) -> frozenset[str]:
    """Assign independent failure classes to a low-scoring item.

    Items above the low-score gate carry no classes; below it, each class
    triggers on its own threshold, so an item can carry zero to three.
    """
    if score > thresholds.low_score_gate:
        return frozenset()
    classes = set()
    if read.score <= thresholds.readability:
        classes.add(ERROR_VISUAL)
    if fidelity.entity_recall <= thresholds.entity_recall:
        classes.add(ERROR_ENTITY)
    if fidelity.dependency_accuracy <= thresholds.dependency_accuracy:
        classes.add(ERROR_DEPENDENCY)
    return frozenset(classes)


@dataclass(frozen=True)
class ItemResult:
    item_id: str
    education_level: str
    discipline: str
    model: Optional[str]
    fidelity: FidelityScore
    readability: ReadabilityResult
    score: float
    error_classes: frozenset[str]
    provenance: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ItemFailure:
    item_id: str
    error: str


@dataclass
class Report:
    results: list[ItemResult]
    failures: list[ItemFailure] = field(default_factory=list)


@dataclass
class EvalConfig:
    readability: ReadabilityConfig = field(default_factory=ReadabilityConfig)
    thresholds: ErrorThresholds = field(default_factory=ErrorThresholds)
    backend_model: str = "o3"
    retry_policy: RetryPolicy = field(default_factory=RetryPolicy)
    max_inflight: int = 8
    cache_dir: Optional[Path] = None
    regions_dir: Optional[Path] = None
    sidecar_command: Optional[Sequence[str]] = None
    ged_only: bool = False


def regions_path_for(item: ManifestItem, regions_dir: Optional[Path] = None) -> Path:
    """Sibling `<image stem>.regions.json`, optionally redirected to a directory."""
    image = Path(item.generated_image_path)
    name = image.stem + ".regions.json"
    return (regions_dir or image.parent) / name


def _media_type(path: Path) -> str:
    return {
        ".png": "image/png",
        ".jpg": "image/jpeg",
        ".jpeg": "image/jpeg",
        ".webp": "image/webp",
    }.get(path.suffix.lower(), "image/png")


def _grounding_verdicts(item: ManifestItem, backend, config: EvalConfig, cache):
    bundle = render_eval_prompt(item.kg)
    digest = prompt_hash(bundle.text)
    model = config.backend_model
    if cache is not None:
        record = cache.get(item.id, model, digest)
        if record is not None:
            return parse_eval_response(record["reply_text"], item.kg), model

    if backend is None:
        raise BackendUnavailable(
            f"{item.id}: transcript not cached and no backend configured"
        )
    image_path = Path(item.generated_image_path)
    if not image_path.exists():
        raise MissingImage(f"{item.id}: generated image {image_path} not found")
    attachment = ImageAttachment(image_path.read_bytes(), _media_type(image_path))
    verdicts, transcript = ground_image(
        attachment, item.kg, backend, config.retry_policy
    )
    if cache is not None:
        cache.put(item.id, model, digest, transcript["reply_text"])
    return verdicts, model


def _readability_result(item: ManifestItem, config: EvalConfig):
    path = regions_path_for(item, config.regions_dir)
    if not path.exists() and config.sidecar_command:
        cmd = [
            *config.sidecar_command,
            "emit",
            "--image",
            str(item.generated_image_path),
            "--out",
            str(path),
        ]
        subprocess.run(cmd, check=True, capture_output=True)
    if not path.exists():
        if config.ged_only:
            rc = config.readability
            return ReadabilityResult(0, 1.0, rc.n_min, rc.n_max), "none"
        raise MissingRegions(f"{item.id}: regions file {path} not found")

    rs, warnings = read_regions(path)
    for w in warnings:
        log.warning("%s: %s", path, w)
    result = readability(rs, config.readability)
    if config.ged_only:
        result = replace(result, score=1.0)
    return result, str(rs.producer.get("model", "unknown"))


def evaluate_item(
    item: ManifestItem,
    backend: Optional[ChatBackend],
    config: EvalConfig,
    cache: Optional[TranscriptCache] = None,
) -> ItemResult:
    """Ground, score fidelity and readability, and compose one item's result."""
    verdicts, backend_model = _grounding_verdicts(item, backend, config, cache)
    fid = fidelity_from_verdicts(item.kg, verdicts)
    read, producer = _readability_result(item, config)
    score = combined_score(fid, read)
    return ItemResult(
        item_id=item.id,
        education_level=item.education_level,
        discipline=item.discipline,
        model=item.model,
        fidelity=fid,
        readability=read,
        score=score,
        error_classes=categorize_errors(score, fid, read, config.thresholds),
        provenance={"backend_model": backend_model, "region_producer": producer},
    )


def evaluate_batch(
    items: Sequence[ManifestItem],
    backend: Optional[ChatBackend],
    config: EvalConfig,
) -> Report:
    """Evaluate a manifest with bounded parallelism.

    Per-item failures are recorded without aborting the batch, and results
    keep manifest order regardless of worker count or completion order.
    """
    if not items:
        raise EmptyManifest("manifest contains no items")
    cache = TranscriptCache(config.cache_dir) if config.cache_dir else None

    def run(item: ManifestItem):
        return evaluate_item(item, backend, config, cache)

    outcomes: list = [None] * len(items)
    with ThreadPoolExecutor(max_workers=max(1, config.max_inflight)) as pool:
        futures = {pool.submit(run, item): i for i, item in enumerate(items)}
        for future, i in futures.items():
            try:
                outcomes[i] = future.result()
            except (KgEvalError, subprocess.CalledProcessError) as exc:
                log.error("item %s failed: %s", items[i].id, exc)
                outcomes[i] = ItemFailure(items[i].id, f"{type(exc).__name__}: {exc}")

    results = [o for o in outcomes if isinstance(o, ItemResult)]
    failures = [o for o in outcomes if isinstance(o, ItemFailure)]
    return Report(results=results, failures=failures)
