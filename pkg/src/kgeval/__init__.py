"""Evaluate knowledge images against reference knowledge graphs.

The score of an image is the product of its knowledge fidelity (one minus the
normalized graph edit distance between the grounded subgraph and the
reference) and its visual readability (a piecewise-linear penalty on the
merged segmentation-region count).
"""

from .dsl import (
    DISCIPLINES,
    EDUCATION_LEVELS,
    ManifestItem,
    parse_dependency,
    parse_kg_json,
    parse_manifest,
    serialize_dependency,
    serialize_kg_json,
)
from .extraction import (
    ChatBackend,
    HttpChatBackend,
    ImageAttachment,
    RetryPolicy,
    TranscriptCache,
    ground_image,
    parse_eval_response,
    render_eval_prompt,
)
from .fidelity import (
    EditCosts,
    FidelityScore,
    UNIT_COSTS,
    exact_ged,
    fidelity_from_verdicts,
    graph_distance,
    normalized_ged,
    subgraph_from_verdicts,
)
from .harness import (
    ErrorThresholds,
    EvalConfig,
    ItemResult,
    Report,
    categorize_errors,
    combined_score,
    evaluate_batch,
    evaluate_item,
)
from .model import (
    Dependency,
    GroundingVerdicts,
    KnowledgeGraph,
    PredicateKind,
    Term,
    complete_verdicts,
    normalize_label,
    validate_graph,
)
from .readability import (
    ReadabilityConfig,
    ReadabilityResult,
    Region,
    RegionSet,
    load_regions_json,
    merge_regions,
    readability,
    readability_score,
)
from .stats import CorrelationReport, correlate_with_humans, pearson

__version__ = "0.1.0"

__all__ = [
    "ChatBackend",
    "CorrelationReport",
    "DISCIPLINES",
    "Dependency",
    "EDUCATION_LEVELS",
    "EditCosts",
    "ErrorThresholds",
    "EvalConfig",
    "FidelityScore",
    "GroundingVerdicts",
    "HttpChatBackend",
    "ImageAttachment",
    "ItemResult",
    "KnowledgeGraph",
    "ManifestItem",
    "PredicateKind",
    "ReadabilityConfig",
    "ReadabilityResult",
    "Region",
    "RegionSet",
    "Report",
    "RetryPolicy",
    "Term",
    "TranscriptCache",
    "UNIT_COSTS",
    "categorize_errors",
    "combined_score",
    "complete_verdicts",
    "correlate_with_humans",
    "evaluate_batch",
    "evaluate_item",
    "exact_ged",
    "fidelity_from_verdicts",
    "graph_distance",
    "ground_image",
    "load_regions_json",
    "merge_regions",
    "normalize_label",
    "normalized_ged",
    "parse_dependency",
    "parse_eval_response",
    "parse_kg_json",
    "parse_manifest",
    "pearson",
    "readability",
    "readability_score",
    "render_eval_prompt",
    "serialize_dependency",
    "serialize_kg_json",
    "subgraph_from_verdicts",
    "validate_graph",
]
