"""Command-line interface."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .dsl import parse_kg_json, read_manifest, serialize_dependency
from .errors import KgEvalError
from .extraction import HttpChatBackend
from .fidelity import graph_distance, normalized_ged
from .harness import EvalConfig, Report, evaluate_batch, evaluate_item
from .readability import ReadabilityConfig, read_regions, readability
from .reporting import result_to_dict, results_from_json, write_report
from .stats import correlate_with_humans, load_ratings_csv


def _add_readability_flags(p):
    p.add_argument("--n-min", type=int, default=70, help="region count scoring 1.0")
    p.add_argument("--n-max", type=int, default=160, help="region count scoring 0.0")
    p.add_argument("--overlap-threshold", type=float, default=0.5)


def _add_eval_flags(p):
    _add_readability_flags(p)
    p.add_argument("--backend-model", default="o3")
    p.add_argument("--max-inflight", type=int, default=8)
    p.add_argument("--cache-dir", type=Path, default=None)
    p.add_argument("--regions-dir", type=Path, default=None)
    p.add_argument("--sidecar", default=None, help="sidecar executable for missing regions")
    p.add_argument("--ged-only", action="store_true", help="score fidelity only")
    p.add_argument("--out", type=Path, default=Path("kgeval-out"))


def _add_strictness(p):
    group = p.add_mutually_exclusive_group()
    group.add_argument("--strict", dest="lenient", action="store_false", default=False)
    group.add_argument("--lenient", dest="lenient", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kgeval",
        description="Score knowledge images against reference knowledge graphs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse-kg", help="validate a KG JSON file")
    p.add_argument("file", type=Path)
    _add_strictness(p)

    p = sub.add_parser("ged", help="exact edit distance between two KG files")
    p.add_argument("ref", type=Path)
    p.add_argument("gen", type=Path)
    p.add_argument("--node-cap", type=int, default=16)
    _add_strictness(p)

    p = sub.add_parser("readability", help="score a regions JSON file")
    p.add_argument("file", type=Path)
    _add_readability_flags(p)

    p = sub.add_parser("score", help="evaluate a single manifest item (JSON file)")
    p.add_argument("item", type=Path)
    _add_eval_flags(p)
    _add_strictness(p)

    p = sub.add_parser("eval", help="evaluate a manifest (NDJSON)")
    p.add_argument("manifest", type=Path)
    _add_eval_flags(p)
    _add_strictness(p)
    p.add_argument("--avg-of-level-means", action="store_true")

    p = sub.add_parser("correlate", help="correlate results with human ratings")
    p.add_argument("results", type=Path)
    p.add_argument("ratings", type=Path)

    p = sub.add_parser("report", help="re-render report files from results.json")
    p.add_argument("results", type=Path)
    p.add_argument("--out", type=Path, default=Path("kgeval-out"))
    p.add_argument("--avg-of-level-means", action="store_true")

    return parser


def _eval_config(args) -> EvalConfig:
    return EvalConfig(
        readability=ReadabilityConfig(
            overlap_threshold=args.overlap_threshold,
            n_min=args.n_min,
            n_max=args.n_max,
        ),
        backend_model=args.backend_model,
        max_inflight=args.max_inflight,
        cache_dir=args.cache_dir,
        regions_dir=args.regions_dir,
        sidecar_command=[args.sidecar] if args.sidecar else None,
        ged_only=args.ged_only,
    )


def _backend(args):
    # Built lazily: cached transcripts make the endpoint optional.
    try:
        return HttpChatBackend.from_env(model_id=args.backend_model)
    except KgEvalError:
        return None


def _cmd_parse_kg(args) -> int:
    graph = parse_kg_json(args.file.read_bytes(), lenient=args.lenient)
    for warning in graph.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    print(f"{len(graph.entities)} entities, {len(graph.dependencies)} dependencies")
    for dep in graph.dependencies:
        print(f"  {serialize_dependency(dep)}")
    return 0


def _cmd_ged(args) -> int:
    ref = parse_kg_json(args.ref.read_bytes(), lenient=args.lenient)
    gen = parse_kg_json(args.gen.read_bytes(), lenient=args.lenient)
    distance = graph_distance(gen, ref, node_cap=args.node_cap)
    print(
        json.dumps(
            {
                "ged": distance,
                "normalized": normalized_ged(gen, ref, node_cap=args.node_cap),
                "reference_size": len(ref),
            }
        )
    )
    return 0


def _cmd_readability(args) -> int:
    rs, warnings = read_regions(args.file)
    for warning in warnings:
        print(f"warning: {warning}", file=sys.stderr)
    result = readability(
        rs,
        ReadabilityConfig(
            overlap_threshold=args.overlap_threshold, n_min=args.n_min, n_max=args.n_max
        ),
    )
    print(
        json.dumps(
            {"n_vis": result.n_vis, "score": result.score,
             "n_min": result.n_min, "n_max": result.n_max}
        )
    )
    return 0


def _cmd_score(args) -> int:
    from .dsl import parse_manifest_item
    from .extraction import TranscriptCache

    obj = json.loads(args.item.read_text("utf-8"))
    item = parse_manifest_item(obj, lenient_kg=args.lenient)
    config = _eval_config(args)
    cache = TranscriptCache(config.cache_dir) if config.cache_dir else None
    result = evaluate_item(item, _backend(args), config, cache)
    print(json.dumps(result_to_dict(result), indent=2))
    return 0


def _cmd_eval(args) -> int:
    items = read_manifest(args.manifest, partial=True, lenient_kg=args.lenient)
    items, errors = items
    for err in errors:
        print(f"warning: manifest {err}", file=sys.stderr)
    config = _eval_config(args)
    report = evaluate_batch(items, _backend(args), config)
    paths = write_report(report, args.out, avg_of_level_means=args.avg_of_level_means)
    for failure in report.failures:
        print(f"failed: {failure.item_id}: {failure.error}", file=sys.stderr)
    print(f"wrote {', '.join(str(p) for p in paths.values())}")
    return 0 if not report.failures else 3


def _cmd_correlate(args) -> int:
    report = results_from_json(args.results.read_bytes())
    ratings = load_ratings_csv(args.ratings)
    corr = correlate_with_humans(report.results, ratings)
    print(
        json.dumps(
            {
                "n_items": corr.n_items,
                "score_r": corr.score_r,
                "fidelity_r": corr.fidelity_r,
                "readability_r": corr.readability_r,
            },
            indent=2,
        )
    )
    return 0


def _cmd_report(args) -> int:
    report = results_from_json(args.results.read_bytes())
    paths = write_report(report, args.out, avg_of_level_means=args.avg_of_level_means)
    print(f"wrote {', '.join(str(p) for p in paths.values())}")
    return 0


_COMMANDS = {
    "parse-kg": _cmd_parse_kg,
    "ged": _cmd_ged,
    "readability": _cmd_readability,
    "score": _cmd_score,
    "eval": _cmd_eval,
    "correlate": _cmd_correlate,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (KgEvalError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
