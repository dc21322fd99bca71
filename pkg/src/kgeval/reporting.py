"""Aggregation and rendering of batch results.

Tables report mean scores x100 with two decimals, one column per education
level plus an unweighted overall average; raw [0, 1] values live in
results.json. The report directory also gets a segment-count histogram as
CSV and rendered matplotlib figures.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .dsl import DISCIPLINES, EDUCATION_LEVELS
from .fidelity import FidelityScore
from .harness import ERROR_CLASSES, ItemFailure, ItemResult, Report
from .readability import ReadabilityResult

LEVEL_TITLES = {
    "preschool": "Preschool",
    "primary": "Primary",
    "secondary": "Secondary",
    "high": "High",
    "undergraduate": "Undergrad",
    "phd": "PhD",
}

_UNGROUPED = "all"


def _mean(values: Sequence[float]) -> Optional[float]:
    return sum(values) / len(values) if values else None


def _models(results: Sequence[ItemResult]) -> list[str]:
    names = {r.model or _UNGROUPED for r in results}
    # Rank rows by average score, then name, so tables read worst-to-best.
    def key(name):
        scores = [r.score for r in results if (r.model or _UNGROUPED) == name]
        return (_mean(scores), name)

    return sorted(names, key=key)


def mean_by_level(results: Sequence[ItemResult], model: Optional[str] = None):
    rows = [r for r in results if model is None or (r.model or _UNGROUPED) == model]
    return {
        level: _mean([r.score for r in rows if r.education_level == level])
        for level in EDUCATION_LEVELS
    }


def mean_by_discipline(results: Sequence[ItemResult], model: Optional[str] = None):
    rows = [r for r in results if model is None or (r.model or _UNGROUPED) == model]
    return {
        d: _mean([r.score for r in rows if r.discipline == d]) for d in DISCIPLINES
    }


def overall_mean(results: Sequence[ItemResult], model: Optional[str] = None):
    rows = [r for r in results if model is None or (r.model or _UNGROUPED) == model]
    return _mean([r.score for r in rows])


def mean_of_level_means(results: Sequence[ItemResult], model: Optional[str] = None):
    """Alternative average: mean over populated level means, not over items."""
    values = [v for v in mean_by_level(results, model).values() if v is not None]
    return _mean(values)


def segment_histogram(
    results: Sequence[ItemResult], bin_width: int = 10
) -> dict[str, dict[int, int]]:
    """Per-model histogram of merged region counts, binned by bin_width."""
    hist: dict[str, dict[int, int]] = {}
    for r in results:
        model = r.model or _UNGROUPED
        start = (r.readability.n_vis // bin_width) * bin_width
        hist.setdefault(model, {})
        hist[model][start] = hist[model].get(start, 0) + 1
    return hist


def fraction_fragmented(results: Sequence[ItemResult], model: str) -> Optional[float]:
    """Share of a model's images whose region count reaches its n_min."""
    rows = [r for r in results if (r.model or _UNGROUPED) == model]
    if not rows:
        return None
    return sum(1 for r in rows if r.readability.n_vis >= r.readability.n_min) / len(rows)


def error_counts(results: Sequence[ItemResult]) -> dict[str, dict[str, int]]:
    counts: dict[str, dict[str, int]] = {}
    for r in results:
        model = r.model or _UNGROUPED
        counts.setdefault(model, {cls: 0 for cls in ERROR_CLASSES})
        for cls in r.error_classes:
            counts[model][cls] += 1
    return counts


# --- rendering -----------------------------------------------------------------


def _cell(value: Optional[float]) -> str:
    return "-" if value is None else f"{100.0 * value:.2f}"


def _table(header: list[str], rows: list[list[str]]) -> str:
    lines = ["| " + " | ".join(header) + " |"]
    lines.append("|" + "|".join("---" for _ in header) + "|")
    lines += ["| " + " | ".join(row) + " |" for row in rows]
    return "\n".join(lines)


def render_report_md(report: Report, avg_of_level_means: bool = False) -> str:
    results = report.results
    models = _models(results)
    avg_fn = mean_of_level_means if avg_of_level_means else overall_mean

    parts = ["# Knowledge-image evaluation report", ""]
    parts.append(f"Items scored: {len(results)}; failures: {len(report.failures)}.")
    parts.append("")

    parts.append("## Score (x100) by education level")
    parts.append("")
    header = ["Model"] + [LEVEL_TITLES[lv] for lv in EDUCATION_LEVELS] + ["Avg"]
    rows = []
    for model in models:
        by_level = mean_by_level(results, model)
        rows.append(
            [model]
            + [_cell(by_level[lv]) for lv in EDUCATION_LEVELS]
            + [_cell(avg_fn(results, model))]
        )
    parts.append(_table(header, rows))
    parts.append("")

    parts.append("## Score (x100) by discipline")
    parts.append("")
    header = ["Model"] + [d.capitalize() for d in DISCIPLINES] + ["Avg"]
    rows = []
    for model in models:
        by_disc = mean_by_discipline(results, model)
        rows.append(
            [model]
            + [_cell(by_disc[d]) for d in DISCIPLINES]
            + [_cell(avg_fn(results, model))]
        )
    parts.append(_table(header, rows))
    parts.append("")

    parts.append("## Failure classes (items at or below the low-score gate)")
    parts.append("")
    counts = error_counts(results)
    header = ["Model"] + list(ERROR_CLASSES)
    rows = [
        [model] + [str(counts[model][cls]) for cls in ERROR_CLASSES]
        for model in models
        if model in counts
    ]
    parts.append(_table(header, rows))
    parts.append("")

    parts.append("## Visual fragmentation")
    parts.append("")
    header = ["Model", "Share of images at/above n_min"]
    rows = []
    for model in models:
        frac = fraction_fragmented(results, model)
        rows.append([model, "-" if frac is None else f"{100.0 * frac:.2f}%"])
    parts.append(_table(header, rows))
    parts.append("")
    parts.append("Region-count distribution: histogram.csv, histogram.png.")
    parts.append("")

    if report.failures:
        parts.append("## Failed items")
        parts.append("")
        for failure in report.failures:
            parts.append(f"- `{failure.item_id}`: {failure.error}")
        parts.append("")

    return "\n".join(parts)


def histogram_csv(report: Report, bin_width: int = 10) -> str:
    hist = segment_histogram(report.results, bin_width)
    lines = ["model,bin_start,bin_end,count"]
    for model in sorted(hist):
        for start in sorted(hist[model]):
            lines.append(f"{model},{start},{start + bin_width - 1},{hist[model][start]}")
    return "\n".join(lines) + "\n"


# --- results.json round-trip ------------------------------------------------------


def result_to_dict(r: ItemResult) -> dict:
    return {
        "item_id": r.item_id,
        "education_level": r.education_level,
        "discipline": r.discipline,
        "model": r.model,
        "score": r.score,
        "fidelity": {
            "one_minus_ged": r.fidelity.one_minus_ged,
            "u_acc": r.fidelity.u_acc,
            "entity_recall": r.fidelity.entity_recall,
            "dependency_accuracy": r.fidelity.dependency_accuracy,
            "missing_entities": r.fidelity.missing_entities,
            "missing_dependencies": r.fidelity.missing_dependencies,
        },
        "readability": {
            "n_vis": r.readability.n_vis,
            "score": r.readability.score,
            "n_min": r.readability.n_min,
            "n_max": r.readability.n_max,
        },
        "error_classes": sorted(r.error_classes),
        "provenance": dict(r.provenance),
    }


def result_from_dict(obj: dict) -> ItemResult:
    return ItemResult(
        item_id=obj["item_id"],
        education_level=obj["education_level"],
        discipline=obj["discipline"],
        model=obj.get("model"),
        fidelity=FidelityScore(**obj["fidelity"]),
        readability=ReadabilityResult(**obj["readability"]),
        score=obj["score"],
        error_classes=frozenset(obj.get("error_classes", ())),
        provenance=dict(obj.get("provenance", {})),
    )


def results_to_json(report: Report) -> str:
    return json.dumps([result_to_dict(r) for r in report.results], indent=2)


def results_from_json(data) -> Report:
    if isinstance(data, (bytes, str)):
        data = json.loads(data)
    return Report(results=[result_from_dict(obj) for obj in data])


# --- figures ------------------------------------------------------------------


def render_figures(report: Report, out_dir: Path, bin_width: int = 10) -> list[Path]:
    """Render the region-count distribution and per-level score figures."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    results = report.results
    models = _models(results)
    meta = {"Software": "kgeval"}

    hist = segment_histogram(results, bin_width)
    fig, ax = plt.subplots(figsize=(8, 4.5))
    for model in models:
        bins = hist.get(model, {})
        if not bins:
            continue
        xs = sorted(bins)
        ax.plot(
            [x + bin_width / 2 for x in xs],
            [bins[x] for x in xs],
            marker="o",
            label=model,
        )
    n_min = results[0].readability.n_min if results else 70
    ax.axvline(n_min, linestyle="--", color="gray", label=f"n_min = {n_min}")
    ax.set_xlabel("merged region count")
    ax.set_ylabel("images")
    ax.set_title("Region-count distribution")
    ax.legend(fontsize=8)
    fig.tight_layout()
    path = out_dir / "histogram.png"
    fig.savefig(path, dpi=150, metadata=meta)
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots(figsize=(8, 4.5))
    width = 0.8 / max(1, len(models))
    for k, model in enumerate(models):
        by_level = mean_by_level(results, model)
        xs = [i + k * width for i in range(len(EDUCATION_LEVELS))]
        ys = [100.0 * (by_level[lv] or 0.0) for lv in EDUCATION_LEVELS]
        ax.bar(xs, ys, width=width, label=model)
    ax.set_xticks([i + 0.4 - width / 2 for i in range(len(EDUCATION_LEVELS))])
    ax.set_xticklabels([LEVEL_TITLES[lv] for lv in EDUCATION_LEVELS])
    ax.set_ylabel("mean score (x100)")
    ax.set_title("Score by education level")
    ax.legend(fontsize=8)
    fig.tight_layout()
    path = out_dir / "scores_by_level.png"
    fig.savefig(path, dpi=150, metadata=meta)
    plt.close(fig)
    written.append(path)

    return written


def write_report(
    report: Report,
    out_dir: Path,
    avg_of_level_means: bool = False,
    figures: bool = True,
) -> dict[str, Path]:
    """Write results.json, report.md, histogram.csv, and figures to a directory."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "results": out_dir / "results.json",
        "report": out_dir / "report.md",
        "histogram": out_dir / "histogram.csv",
    }
    paths["results"].write_text(results_to_json(report), "utf-8")
    paths["report"].write_text(render_report_md(report, avg_of_level_means), "utf-8")
    paths["histogram"].write_text(histogram_csv(report), "utf-8")
    if figures:
        for p in render_figures(report, out_dir):
            paths[p.name] = p
    return paths
