"""Correlation of automatic scores with human ratings."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

from .errors import LengthMismatch, NoOverlap, ZeroVariance
from .harness import ItemResult


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    """Sample Pearson correlation coefficient."""
    if len(x) != len(y):
        raise LengthMismatch(f"length {len(x)} vs {len(y)}")
    if len(x) < 2:
        raise LengthMismatch("need at least 2 paired observations")
    mx = math.fsum(x) / len(x)
    my = math.fsum(y) / len(y)
    cov = math.fsum((a - mx) * (b - my) for a, b in zip(x, y))
    vx = math.fsum((a - mx) ** 2 for a in x)
    vy = math.fsum((b - my) ** 2 for b in y)
    if vx == 0.0 or vy == 0.0:
        raise ZeroVariance("one of the series is constant")
    return cov / math.sqrt(vx * vy)


@dataclass(frozen=True)
class CorrelationReport:
    """Component correlations are None when that component is constant."""

    n_items: int
    score_r: float
    fidelity_r: Optional[float]
    readability_r: Optional[float]


def load_ratings_csv(data: Union[bytes, str, Path]) -> dict[str, float]:
    """Read item_id,rating rows; multiple ratings per item are averaged."""
    if isinstance(data, Path):
        data = data.read_text("utf-8")
    elif isinstance(data, bytes):
        data = data.decode("utf-8")
    sums: dict[str, float] = {}
    counts: dict[str, int] = {}
    reader = csv.DictReader(io.StringIO(data))
    if reader.fieldnames is None or not {"item_id", "rating"} <= set(reader.fieldnames):
        raise LengthMismatch("ratings CSV needs 'item_id' and 'rating' columns")
    for row in reader:
        item_id = row["item_id"].strip()
        sums[item_id] = sums.get(item_id, 0.0) + float(row["rating"])
        counts[item_id] = counts.get(item_id, 0) + 1
    return {item_id: sums[item_id] / counts[item_id] for item_id in sums}


def correlate_with_humans(
    results: Sequence[ItemResult], ratings: Union[bytes, str, Path, dict]
) -> CorrelationReport:
    """Pearson r between per-item scores and mean human ratings.

    Also reports the fidelity-only and readability-only correlations so the
    contribution of each component can be inspected separately.
    """
    if not isinstance(ratings, dict):
        ratings = load_ratings_csv(ratings)
    joined = [(r, ratings[r.item_id]) for r in results if r.item_id in ratings]
    if not joined:
        raise NoOverlap("no item ids shared between results and ratings")
    human = [h for _, h in joined]

    def component_r(values):
        try:
            return pearson(values, human)
        except ZeroVariance:
            return None

    return CorrelationReport(
        n_items=len(joined),
        score_r=pearson([r.score for r, _ in joined], human),
        fidelity_r=component_r([r.fidelity.one_minus_ged for r, _ in joined]),
        readability_r=component_r([r.readability.score for r, _ in joined]),
    )
