from __future__ import annotations

import math
import random
from fractions import Fraction

import pytest

from kgeval.errors import LengthMismatch, NoOverlap, ZeroVariance
from kgeval.fidelity import FidelityScore
from kgeval.harness import ItemResult
from kgeval.readability import ReadabilityResult
from kgeval.stats import correlate_with_humans, load_ratings_csv, pearson


def exact_pearson(x, y):
    """Closed-form oracle in exact rational arithmetic."""
    fx = [Fraction(v).limit_denominator(10**9) for v in x]
    fy = [Fraction(v).limit_denominator(10**9) for v in y]
    n = len(fx)
    mx = sum(fx) / n
    my = sum(fy) / n
    cov = sum((a - mx) * (b - my) for a, b in zip(fx, fy))
    vx = sum((a - mx) ** 2 for a in fx)
    vy = sum((b - my) ** 2 for b in fy)
    return float(cov) / math.sqrt(float(vx) * float(vy))


def _result(item_id, score, fidelity=None, read=None):
    fidelity = fidelity if fidelity is not None else score
    read = read if read is not None else 1.0
    return ItemResult(
        item_id=item_id,
        education_level="primary",
        discipline="biology",
        model=None,
        fidelity=FidelityScore(fidelity, fidelity, fidelity, fidelity, 0, 0),
        readability=ReadabilityResult(10, read, 70, 160),
        score=score,
        error_classes=frozenset(),
    )


class TestPearson:
    def test_perfect_linear(self):
        assert pearson([1, 2, 3], [3, 5, 7]) == pytest.approx(1.0, abs=1e-12)

    def test_anti_linear(self):
        assert pearson([1, 2, 3], [-1, -2, -3]) == pytest.approx(-1.0, abs=1e-12)

    def test_hand_computed_example(self):
        # cov = 5.5, var_x = 5, var_y = 8.75 over the centered series.
        expected = 5.5 / math.sqrt(5 * 8.75)
        assert pearson([1, 2, 3, 4], [1, 3, 2, 5]) == pytest.approx(expected, abs=1e-12)
        assert expected == pytest.approx(0.8315, abs=5e-5)

    def test_matches_exact_oracle(self):
        rng = random.Random(31)
        for _ in range(30):
            n = rng.randrange(3, 30)
            x = [rng.uniform(-10, 10) for _ in range(n)]
            y = [rng.uniform(-10, 10) for _ in range(n)]
            assert pearson(x, y) == pytest.approx(exact_pearson(x, y), abs=1e-9)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            pearson([1, 2], [1, 2, 3])
        with pytest.raises(LengthMismatch):
            pearson([1], [1])

    def test_zero_variance(self):
        with pytest.raises(ZeroVariance):
            pearson([1, 1, 1], [1, 2, 3])


class TestRatingsCsv:
    def test_mean_per_item(self):
        csv_text = "item_id,rating\nq1,8\nq1,6\nq2,3\n"
        assert load_ratings_csv(csv_text) == {"q1": 7.0, "q2": 3.0}

    def test_missing_columns(self):
        with pytest.raises(LengthMismatch):
            load_ratings_csv("id,score\nq1,8\n")


class TestCorrelateWithHumans:
    def test_ratings_proportional_to_score(self):
        results = [_result(f"q{i}", s) for i, s in enumerate([0.1, 0.4, 0.6, 0.9])]
        ratings = {r.item_id: 10 * r.score for r in results}
        report = correlate_with_humans(results, ratings)
        assert report.score_r == pytest.approx(1.0, abs=1e-12)
        assert report.n_items == 4

    def test_constant_ratings(self):
        results = [_result(f"q{i}", s) for i, s in enumerate([0.1, 0.4, 0.6])]
        with pytest.raises(ZeroVariance):
            correlate_with_humans(results, {r.item_id: 5.0 for r in results})

    def test_twenty_item_fixture_matches_oracle(self):
        rng = random.Random(77)
        results = []
        ratings = {}
        for i in range(20):
            fid = rng.uniform(0.1, 1.0)
            read = rng.uniform(0.1, 1.0)
            results.append(_result(f"q{i}", fid * read, fidelity=fid, read=read))
            ratings[f"q{i}"] = rng.uniform(0, 10)
        report = correlate_with_humans(results, ratings)
        human = [ratings[r.item_id] for r in results]
        assert report.score_r == pytest.approx(
            exact_pearson([r.score for r in results], human), abs=1e-9
        )
        assert report.fidelity_r == pytest.approx(
            exact_pearson([r.fidelity.one_minus_ged for r in results], human), abs=1e-9
        )
        assert report.readability_r == pytest.approx(
            exact_pearson([r.readability.score for r in results], human), abs=1e-9
        )

    def test_no_overlap(self):
        results = [_result("q1", 0.5)]
        with pytest.raises(NoOverlap):
            correlate_with_humans(results, {"other": 5.0})

    def test_csv_join(self, tmp_path):
        results = [_result(f"q{i}", s) for i, s in enumerate([0.2, 0.5, 0.8])]
        path = tmp_path / "ratings.csv"
        path.write_text("item_id,rating\nq0,2\nq1,5\nq2,8\nunrelated,9\n")
        report = correlate_with_humans(results, path)
        assert report.n_items == 3
        assert report.score_r == pytest.approx(1.0, abs=1e-12)
