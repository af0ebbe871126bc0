"""Prevalence metrics over a classified corpus.

All metrics are permutation-invariant aggregations, so results from
parallel workers can be merged in any order before calling in here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Iterable, Mapping, Sequence

from acid.engine import ClassificationResult
from acid.errors import EmptyDenominator
from acid.taxonomy import CATEGORY_ORDER, SUBCATEGORIES, Category, Subcategory


@dataclass(frozen=True)
class Proportions:
    per_category: dict[Category, float]
    total: float


def _categories_of(result: ClassificationResult) -> set[Category]:
    return {label.category for label in result.labels}


def defect_proportion(
    results: Sequence[ClassificationResult], iac_commit_ids: set[str]
) -> Proportions:
    """Percentage of IaC commits labeled with each category, and with any."""
    if not iac_commit_ids:
        raise EmptyDenominator("no IaC commits to compute defect proportion over")
    stray = {r.commit_id for r in results} - iac_commit_ids
    if stray:
        raise ValueError(f"results outside the IaC commit population: {sorted(stray)[:3]}")
    denom = len(iac_commit_ids)
    per_category = {
        category: 100.0 * sum(1 for r in results if category in _categories_of(r)) / denom
        for category in CATEGORY_ORDER
    }
    total = 100.0 * sum(1 for r in results if r.labels) / denom
    return Proportions(per_category=per_category, total=total)


def script_proportion(
    results: Sequence[ClassificationResult],
    commit_paths: Mapping[str, Iterable[str]],
    all_program_paths: set[str],
) -> Proportions:
    """Percentage of IaC programs touched by commits carrying each category."""
    if not all_program_paths:
        raise EmptyDenominator("no IaC programs to compute script proportion over")
    denom = len(all_program_paths)

    def touched(selector) -> int:
        paths: set[str] = set()
        for r in results:
            if selector(r):
                paths.update(commit_paths.get(r.commit_id, ()))
        return len(paths & all_program_paths)

    per_category = {
        category: 100.0 * touched(lambda r, c=category: c in _categories_of(r)) / denom
        for category in CATEGORY_ORDER
    }
    total = 100.0 * touched(lambda r: bool(r.labels)) / denom
    return Proportions(per_category=per_category, total=total)


def defects_per_year(
    results: Sequence[ClassificationResult], timestamps: Mapping[str, int]
) -> dict[Category, dict[int, int]]:
    """Labeled-commit counts per category per UTC year.

    Years inside the [min, max] span of the supplied timestamps are
    zero-filled; categories that never occur are omitted.
    """
    if not timestamps:
        return {}
    years = [datetime.fromtimestamp(ts, tz=timezone.utc).year for ts in timestamps.values()]
    span = range(min(years), max(years) + 1)
    out: dict[Category, dict[int, int]] = {}
    for result in results:
        if not result.labels:
            continue
        year = datetime.fromtimestamp(timestamps[result.commit_id], tz=timezone.utc).year
        for category in _categories_of(result):
            series = out.setdefault(category, {y: 0 for y in span})
            series[year] = series.get(year, 0) + 1
    return {c: out[c] for c in CATEGORY_ORDER if c in out}


def colabel_distribution(results: Sequence[ClassificationResult]) -> dict[int, float]:
    """Histogram of distinct-category counts per ECM, as percentages."""
    if not results:
        return {}
    counts: dict[int, int] = {}
    for result in results:
        size = len(_categories_of(result))
        counts[size] = counts.get(size, 0) + 1
    return {size: 100.0 * n / len(results) for size, n in sorted(counts.items())}


def subcategory_shares(
    results: Sequence[ClassificationResult],
) -> dict[Category, dict[Subcategory, float]]:
    """Per parent category: percentage of its ECMs carrying each subcategory."""
    shares: dict[Category, dict[Subcategory, float]] = {}
    for parent, subs in SUBCATEGORIES.items():
        parent_ecms = [r for r in results if parent in _categories_of(r)]
        if not parent_ecms:
            continue
        shares[parent] = {
            sub: 100.0
            * sum(1 for r in parent_ecms if any(l.category is parent and l.subcategory is sub for l in r.labels))
            / len(parent_ecms)
            for sub in subs
        }
    return shares


@dataclass(frozen=True)
class MetricsReport:
    defect_proportion: Proportions
    script_proportion: Proportions
    defects_per_year: dict[Category, dict[int, int]] = field(default_factory=dict)
    colabel_histogram: dict[int, float] = field(default_factory=dict)
    subcategory_shares: dict[Category, dict[Subcategory, float]] = field(default_factory=dict)


def build_report(
    results: Sequence[ClassificationResult],
    iac_commit_ids: set[str],
    commit_paths: Mapping[str, Iterable[str]],
    all_program_paths: set[str],
    timestamps: Mapping[str, int],
) -> MetricsReport:
    return MetricsReport(
        defect_proportion=defect_proportion(results, iac_commit_ids),
        script_proportion=script_proportion(results, commit_paths, all_program_paths),
        defects_per_year=defects_per_year(results, timestamps),
        colabel_histogram=colabel_distribution(results),
        subcategory_shares=subcategory_shares(results),
    )
