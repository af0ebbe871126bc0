"""Scoring predictions against a hand-labeled oracle.

Each category is scored as an independent binary decision per ECM, plus a
"No Defect" row for the empty label set.  Undefined scores (no positive
predictions, or no positive truths) stay None and render as a dash.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from acid.engine import ClassificationResult
from acid.errors import DuplicateOracleEntry, MissingPrediction, OracleFormatError
from acid.taxonomy import CATEGORY_ORDER, Category

NO_DEFECT = "No Defect"
UNDEFINED_MARK = "—"

_CATEGORY_BY_NAME = {c.value: c for c in Category}


@dataclass(frozen=True)
class OracleEntry:
    commit_id: str
    true_labels: frozenset[Category]


def parse_oracle(text: str, path: str = "<oracle>") -> list[OracleEntry]:
    """Parse `commit_id;Category;Category` lines; no categories = No Defect."""
    entries: list[OracleEntry] = []
    seen: set[str] = set()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = [f.strip() for f in line.split(";")]
        commit_id = fields[0]
        if not commit_id:
            raise OracleFormatError(path, line_no, "missing commit id")
        if commit_id in seen:
            raise DuplicateOracleEntry(f"{path}:{line_no}: duplicate oracle entry {commit_id}")
        seen.add(commit_id)
        labels: set[Category] = set()
        for name in fields[1:]:
            if not name:
                continue
            category = _CATEGORY_BY_NAME.get(name)
            if category is None:
                raise OracleFormatError(path, line_no, f"unknown category {name!r}")
            labels.add(category)
        entries.append(OracleEntry(commit_id=commit_id, true_labels=frozenset(labels)))
    return entries


def load_oracle(path: str | Path) -> list[OracleEntry]:
    p = Path(path)
    return parse_oracle(p.read_text("utf-8"), path=str(p))


@dataclass(frozen=True)
class CategoryScore:
    tp: int
    fp: int
    fn: int

    @property
    def support(self) -> int:
        return self.tp + self.fn

    @property
    def precision(self) -> float | None:
        return None if self.tp + self.fp == 0 else self.tp / (self.tp + self.fp)

    @property
    def recall(self) -> float | None:
        return None if self.tp + self.fn == 0 else self.tp / (self.tp + self.fn)


@dataclass(frozen=True)
class ScoreReport:
    rows: dict[str, CategoryScore]  # category value or "No Defect"
    macro_precision: float | None
    macro_recall: float | None
    micro_precision: float | None
    micro_recall: float | None


def score(
    predictions: Sequence[ClassificationResult] | Iterable[ClassificationResult],
    oracle: Sequence[OracleEntry],
) -> ScoreReport:
    """Confusion counts per category over the oracle's commit ids."""
    predicted: dict[str, set[Category]] = {}
    for result in predictions:
        predicted[result.commit_id] = {label.category for label in result.labels}

    seen: set[str] = set()
    for entry in oracle:
        if entry.commit_id in seen:
            raise DuplicateOracleEntry(f"duplicate oracle entry {entry.commit_id}")
        seen.add(entry.commit_id)
        if entry.commit_id not in predicted:
            raise MissingPrediction(f"no prediction for oracle commit {entry.commit_id}")

    rows: dict[str, CategoryScore] = {}
    for category in CATEGORY_ORDER:
        tp = fp = fn = 0
        for entry in oracle:
            truth = category in entry.true_labels
            pred = category in predicted[entry.commit_id]
            tp += truth and pred
            fp += pred and not truth
            fn += truth and not pred
        rows[category.value] = CategoryScore(tp=tp, fp=fp, fn=fn)

    tp = fp = fn = 0
    for entry in oracle:
        truth = not entry.true_labels
        pred = not predicted[entry.commit_id]
        tp += truth and pred
        fp += pred and not truth
        fn += truth and not pred
    rows[NO_DEFECT] = CategoryScore(tp=tp, fp=fp, fn=fn)

    defect_rows = [rows[c.value] for c in CATEGORY_ORDER if rows[c.value].support >= 1]
    precisions = [r.precision for r in defect_rows if r.precision is not None]
    recalls = [r.recall for r in defect_rows if r.recall is not None]
    macro_p = sum(precisions) / len(precisions) if precisions else None
    macro_r = sum(recalls) / len(recalls) if recalls else None

    sum_tp = sum(rows[c.value].tp for c in CATEGORY_ORDER)
    sum_fp = sum(rows[c.value].fp for c in CATEGORY_ORDER)
    sum_fn = sum(rows[c.value].fn for c in CATEGORY_ORDER)
    micro_p = sum_tp / (sum_tp + sum_fp) if sum_tp + sum_fp else None
    micro_r = sum_tp / (sum_tp + sum_fn) if sum_tp + sum_fn else None

    return ScoreReport(
        rows=rows,
        macro_precision=macro_p,
        macro_recall=macro_r,
        micro_precision=micro_p,
        micro_recall=micro_r,
    )


def _fmt(value: float | None) -> str:
    return UNDEFINED_MARK if value is None else f"{value:.2f}"


def render_score_table(report: ScoreReport) -> str:
    """Plain-text table: category, occurrences, precision, recall."""
    lines = [f"{'Category':<20} {'Occur.':>6} {'Precision':>9} {'Recall':>7}"]
    for name in [c.value for c in CATEGORY_ORDER] + [NO_DEFECT]:
        row = report.rows[name]
        lines.append(f"{name:<20} {row.support:>6} {_fmt(row.precision):>9} {_fmt(row.recall):>7}")
    lines.append(
        f"{'Average':<20} {'':>6} {_fmt(report.macro_precision):>9} {_fmt(report.macro_recall):>7}"
    )
    return "\n".join(lines)
