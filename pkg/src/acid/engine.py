"""Category rule evaluation over Enhanced Commit Messages.

Every rule is evaluated once per sentence with x.sen bound to the sentence
tokens (hasDefect only), x.sen.dep bound to its dependent terms, and x.diff
to the commit-level signals.  A category labels the commit when any sentence
fires; subcategory clauses are then evaluated within the firing sentences
and every clause that fired contributes a label.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Protocol

from acid import textpipe
from acid.diffsignals import DiffSignals
from acid.rules import DIFF_SIGNAL_NAMES, RuleSet, match_pattern
from acid.taxonomy import CATEGORY_ORDER, DefectLabel, sorted_labels


class MessageLike(Protocol):
    commit_id: str
    text: str


@dataclass(frozen=True)
class ClassificationResult:
    commit_id: str
    labels: frozenset[DefectLabel]
    evidence: Mapping[str, tuple[str, ...]] = field(default_factory=dict)

    @property
    def is_defect(self) -> bool:
        return bool(self.labels)

    def sorted(self) -> list[DefectLabel]:
        return sorted_labels(self.labels)


def _signal_env(names: set[str], signals: DiffSignals) -> dict[str, bool]:
    return {
        name: getattr(signals, DIFF_SIGNAL_NAMES[name])
        for name in names
        if name in DIFF_SIGNAL_NAMES
    }


def classify_ecm(ecm: MessageLike, signals: DiffSignals, ruleset: RuleSet) -> ClassificationResult:
    """Evaluate all category rules over the ECM text and diff signals."""
    sentences = textpipe.analyze(ecm.text, ruleset.defect_lexicon)

    referenced: set[str] = set()
    for category in ruleset.rules:
        referenced |= ruleset.referenced_names(category)
    lexicon_names = [n for n in referenced if n in ruleset.lexicons]
    base_env = _signal_env(referenced, signals)

    envs: list[dict[str, bool]] = []
    for sentence in sentences:
        env = dict(base_env)
        for name in lexicon_names:
            if name == "hasDefect":
                env[name] = bool(sentence.defect_anchors)
            else:
                env[name] = match_pattern(sentence.dependent_terms, ruleset.lexicons[name])
        envs.append(env)

    labels: set[DefectLabel] = set()
    evidence: dict[DefectLabel, list[str]] = {}

    def attach(label: DefectLabel, sentence_idxs: list[int], signal_names: set[str]) -> None:
        lines = evidence.setdefault(label, [])
        for i in sentence_idxs:
            raw = sentences[i].raw
            if raw not in lines:
                lines.append(raw)
        for name in sorted(signal_names):
            attr = DIFF_SIGNAL_NAMES.get(name)
            if attr is None or not getattr(signals, attr):
                continue
            for path, line in signals.evidence.get(attr, ()):
                entry = f"{path}: {line}"
                if entry not in lines:
                    lines.append(entry)

    for category in CATEGORY_ORDER:
        rule = ruleset.rules.get(category)
        if rule is None:
            continue
        fired_idxs = [i for i, env in enumerate(envs) if rule.evaluate(env)]
        if not fired_idxs:
            continue
        sub_exprs = ruleset.subcategories.get(category, {})
        fired_subs = {
            sub: idxs
            for sub, expr in sub_exprs.items()
            if (idxs := [i for i in fired_idxs if expr.evaluate(envs[i])])
        }
        if fired_subs:
            for sub, idxs in fired_subs.items():
                label = DefectLabel(category, sub)
                labels.add(label)
                attach(label, idxs, rule.names() | sub_exprs[sub].names())
        else:
            label = DefectLabel(category)
            labels.add(label)
            attach(label, fired_idxs, rule.names())

    return ClassificationResult(
        commit_id=ecm.commit_id,
        labels=frozenset(labels),
        evidence={str(lbl): tuple(evidence[lbl]) for lbl in sorted_labels(labels)},
    )
