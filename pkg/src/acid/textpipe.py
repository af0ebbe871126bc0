"""Sentence tokenization, pre-processing, and dependent-term extraction.

These are the first three classification stages; the rule engine consumes
the `Sentence` objects produced here.  Dependency parsing is approximated by
whole-sentence co-occurrence: in a sentence containing a defect indicator,
every non-indicator token counts as a dependent term.  The rules only ever
test lexicon membership of dependent terms, so this preserves their
semantics without a grammatical parser; `analyze` accepts an alternative
extractor for callers that want to slot one in.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from acid import textops

_SENTENCE_SPLIT_RE = re.compile(r"[.!?;\n]")

# (tokens, anchor indices) -> dependent terms
DependentTermExtractor = Callable[[Sequence[str], Sequence[int]], frozenset]


@dataclass(frozen=True)
class Sentence:
    raw: str
    tokens: tuple[str, ...]
    defect_anchors: tuple[int, ...]
    dependent_terms: frozenset[str]


def sentence_spans(text: str) -> list[tuple[int, int]]:
    """Half-open [start, end) extents of each sentence segment in the raw text.

    Unlike split_sentences this keeps blank segments, so offsets into the
    original string can be mapped back to their containing sentence.
    """
    spans: list[tuple[int, int]] = []
    start = 0
    for m in _SENTENCE_SPLIT_RE.finditer(text):
        spans.append((start, m.start()))
        start = m.end()
    spans.append((start, len(text)))
    return spans


def split_sentences(text: str) -> list[str]:
    """Split on '.', '!', '?', ';' and newlines; drop blank segments."""
    parts = (text[s:e].strip() for s, e in sentence_spans(text))
    return [p for p in parts if p]


def normalize(raw: str) -> list[str]:
    """Lowercase, replace non-alphanumerics with spaces, split on whitespace."""
    return textops.tokenize(raw)


def dependent_terms(tokens: Sequence[str], anchors: Sequence[int]) -> frozenset[str]:
    """All non-anchor tokens of a sentence, empty when there is no anchor."""
    if not anchors:
        return frozenset()
    anchor_set = set(anchors)
    return frozenset(tok for i, tok in enumerate(tokens) if i not in anchor_set)


def analyze(
    text: str,
    defect_lexicon: Iterable[str],
    extractor: DependentTermExtractor = dependent_terms,
) -> list[Sentence]:
    """Run the three text stages over one enhanced commit message."""
    prefixes = tuple(defect_lexicon)
    sentences = []
    for raw in split_sentences(text):
        tokens = tuple(normalize(raw))
        anchors = tuple(textops.prefix_hit_indices(tokens, prefixes))
        sentences.append(
            Sentence(
                raw=raw,
                tokens=tokens,
                defect_anchors=anchors,
                dependent_terms=extractor(tokens, anchors),
            )
        )
    return sentences
