"""Enhanced Commit Messages: commit text joined with referenced issue text.

Issue references count only when a closing keyword (fix/close/resolve and
their inflections) appears in the same sentence, approximating "the commit
addresses this issue".  Pass mode="any" to accept every reference.
"""

from __future__ import annotations

import re
from bisect import bisect_right
from dataclasses import dataclass
from typing import Callable, NamedTuple

from acid import textpipe, textops
from acid.vcs import CommitRecord


@dataclass(frozen=True)
class IssueRef:
    repo_slug: str  # "owner/name", or "" for the commit's own repository
    issue_number: int

    def __post_init__(self):
        if self.issue_number < 1:
            raise ValueError("issue_number must be >= 1")


class IssueText(NamedTuple):
    title: str
    body: str


IssueResolver = Callable[[IssueRef], "IssueText | None"]


@dataclass(frozen=True)
class EnhancedCommitMessage:
    commit_id: str
    text: str
    issue_refs: tuple[IssueRef, ...] = ()
    resolved_count: int = 0


_CLOSING_KEYWORDS = frozenset(
    ("fix", "fixes", "fixed", "close", "closes", "closed", "resolve", "resolves", "resolved")
)

_REF_RE = re.compile(
    r"(?:(?P<slug>[A-Za-z0-9_.-]+/[A-Za-z0-9_.-]+))?#(?P<num>\d+)"
    r"|\bGH-(?P<gh_num>\d+)",
    re.IGNORECASE,
)


def extract_issue_refs(message: str, mode: str = "closing_keyword") -> list[IssueRef]:
    """Issue references in the message, deduplicated, in order of appearance.

    References are matched against the raw message so punctuation inside a
    slug (owner/repo.js#1) does not sever them at sentence boundaries.  In
    mode="closing_keyword" a reference counts only when the sentence it
    starts in also contains a closing keyword; mode="any" keeps them all.
    """
    if mode not in ("closing_keyword", "any"):
        raise ValueError(f"unknown extraction mode: {mode!r}")
    spans = textpipe.sentence_spans(message)
    starts = [s for s, _ in spans]
    closes: dict[int, bool] = {}

    def _sentence_closes(pos: int) -> bool:
        idx = bisect_right(starts, pos) - 1
        if idx not in closes:
            s, e = spans[idx]
            tokens = textops.tokenize(message[s:e])
            closes[idx] = any(tok in _CLOSING_KEYWORDS for tok in tokens)
        return closes[idx]

    refs: list[IssueRef] = []
    seen: set[tuple[str, int]] = set()
    for m in _REF_RE.finditer(message):
        number = int(m.group("num") or m.group("gh_num"))
        if number < 1:
            continue
        if mode == "closing_keyword" and not _sentence_closes(m.start()):
            continue
        slug = m.group("slug") or ""
        key = (slug, number)
        if key not in seen:
            seen.add(key)
            refs.append(IssueRef(repo_slug=slug, issue_number=number))
    return refs


def build_ecm(
    commit: CommitRecord,
    resolver: IssueResolver | None = None,
    mode: str = "closing_keyword",
) -> EnhancedCommitMessage:
    """Join the commit message with the text of every resolvable referenced issue."""
    message = commit.message.strip()
    refs = tuple(extract_issue_refs(message, mode))
    parts = [message]
    resolved = 0
    if resolver is not None:
        for ref in refs:
            issue = resolver(ref)
            if issue is None:
                continue
            parts.append(issue.title + "\n" + issue.body)
            resolved += 1
    return EnhancedCommitMessage(
        commit_id=commit.commit_id,
        text="\n\n".join(parts),
        issue_refs=refs,
        resolved_count=resolved,
    )
