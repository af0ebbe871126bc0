"""Diff-derived boolean signals feeding the category rules.

Each signal is a named detector over the changed lines of IaC-classified
files.  The value-pair detectors (data_changed and friends) align removed
and added lines pairwise inside each hunk and compare the two sides of the
first '=' or ':' separator.  Every true signal carries the (path, line)
evidence that triggered it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from acid import textops
from acid.iac import IacProgramKind, Language
from acid.rules import (
    CRED_LEXICON,
    DIFF_SECURITY_LEXICON,
    NET_LEXICON,
    RuleSet,
    default_rules,
)
from acid.vcs import FileChange

SIGNAL_FIELDS = (
    "changed_include",
    "changed_comment",
    "changed_service",
    "data_changed",
    "data_net_changed",
    "data_cred_changed",
    "changed_secu",
)

Evidence = tuple[str, str]  # (path, signed line text)


@dataclass(frozen=True)
class DiffSignals:
    changed_include: bool = False
    changed_comment: bool = False
    changed_service: bool = False
    data_changed: bool = False
    data_net_changed: bool = False
    data_cred_changed: bool = False
    changed_secu: bool = False
    evidence: Mapping[str, tuple[Evidence, ...]] = field(default_factory=dict)

    def get(self, signal: str) -> bool:
        if signal not in SIGNAL_FIELDS:
            raise KeyError(signal)
        return getattr(self, signal)

    @property
    def any_true(self) -> bool:
        return any(getattr(self, name) for name in SIGNAL_FIELDS)


_COMMENT_PREFIXES: dict[Language, tuple[str, ...]] = {
    Language.TYPESCRIPT_LIKE: ("//", "/*", "*/", "*"),
    Language.GO_LIKE: ("//", "/*", "*/", "*"),
    Language.CSHARP_LIKE: ("//", "/*", "*/", "*"),
    Language.JAVA_LIKE: ("//", "/*", "*/", "*"),
    Language.PYTHON_LIKE: ("#",),
    Language.HCL: ("#", "//", "/*", "*/", "*"),
    Language.FSHARP_LIKE: ("//", "(*", "*)"),
    Language.VB_LIKE: ("'",),
}

_INCLUDE_RES = (
    re.compile(r"^\s*import\b"),
    re.compile(r"^\s*from\s+\S+\s+import\b"),
    re.compile(r"\brequire\s*\("),
    re.compile(r"^\s*using\s+\w"),
    re.compile(r"^\s*#?include\b"),
)
_HCL_INCLUDE_RES = (
    re.compile(r'^\s*module\s+"'),
    re.compile(r"^\s*source\s*="),
)
_HCL_BLOCK_RE = re.compile(r'^\s*(?:resource|provider)\s+"')
_CTOR_RE = re.compile(
    r"\b(?:new\s+)?(?:aws|gcp|azure|google|k8s|kubernetes|docker|pulumi)(?:\.\w+)+\s*\(",
    re.IGNORECASE,
)

_SEP_RE = re.compile(r"[=:]")
_INT_RE = re.compile(r"^\d{1,5}$")
_URL_RE = re.compile(r"^[a-z][a-z0-9+.-]*://\S+$", re.IGNORECASE)
_IPV4_RE = re.compile(r"^\d{1,3}(?:\.\d{1,3}){3}(?:/\d{1,2})?$")


def _clean_value(value: str) -> str:
    v = value.strip().rstrip(",;")
    if len(v) >= 2 and v[0] == v[-1] and v[0] in "\"'":
        v = v[1:-1]
    return v


def _is_port_value(value: str) -> bool:
    return bool(_INT_RE.match(value)) and 1 <= int(value) <= 65535


def _is_net_value(value: str) -> bool:
    return bool(_URL_RE.match(value)) or bool(_IPV4_RE.match(value))


def _split_kv(line: str) -> tuple[str, int] | None:
    """Return (key side, index just past the separator), or None."""
    m = _SEP_RE.search(line)
    if m is None:
        return None
    return line[: m.start()], m.end()


def detect_diff_signals(
    changes: Iterable[FileChange],
    kinds: Mapping[str, IacProgramKind],
    ruleset: RuleSet | None = None,
) -> DiffSignals:
    """Run every signal detector over the IaC-classified changed files."""
    rs = ruleset if ruleset is not None else default_rules()
    net_lexicon = rs.lexicons.get(NET_LEXICON, ())
    cred_lexicon = rs.lexicons.get(CRED_LEXICON, ())
    secu_lexicon = rs.lexicons.get(
        DIFF_SECURITY_LEXICON,
        ("ssl", "tls", "https", "encrypt", "certificate", "firewall", "secret", "kms"),
    )

    ev: dict[str, list[Evidence]] = {name: [] for name in SIGNAL_FIELDS}

    def seen(signal: str, path: str, line: str) -> None:
        entry = (path, line)
        if entry not in ev[signal]:
            ev[signal].append(entry)

    for change in changes:
        kind = kinds.get(change.path)
        if kind is None or not kind.is_iac or change.is_binary:
            continue
        path = change.path
        is_hcl = kind.language is Language.HCL
        comment_prefixes = _COMMENT_PREFIXES.get(kind.language, ())

        for sign, lines in (("-", change.removed_lines), ("+", change.added_lines)):
            for line in lines:
                stripped = line.strip()
                if not stripped:
                    continue
                signed = sign + line
                if any(r.search(line) for r in _INCLUDE_RES) or (
                    is_hcl and any(r.search(line) for r in _HCL_INCLUDE_RES)
                ):
                    seen("changed_include", path, signed)
                if comment_prefixes and stripped.startswith(comment_prefixes):
                    seen("changed_comment", path, signed)
                if (is_hcl and _HCL_BLOCK_RE.match(line)) or _CTOR_RE.search(line):
                    seen("changed_service", path, signed)
                if textops.match_any_prefix(textops.tokenize(line), tuple(secu_lexicon)):
                    seen("changed_secu", path, signed)

        for hunk in change.hunks:
            for old_line, new_line in zip(hunk.removed, hunk.added):
                kv = _split_kv(old_line)
                if kv is None:
                    continue
                key, value_start = kv
                if new_line[:value_start] != old_line[:value_start]:
                    continue
                old_value = old_line[value_start:].strip()
                new_value = new_line[value_start:].strip()
                if old_value == new_value:
                    continue
                seen("data_changed", path, "-" + old_line)
                seen("data_changed", path, "+" + new_line)
                key_tokens = textops.tokenize(key)
                old_clean = _clean_value(old_value)
                new_clean = _clean_value(new_value)
                is_net = (
                    textops.match_any_prefix(key_tokens, tuple(net_lexicon))
                    or ("port" in key.lower() and (_is_port_value(old_clean) or _is_port_value(new_clean)))
                    or _is_net_value(old_clean)
                    or _is_net_value(new_clean)
                )
                if is_net:
                    seen("data_net_changed", path, "-" + old_line)
                    seen("data_net_changed", path, "+" + new_line)
                if textops.match_any_prefix(key_tokens, tuple(cred_lexicon)):
                    seen("data_cred_changed", path, "-" + old_line)
                    seen("data_cred_changed", path, "+" + new_line)

    return DiffSignals(
        **{name: bool(entries) for name, entries in ev.items()},
        evidence={name: tuple(entries) for name, entries in ev.items() if entries},
    )
