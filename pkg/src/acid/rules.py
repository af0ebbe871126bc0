"""Pattern lexicons, category rules, and the rule-file loader.

A rule file has three kinds of sections (see data/default.rules for the
shipped defaults and the full format description):

    [lexicon NAME]           one token prefix per line
    [rule CATEGORY]          boolean expression: names, AND, OR, parentheses
    [subcategory CAT / SUB]  boolean expression refining a fired category

Names in expressions resolve either to a lexicon (evaluated against
sentence tokens for hasDefect, dependent terms for everything else) or to
one of the diff-signal functions.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Union

from acid import textops
from acid.errors import RuleFileError
from acid.taxonomy import SUBCATEGORIES, Category, Subcategory

# rule-file name -> DiffSignals attribute.  changedComment is accepted as an
# alias since prose and rule tables disagree on the plural.
DIFF_SIGNAL_NAMES: dict[str, str] = {
    "changedInclude": "changed_include",
    "changedComments": "changed_comment",
    "changedComment": "changed_comment",
    "changedService": "changed_service",
    "dataChanged": "data_changed",
    "dataNetChanged": "data_net_changed",
    "dataCredChanged": "data_cred_changed",
    "changedSecu": "changed_secu",
}

# Lexicons consumed by the diff detectors rather than by rules directly.
NET_LEXICON = "hasNetConf"
CRED_LEXICON = "hasCredConf"
DIFF_SECURITY_LEXICON = "diffSecu"


def match_pattern(terms: Iterable[str], lexicon: Iterable[str]) -> bool:
    """True iff some term has some lexicon entry as a prefix.

    Prefix-of-token matching, not substring: 'security' does not match the
    token 'secure', and 'ip' (were it present) would not match 'description'.
    """
    return textops.match_any_prefix(list(terms), tuple(lexicon))


# --- boolean expressions ---------------------------------------------------


@dataclass(frozen=True)
class Name:
    name: str

    def evaluate(self, env) -> bool:
        return env[self.name]

    def names(self) -> set[str]:
        return {self.name}


@dataclass(frozen=True)
class And:
    parts: tuple

    def evaluate(self, env) -> bool:
        return all(p.evaluate(env) for p in self.parts)

    def names(self) -> set[str]:
        return set().union(*(p.names() for p in self.parts))


@dataclass(frozen=True)
class Or:
    parts: tuple

    def evaluate(self, env) -> bool:
        return any(p.evaluate(env) for p in self.parts)

    def names(self) -> set[str]:
        return set().union(*(p.names() for p in self.parts))


Expr = Union[Name, And, Or]

_EXPR_TOKEN_RE = re.compile(r"\s*(\(|\)|[A-Za-z_][A-Za-z0-9_]*)")


def parse_expression(text: str, where: str = "<expr>") -> Expr:
    """Parse an infix AND/OR/parentheses expression over names."""
    tokens: list[str] = []
    pos = 0
    while pos < len(text):
        m = _EXPR_TOKEN_RE.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise RuleFileError(f"{where}: unexpected character {text[pos]!r} in expression")
            break
        tokens.append(m.group(1))
        pos = m.end()

    idx = 0

    def peek() -> str | None:
        return tokens[idx] if idx < len(tokens) else None

    def take() -> str:
        nonlocal idx
        tok = tokens[idx]
        idx += 1
        return tok

    def parse_or() -> Expr:
        parts = [parse_and()]
        while peek() is not None and peek().upper() == "OR":
            take()
            parts.append(parse_and())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def parse_and() -> Expr:
        parts = [parse_factor()]
        while peek() is not None and peek().upper() == "AND":
            take()
            parts.append(parse_factor())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def parse_factor() -> Expr:
        tok = peek()
        if tok is None:
            raise RuleFileError(f"{where}: expression ended unexpectedly")
        if tok == "(":
            take()
            inner = parse_or()
            if peek() != ")":
                raise RuleFileError(f"{where}: missing closing parenthesis")
            take()
            return inner
        if tok == ")" or tok.upper() in ("AND", "OR"):
            raise RuleFileError(f"{where}: unexpected {tok!r} in expression")
        return Name(take())

    if not tokens:
        raise RuleFileError(f"{where}: empty expression")
    expr = parse_or()
    if idx != len(tokens):
        raise RuleFileError(f"{where}: trailing tokens after expression: {' '.join(tokens[idx:])}")
    return expr


# --- rule set --------------------------------------------------------------


@dataclass(frozen=True)
class RuleSet:
    lexicons: dict[str, tuple[str, ...]]
    rules: dict[Category, Expr]
    subcategories: dict[Category, dict[Subcategory, Expr]] = field(default_factory=dict)

    @property
    def defect_lexicon(self) -> tuple[str, ...]:
        return self.lexicons["hasDefect"]

    def referenced_names(self, category: Category) -> set[str]:
        names = set(self.rules[category].names())
        for expr in self.subcategories.get(category, {}).values():
            names |= expr.names()
        return names


_HEADER_RE = re.compile(r"^\[(.+)\]$")
_CATEGORY_BY_NAME = {c.value: c for c in Category}
_SUBCATEGORY_BY_NAME = {s.value: s for s in Subcategory}


def parse_rule_file(text: str, source: str = "<rules>") -> RuleSet:
    """Parse and validate a rule file."""
    lexicons: dict[str, tuple[str, ...]] = {}
    rules: dict[Category, Expr] = {}
    subcategories: dict[Category, dict[Subcategory, Expr]] = {}

    header: str | None = None
    header_line = 0
    body: list[str] = []

    def flush():
        if header is None:
            if any(body):
                raise RuleFileError(f"{source}:1: content before first section header")
            return
        where = f"{source}:{header_line}"
        kind, _, rest = header.partition(" ")
        rest = rest.strip()
        if kind == "lexicon":
            if not rest:
                raise RuleFileError(f"{where}: lexicon section needs a name")
            if rest in lexicons:
                raise RuleFileError(f"{where}: duplicate lexicon {rest!r}")
            entries = tuple(w.lower() for line in body for w in line.split())
            if not entries:
                raise RuleFileError(f"{where}: lexicon {rest!r} is empty")
            lexicons[rest] = entries
        elif kind == "rule":
            category = _CATEGORY_BY_NAME.get(rest)
            if category is None:
                raise RuleFileError(f"{where}: unknown category {rest!r}")
            if category in rules:
                raise RuleFileError(f"{where}: duplicate rule for {rest!r}")
            rules[category] = parse_expression(" ".join(body), where)
        elif kind == "subcategory":
            parent_name, sep, sub_name = rest.partition("/")
            if not sep:
                raise RuleFileError(f"{where}: expected 'subcategory CATEGORY / NAME'")
            category = _CATEGORY_BY_NAME.get(parent_name.strip())
            sub = _SUBCATEGORY_BY_NAME.get(sub_name.strip())
            if category is None or sub is None or sub not in SUBCATEGORIES.get(category, ()):
                raise RuleFileError(f"{where}: {rest!r} is not a known category/subcategory pair")
            if sub in subcategories.get(category, {}):
                raise RuleFileError(f"{where}: duplicate subcategory {rest!r}")
            subcategories.setdefault(category, {})[sub] = parse_expression(" ".join(body), where)
        else:
            raise RuleFileError(f"{where}: unknown section kind {kind!r}")

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = _HEADER_RE.match(line)
        if m:
            flush()
            header = m.group(1).strip()
            header_line = line_no
            body = []
        else:
            body.append(line)
    flush()

    if "hasDefect" not in lexicons:
        raise RuleFileError(f"{source}: a hasDefect lexicon is required")
    known = set(lexicons) | set(DIFF_SIGNAL_NAMES)
    for category, expr in rules.items():
        names = set(expr.names())
        for sub_expr in subcategories.get(category, {}).values():
            names |= sub_expr.names()
        unknown = names - known
        if unknown:
            raise RuleFileError(
                f"{source}: rule {category.value!r} references unknown names: {', '.join(sorted(unknown))}"
            )
    for category in subcategories:
        if category not in rules:
            raise RuleFileError(f"{source}: subcategories given for {category.value!r} but no rule")
    return RuleSet(lexicons=lexicons, rules=rules, subcategories=subcategories)


def load_rules(path: str | Path | None = None) -> RuleSet:
    """Load a rule file, or the shipped defaults when path is None."""
    if path is None:
        text = resources.files("acid").joinpath("data/default.rules").read_text(encoding="utf-8")
        return parse_rule_file(text, source="default.rules")
    p = Path(path)
    return parse_rule_file(p.read_text(encoding="utf-8"), source=str(p))


@lru_cache(maxsize=1)
def default_rules() -> RuleSet:
    return load_rules(None)
