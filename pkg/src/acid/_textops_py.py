"""Pure-Python text kernels.

Reference implementations of the hot-loop primitives; `acid._speedups`
provides compiled equivalents with identical behavior.  Tokenization is
ASCII-alphanumeric: the message is lowercased and every other character acts
as a separator (the pattern lexicons are ASCII, so wider alphabets only add
separators).
"""

import re

_TOKEN_RE = re.compile(r"[a-z0-9]+")


def tokenize(text: str) -> list[str]:
    """Lowercase, replace non-alphanumerics with spaces, split."""
    return _TOKEN_RE.findall(text.lower())


def match_any_prefix(tokens, prefixes) -> bool:
    """True iff some token starts with some lexicon prefix."""
    if not prefixes:
        return False
    pfx = tuple(prefixes)
    for tok in tokens:
        if tok.startswith(pfx):
            return True
    return False


def prefix_hit_indices(tokens, prefixes) -> list[int]:
    """Indices of tokens that start with some lexicon prefix."""
    if not prefixes:
        return []
    pfx = tuple(prefixes)
    return [i for i, tok in enumerate(tokens) if tok.startswith(pfx)]
