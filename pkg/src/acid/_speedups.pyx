# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled text kernels; behavior must match acid._textops_py exactly."""


def tokenize(text):
    """Lowercase, replace non-alphanumerics with spaces, split (ASCII alnum)."""
    cdef str lowered = text.lower()
    cdef Py_ssize_t n = len(lowered)
    cdef Py_ssize_t i = 0
    cdef Py_ssize_t start = -1
    cdef Py_UCS4 ch
    tokens = []
    for i in range(n):
        ch = lowered[i]
        if (u'a' <= ch <= u'z') or (u'0' <= ch <= u'9'):
            if start < 0:
                start = i
        else:
            if start >= 0:
                tokens.append(lowered[start:i])
                start = -1
    if start >= 0:
        tokens.append(lowered[start:n])
    return tokens


cdef bint _starts_with_any(str tok, tuple prefixes):
    cdef Py_ssize_t tlen = len(tok)
    cdef Py_ssize_t plen, j
    cdef bint matched
    cdef str p
    for p in prefixes:
        plen = len(p)
        if plen > tlen:
            continue
        matched = True
        for j in range(plen):
            if tok[j] != p[j]:
                matched = False
                break
        if matched:
            return True
    return False


def match_any_prefix(tokens, prefixes):
    """True iff some token starts with some lexicon prefix."""
    if not prefixes:
        return False
    cdef tuple pfx = tuple(prefixes)
    cdef str tok
    for tok in tokens:
        if _starts_with_any(tok, pfx):
            return True
    return False


def prefix_hit_indices(tokens, prefixes):
    """Indices of tokens that start with some lexicon prefix."""
    hits = []
    if not prefixes:
        return hits
    cdef tuple pfx = tuple(prefixes)
    cdef Py_ssize_t i = 0
    cdef str tok
    for tok in tokens:
        if _starts_with_any(tok, pfx):
            hits.append(i)
        i += 1
    return hits
