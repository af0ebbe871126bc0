"""Text kernel selection: compiled speedups when built, pure Python otherwise."""

try:
    from acid import _speedups as _impl

    USING_SPEEDUPS = True
except ImportError:  # extension not built on this host
    from acid import _textops_py as _impl

    USING_SPEEDUPS = False

tokenize = _impl.tokenize
match_any_prefix = _impl.match_any_prefix
prefix_hit_indices = _impl.prefix_hit_indices
