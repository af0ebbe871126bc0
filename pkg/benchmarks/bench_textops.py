"""Benchmark the text kernels: compiled extension vs pure Python.

Generates a commit-message-like workload from the shipped lexicons, checks
that both implementations agree on it, then times each kernel.

Usage: python benchmarks/bench_textops.py [--messages N] [--rounds N] [--seed N]
"""

from __future__ import annotations

import argparse
import random
import timeit

from acid import _textops_py
from acid.rules import default_rules

try:
    from acid import _speedups
except ImportError:
    _speedups = None


def build_workload(count: int, seed: int) -> list[str]:
    rng = random.Random(seed)
    ruleset = default_rules()
    words = sorted({term for lex in ruleset.lexicons.values() for term in lex})
    noise = ["the", "a", "for", "when", "refactor", "cleanup", "release", "minor"]
    messages = []
    for _ in range(count):
        parts = []
        for _ in range(rng.randint(5, 60)):
            word = rng.choice(words) if rng.random() < 0.4 else rng.choice(noise)
            if rng.random() < 0.2:
                word = word + rng.choice(["ed", "ing", "s", "Config", "2"])
            if rng.random() < 0.1:
                word = word.upper()
            parts.append(word)
            if rng.random() < 0.15:
                parts.append(rng.choice([",", ".", ":", "#12", "(x)", "->"]))
        messages.append(" ".join(parts))
    return messages


def check_agreement(messages: list[str], prefixes: tuple[str, ...]) -> None:
    for message in messages[:200]:
        tokens = _textops_py.tokenize(message)
        assert _speedups.tokenize(message) == tokens
        assert _speedups.match_any_prefix(tokens, prefixes) == _textops_py.match_any_prefix(
            tokens, prefixes
        )
        assert _speedups.prefix_hit_indices(tokens, prefixes) == _textops_py.prefix_hit_indices(
            tokens, prefixes
        )


def best_ms(fn, rounds: int) -> float:
    return min(timeit.repeat(fn, number=1, repeat=rounds)) * 1000


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--messages", type=int, default=2000, help="workload size (default 2000)")
    parser.add_argument("--rounds", type=int, default=9, help="timing rounds, best wins (default 9)")
    parser.add_argument("--seed", type=int, default=7, help="workload seed (default 7)")
    args = parser.parse_args()

    messages = build_workload(args.messages, args.seed)
    prefixes = default_rules().defect_lexicon
    token_lists = [_textops_py.tokenize(m) for m in messages]

    if _speedups is None:
        print("compiled extension not built; timing the pure kernels only")
        impls = [("pure", _textops_py)]
    else:
        check_agreement(messages, prefixes)
        impls = [("pure", _textops_py), ("compiled", _speedups)]

    kernels = {
        "tokenize": lambda mod: lambda: [mod.tokenize(m) for m in messages],
        "match_any_prefix": lambda mod: lambda: [
            mod.match_any_prefix(t, prefixes) for t in token_lists
        ],
        "prefix_hit_indices": lambda mod: lambda: [
            mod.prefix_hit_indices(t, prefixes) for t in token_lists
        ],
    }

    print(f"{len(messages)} messages, {sum(len(t) for t in token_lists)} tokens, "
          f"{len(prefixes)} defect prefixes\n")
    header = f"{'kernel':<20}" + "".join(f"{name + ' (ms)':>15}" for name, _ in impls)
    if len(impls) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for kernel, make in kernels.items():
        times = [best_ms(make(mod), args.rounds) for _, mod in impls]
        row = f"{kernel:<20}" + "".join(f"{t:>15.2f}" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:>9.1f}x"
        print(row)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
