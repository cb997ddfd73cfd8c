#!/usr/bin/env python3
"""Compare the compiled and pure-Python text kernels.

Usage: python3 benchmarks/bench_kernels.py [--chars N] [--repeat R]

Measures the two hot paths on synthetic corpus-like input: the
identifier-boundary keyword scan and the hashed bag-of-words accumulation.
Both implementations must agree bit-for-bit (checked here too); only the
throughput differs.
"""

import argparse
import random
import re
import string
import time

from privapi._kernels import _pure

try:
    from privapi._kernels import _speed
except ImportError:
    _speed = None

from privapi.benchforge import builtin_map

_TOKEN_RE = re.compile(r"[a-z0-9_]+")


def synthetic_code(chars: int, seed: int = 7) -> str:
    rng = random.Random(seed)
    keyword_map = builtin_map("monkey")
    keys = [pub for pub, _ in keyword_map.entries]
    fillers = [
        "result", "frame_value", "tmp1", "mydf", "config", "load_rows", "items",
        "".join(rng.choice(string.ascii_lowercase) for _ in range(6)),
    ]
    punct = [".", "(", ")", ", ", " = ", "[", "]", ":\n    ", "\n", " + ", "# "]
    parts = []
    size = 0
    while size < chars:
        roll = rng.random()
        if roll < 0.35:
            tok = rng.choice(keys)
        elif roll < 0.7:
            tok = rng.choice(fillers)
        else:
            tok = rng.choice(punct)
        parts.append(tok)
        size += len(tok)
    return "".join(parts)


def timeit(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_scanner(text: str, repeat: int):
    pairs = list(builtin_map("monkey").entries)
    pure_scan = _pure.make_scanner(pairs)
    rows = [("scan/pure", timeit(lambda: pure_scan(text), repeat))]
    if _speed is not None:
        fast_scan = _speed.make_scanner(pairs)
        assert fast_scan(text) == pure_scan(text), "kernel outputs diverged"
        rows.append(("scan/cython", timeit(lambda: fast_scan(text), repeat)))
    return rows


def bench_embed(text: str, repeat: int):
    tokens = _TOKEN_RE.findall(text.lower())
    rows = [("embed/pure", timeit(lambda: _pure.embed_tokens(tokens, 768), repeat))]
    if _speed is not None:
        assert _speed.embed_tokens(tokens, 768) == _pure.embed_tokens(tokens, 768)
        rows.append(("embed/cython", timeit(lambda: _speed.embed_tokens(tokens, 768), repeat)))
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--chars", type=int, default=2_000_000,
                        help="synthetic corpus size in characters")
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    if _speed is None:
        print("note: compiled kernels not built (python setup.py build_ext --inplace)")

    text = synthetic_code(args.chars)
    print(f"input: {len(text):,} chars, {len(_TOKEN_RE.findall(text.lower())):,} tokens\n")
    print(f"{'kernel':<14}{'best time':>12}{'throughput':>16}")
    groups = [bench_scanner(text, args.repeat), bench_embed(text, args.repeat)]
    for rows in groups:
        base = rows[0][1]
        for name, secs in rows:
            speedup = f"  ({base / secs:.1f}x)" if name.endswith("cython") else ""
            print(f"{name:<14}{secs:>10.3f}s{len(text) / secs / 1e6:>13.1f} MB/s{speedup}")
        print()


if __name__ == "__main__":
    main()
