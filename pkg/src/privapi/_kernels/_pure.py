"""Pure-Python reference implementation of the hot kernels.

Must stay output-identical to the Cython twin in ``_speed.pyx``; the
equivalence is enforced by a fuzz test whenever the extension is built.
"""

from __future__ import annotations

import math
import re
from typing import Callable

# Identifier characters are ASCII-only by contract: a token occurrence only
# counts when both neighbours fall outside [A-Za-z0-9_].
_IDENT = "A-Za-z0-9_"

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF


def _fnv1a(data: bytes) -> int:
    h = _FNV_OFFSET
    for b in data:
        h = ((h ^ b) * _FNV_PRIME) & _MASK64
    return h


def make_scanner(pairs) -> Callable[[str], tuple[str, dict[str, int]]]:
    """Compile (public, private) token pairs into a replacement scanner.

    The scanner does one left-to-right pass over the input, matching the
    longest public token at each position, only where the occurrence is
    delimited by non-identifier characters on both sides. Replacement text
    is never re-scanned. Returns the converted text and a per-token
    replacement count (tokens that never matched are absent).
    """
    mapping = {pub: priv for pub, priv in pairs}
    if not mapping:
        return lambda text: (text, {})
    alternation = "|".join(
        re.escape(tok) for tok in sorted(mapping, key=len, reverse=True)
    )
    pattern = re.compile(f"(?<![{_IDENT}])(?:{alternation})(?![{_IDENT}])")

    def scan(text: str) -> tuple[str, dict[str, int]]:
        counts: dict[str, int] = {}

        def repl(m: re.Match) -> str:
            tok = m.group(0)
            counts[tok] = counts.get(tok, 0) + 1
            return mapping[tok]

        return pattern.sub(repl, text), counts

    return scan


def embed_tokens(tokens, dim: int) -> list[float]:
    """Accumulate sublinear term weights (1 + ln tf) into FNV-hashed buckets.

    Returns the raw (unnormalized) ``dim``-length bucket vector; callers
    normalize. Bucket order of accumulation follows first token occurrence
    so results are bit-stable.
    """
    counts: dict[str, int] = {}
    for tok in tokens:
        counts[tok] = counts.get(tok, 0) + 1
    out = [0.0] * dim
    for tok, c in counts.items():
        bucket = _fnv1a(tok.encode("utf-8")) % dim
        out[bucket] += 1.0 + math.log(c)
    return out
