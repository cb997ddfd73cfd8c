"""Corpus construction: code blocks, retriever training data, API-prompted
pretraining documents, and quality-based resampling weights.

Source files are segmented with a tolerant line-based scan (no full AST):
each top-level function or class definition is one block (methods stay
inside their class block), and module-level code between definitions forms
its own block. All randomness flows from explicit seeds keyed by stable
ids, so outputs are reproducible and independent of scheduling.
"""

from __future__ import annotations

import hashlib
import json
import keyword
import math
import random
import re
from dataclasses import dataclass, replace
from typing import IO, Iterable, Sequence

from .docstore import DocStore, api_info_line
from .errors import PrivApiError


class EmptyFile(PrivApiError):
    """The source file has no non-blank lines."""


class InvalidSignals(PrivApiError):
    """File-quality signals violate their bounds."""


@dataclass(frozen=True)
class CodeBlock:
    block_id: str
    file_id: str
    index_in_file: int
    text: str
    nl_description: str = ""
    matched_api_ids: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError("block text must be non-empty")
        if self.index_in_file < 0:
            raise ValueError("index_in_file must be >= 0")
        if len(set(self.matched_api_ids)) != len(self.matched_api_ids):
            raise ValueError("matched_api_ids must not contain duplicates")


@dataclass(frozen=True)
class RetrievalExample:
    """(description, positive API, same-library negatives) training tuple."""

    description: str
    positive: str
    negatives: tuple[str, ...]
    short: bool = False

    def __post_init__(self):
        if self.positive in self.negatives:
            raise ValueError("positive must not appear among negatives")
        if len(set(self.negatives)) != len(self.negatives):
            raise ValueError("negatives must be distinct")


@dataclass(frozen=True)
class PretrainDocument:
    """Cross-merged file: (API-info lines, block text) per original block."""

    file_id: str
    segments: tuple[tuple[tuple[str, ...], str], ...]
    weight: float

    def __post_init__(self):
        if not 2.0 <= self.weight <= 10.0:
            raise ValueError(f"weight {self.weight} outside [2.0, 10.0]")


@dataclass(frozen=True)
class FileQualitySignals:
    star_count: int
    unit_test_rate: float
    api_name_count: int
    api_match_count: int

    def __post_init__(self):
        if self.star_count < 0:
            raise InvalidSignals("star_count must be >= 0")
        if not 0.0 <= self.unit_test_rate <= 1.0:
            raise InvalidSignals("unit_test_rate must be in [0, 1]")
        if self.api_name_count < 1:
            raise InvalidSignals("api_name_count must be >= 1")
        if self.api_match_count < self.api_name_count:
            raise InvalidSignals("api_match_count must be >= api_name_count")


# --------------------------------------------------------------------------
# segmentation


_DEF_RE = re.compile(r"(?:async\s+)?def\s|class\s")


def _is_def_start(line: str) -> bool:
    return not line[:1].isspace() and _DEF_RE.match(line) is not None


def segment_blocks(source_text: str, file_id: str = "file") -> list[CodeBlock]:
    """Split a source file into top-level blocks, in order.

    Decorators and contiguous comment lines directly above a definition
    belong to that definition's block. Every non-blank line lands in exactly
    one block; blank lines between blocks are inter-block text, so joining
    block texts with the skipped blanks reconstructs the file.
    """
    lines = source_text.split("\n")
    n = len(lines)
    if all(not line.strip() for line in lines):
        raise EmptyFile(file_id)

    owned = [False] * n  # lines claimed by a definition block
    spans: list[tuple[int, int]] = []
    i = 0
    while i < n:
        if _is_def_start(lines[i]):
            start = i
            # attach decorators and heading comments, walking upwards
            while start > 0 and not owned[start - 1] and (
                lines[start - 1].startswith("@") or lines[start - 1].startswith("#")
            ):
                start -= 1
            end = i + 1
            while end < n and (not lines[end].strip() or lines[end][:1].isspace()):
                end += 1
            while end > i + 1 and not lines[end - 1].strip():
                end -= 1  # trailing blanks are inter-block text
            for j in range(start, end):
                owned[j] = True
            spans.append((start, end))
            i = end
        else:
            i += 1

    # unowned runs become module-level blocks (trimmed of blank edges)
    module_spans: list[tuple[int, int]] = []
    i = 0
    while i < n:
        if owned[i]:
            i += 1
            continue
        j = i
        while j < n and not owned[j]:
            j += 1
        a, b = i, j
        while a < b and not lines[a].strip():
            a += 1
        while b > a and not lines[b - 1].strip():
            b -= 1
        if a < b:
            module_spans.append((a, b))
        i = j

    blocks = []
    for index, (a, b) in enumerate(sorted(spans + module_spans)):
        blocks.append(
            CodeBlock(
                block_id=f"{file_id}#{index}",
                file_id=file_id,
                index_in_file=index,
                text="\n".join(lines[a:b]),
            )
        )
    return blocks


# --------------------------------------------------------------------------
# natural-language description


_TRIPLE_RE = re.compile(r"^[rRbBuUfF]{0,2}(\"\"\"|''')")


def _docstring_of(lines: list[str], start: int) -> str | None:
    """Docstring starting at lines[start], or None."""
    stripped = lines[start].strip()
    m = _TRIPLE_RE.match(stripped)
    if m is None:
        return None
    quote = m.group(1)
    rest = stripped[m.end() :]
    close = rest.find(quote)
    if close != -1:
        return rest[:close]
    parts = [rest]
    for line in lines[start + 1 :]:
        close = line.find(quote)
        if close != -1:
            parts.append(line[:close])
            return "\n".join(parts)
        parts.append(line)
    return "\n".join(parts)  # unterminated: tolerate, take the rest


def extract_nl_description(block: CodeBlock) -> str:
    """The block's docstring, else its heading comment lines, else "".

    The result is whitespace-normalized to single spaces.
    """
    lines = block.text.split("\n")
    i = 0
    comments = []
    while i < len(lines) and lines[i].lstrip().startswith("#"):
        comments.append(lines[i].lstrip().lstrip("#").strip())
        i += 1
    while i < len(lines) and lines[i].lstrip().startswith("@"):
        i += 1
    if i < len(lines) and _DEF_RE.match(lines[i].lstrip()):
        # consume the (possibly multi-line) header up to its closing colon
        depth = 0
        while i < len(lines):
            line = lines[i]
            depth += line.count("(") + line.count("[") - line.count(")") - line.count("]")
            i += 1
            if depth <= 0 and line.split("#")[0].rstrip().endswith(":"):
                break
    while i < len(lines) and not lines[i].strip():
        i += 1
    if i < len(lines):
        doc = _docstring_of(lines, i)
        if doc is not None:
            return " ".join(doc.split())
    return " ".join(" ".join(comments).split())


# --------------------------------------------------------------------------
# API matching


_CALL_RE = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)\s*\(")
_DEF_SITE_RE = re.compile(r"\b(?:def|class)\s*$")
_KEYWORDS = frozenset(keyword.kwlist)


def _stable_rng(*parts) -> random.Random:
    """RNG seeded from a stable digest of the key parts (hash() is salted)."""
    key = "\x1f".join(str(p) for p in parts).encode("utf-8")
    seed = int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "big")
    return random.Random(seed)


def match_apis(block: CodeBlock, store: DocStore, rng_seed: int) -> list[str]:
    """Resolve called identifiers against the store's name index.

    Multi-match names are settled by a uniform pick from a generator seeded
    by (rng_seed, file_id, block_id, name): the same inputs always choose
    the same record. Output keeps source order, deduplicated.
    """
    out: list[str] = []
    seen: set[str] = set()
    for m in _CALL_RE.finditer(block.text):
        name = m.group(1)
        if name in _KEYWORDS:
            continue
        if _DEF_SITE_RE.search(block.text[max(0, m.start() - 16) : m.start()]):
            continue
        candidates = store.by_name.get(name)
        if not candidates:
            continue
        if len(candidates) == 1:
            chosen = candidates[0]
        else:
            rng = _stable_rng(rng_seed, block.file_id, block.block_id, name)
            chosen = rng.choice(sorted(candidates))
        if chosen not in seen:
            seen.add(chosen)
            out.append(chosen)
    return out


def annotate_blocks(
    blocks: Sequence[CodeBlock], store: DocStore, rng_seed: int
) -> list[CodeBlock]:
    """Fill nl_description and matched_api_ids for every block."""
    return [
        replace(
            block,
            nl_description=extract_nl_description(block),
            matched_api_ids=tuple(match_apis(block, store, rng_seed)),
        )
        for block in blocks
    ]


# --------------------------------------------------------------------------
# retriever training data


DEFAULT_NEGATIVE_RATIO = 8


def build_retrieval_examples(
    blocks: Sequence[CodeBlock],
    store: DocStore,
    neg_ratio: int = DEFAULT_NEGATIVE_RATIO,
    rng_seed: int = 0,
) -> list[RetrievalExample]:
    """One example per (described block, matched API).

    Negatives are drawn uniformly without replacement from the positive's
    library, excluding every API matched in the block. Libraries too small
    to supply ``neg_ratio`` negatives yield all they have, flagged short.
    """
    if neg_ratio < 1:
        raise ValueError("neg_ratio must be >= 1")
    examples = []
    for block in blocks:
        if not block.nl_description:
            continue
        excluded = set(block.matched_api_ids)
        for positive in block.matched_api_ids:
            library = store.library_of(positive)
            pool = sorted(i for i in store.by_library[library] if i not in excluded)
            rng = _stable_rng(rng_seed, block.file_id, block.block_id, positive, "neg")
            take = min(neg_ratio, len(pool))
            negatives = tuple(rng.sample(pool, take))
            examples.append(
                RetrievalExample(
                    description=block.nl_description,
                    positive=positive,
                    negatives=negatives,
                    short=take < neg_ratio,
                )
            )
    return examples


# --------------------------------------------------------------------------
# pretraining documents


DEFAULT_NOISE_RATE = 0.05


def derive_quality_signals(
    blocks: Sequence[CodeBlock],
    store: DocStore,
    star_count: int = 0,
    unit_test_rate: float = 0.0,
) -> FileQualitySignals:
    """Signals with API counts derived from the blocks' name matches.

    Star count and unit-test rate cannot be derived from source text and
    default to the most neutral values unless provided.
    """
    names = set()
    for block in blocks:
        for api_id in block.matched_api_ids:
            names.add(store.get(api_id).name)
    match_count = sum(len(store.by_name[name]) for name in names)
    return FileQualitySignals(
        star_count=star_count,
        unit_test_rate=unit_test_rate,
        api_name_count=max(len(names), 1),
        api_match_count=max(match_count, len(names), 1),
    )


def build_pretrain_doc(
    blocks: Sequence[CodeBlock],
    store: DocStore,
    noise_rate: float = DEFAULT_NOISE_RATE,
    rng_seed: int = 0,
    signals: FileQualitySignals | None = None,
) -> PretrainDocument:
    """Cross-merge (API-info set, block) pairs into one pretraining document.

    Each block's true API lines are joined by noise: per true API, with
    probability ``noise_rate``, one uniformly chosen unrelated same-library
    API line is appended. The combined set is then shuffled (seeded).
    """
    if not 0.0 <= noise_rate <= 1.0:
        raise ValueError("noise_rate must be in [0, 1]")
    if not blocks:
        raise EmptyFile("no blocks")
    file_id = blocks[0].file_id
    segments = []
    for block in blocks:
        lines = [api_info_line(store.get(i)) for i in block.matched_api_ids]
        excluded = set(block.matched_api_ids)
        for api_id in block.matched_api_ids:
            rng = _stable_rng(rng_seed, file_id, block.block_id, api_id, "noise")
            if rng.random() < noise_rate:
                library = store.library_of(api_id)
                pool = sorted(i for i in store.by_library[library] if i not in excluded)
                if pool:
                    lines.append(api_info_line(store.get(rng.choice(pool))))
        rng = _stable_rng(rng_seed, file_id, block.block_id, "shuffle")
        rng.shuffle(lines)
        segments.append((tuple(lines), block.text))
    if signals is None:
        signals = derive_quality_signals(blocks, store)
    return PretrainDocument(
        file_id=file_id,
        segments=tuple(segments),
        weight=resample_weight(signals),
    )


# --------------------------------------------------------------------------
# resampling


def _clip(value: float, lo: float, hi: float) -> float:
    return max(lo, min(hi, value))


def resample_weight(signals: FileQualitySignals) -> float:
    """Quality weight from stars, unit-test rate, and API-match ambiguity.

    w_star in [1, 2], w_ut in [0.5, 1], w_api in [4, 5]; the product is
    therefore bounded to [2, 10]. Logarithms are natural.
    """
    if signals.api_name_count < 1:
        raise InvalidSignals("api_name_count must be >= 1")
    if signals.api_match_count < signals.api_name_count:
        raise InvalidSignals("api_match_count must be >= api_name_count")
    w_star = 1.0 + _clip(math.log(signals.star_count + 1), 0.0, 5.0) * 0.2
    w_ut = _clip(0.5 + (1.0 - signals.unit_test_rate), 0.0, 1.0)
    w_api = 5.0 - _clip(
        math.log(signals.api_match_count / signals.api_name_count), 0.0, 5.0
    ) * 0.2
    return w_star * w_ut * w_api


def weighted_sample(
    docs: Sequence[PretrainDocument], count: int, rng_seed: int
) -> list[str]:
    """Draw ``count`` file_ids with replacement, probability ~ weight."""
    if not docs:
        raise ValueError("docs must be non-empty")
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = random.Random(rng_seed)
    return rng.choices(
        [d.file_id for d in docs], weights=[d.weight for d in docs], k=count
    )


# --------------------------------------------------------------------------
# serialization (JSON Lines)


def example_to_dict(example: RetrievalExample) -> dict:
    obj = {
        "description": example.description,
        "positive": example.positive,
        "negatives": list(example.negatives),
    }
    if example.short:
        obj["short"] = True
    return obj


def document_to_dict(doc: PretrainDocument) -> dict:
    return {
        "file_id": doc.file_id,
        "segments": [
            {"api_info_lines": list(lines), "block_text": text}
            for lines, text in doc.segments
        ],
        "weight": round(doc.weight, 6),
    }


def dump_jsonl(objs: Iterable[dict], sink: IO[str]) -> None:
    for obj in objs:
        sink.write(json.dumps(obj, ensure_ascii=False))
        sink.write("\n")


def load_quality_signals(source: IO[str] | Iterable[str]) -> dict[str, FileQualitySignals]:
    """Sidecar JSON Lines: {"file": path, "star_count": ..., ...} per line."""
    out = {}
    for line in source:
        if not line.strip():
            continue
        obj = json.loads(line)
        out[obj["file"]] = FileQualitySignals(
            star_count=int(obj["star_count"]),
            unit_test_rate=float(obj["unit_test_rate"]),
            api_name_count=int(obj["api_name_count"]),
            api_match_count=int(obj["api_match_count"]),
        )
    return out


def forge_file(
    file_id: str,
    source_text: str,
    store: DocStore,
    neg_ratio: int = DEFAULT_NEGATIVE_RATIO,
    noise_rate: float = DEFAULT_NOISE_RATE,
    rng_seed: int = 0,
    signals: FileQualitySignals | None = None,
) -> tuple[list[RetrievalExample], PretrainDocument]:
    """Segment + annotate one file and emit its examples and document."""
    blocks = annotate_blocks(segment_blocks(source_text, file_id), store, rng_seed)
    examples = build_retrieval_examples(blocks, store, neg_ratio, rng_seed)
    doc = build_pretrain_doc(blocks, store, noise_rate, rng_seed, signals)
    return examples, doc
