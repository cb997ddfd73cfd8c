"""Pseudo-private benchmark fabrication by library-scoped keyword conversion.

A keyword map renames every library-identifying token of a public benchmark
(e.g. pandas -> monkey, df -> kf, isin -> incontain) so pre-trained models
cannot lean on memorization. Replacement is mechanical and deterministic:
whole-identifier occurrences only, longest token first, one left-to-right
pass. String literals and comments are converted too, since problem
descriptions carry library names as well.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import IO, Iterable, Mapping, Sequence

from . import _kernels
from .errors import PrivApiError
from .evalharness import Problem, difficulty_bucket


class KeywordMapError(PrivApiError):
    """The keyword table violates a load-time invariant."""


class MissingIdTranslation(PrivApiError):
    """A golden api_id has no counterpart in the private library."""


@dataclass
class KeywordMap:
    """Ordered public->private token table for one library pair."""

    public_library: str
    private_library: str
    entries: tuple[tuple[str, str], ...]
    _scan: object = field(init=False, repr=False, default=None)

    def __post_init__(self):
        seen = set()
        for public, private in self.entries:
            if not public or not private:
                raise KeywordMapError("empty token in keyword map")
            if public in seen:
                raise KeywordMapError(f"duplicate public token {public!r}")
            seen.add(public)
        # A private token that is also a public key would be rewritten again
        # on a second pass, breaking idempotence.
        for public, private in self.entries:
            if private in seen:
                raise KeywordMapError(
                    f"private token {private!r} collides with a public key"
                )
        self._scan = _kernels.make_scanner(list(self.entries))

    @property
    def library_pair(self) -> tuple[str, str]:
        return (self.public_library, self.private_library)

    def public_tokens(self) -> list[str]:
        return [pub for pub, _ in self.entries]


@dataclass(frozen=True)
class ConversionReport:
    """What a conversion touched: per-token counts plus the unused tokens."""

    replaced: dict[str, int]
    untouched_known_tokens: list[str]


def load_keyword_map(
    source: IO[str] | Iterable[str], public_library: str, private_library: str
) -> KeywordMap:
    """Parse a two-column TSV keyword table ('#' lines are comments)."""
    entries = []
    for line_no, line in enumerate(source, start=1):
        text = line.rstrip("\n")
        if not text.strip() or text.lstrip().startswith("#"):
            continue
        parts = text.split("\t")
        if len(parts) != 2 or not parts[0].strip() or not parts[1].strip():
            raise KeywordMapError(f"line {line_no}: expected two tab-separated tokens")
        entries.append((parts[0].strip(), parts[1].strip()))
    return KeywordMap(public_library, private_library, tuple(entries))


_BUILTIN_MAPS = {
    "monkey": ("pandas_to_monkey.tsv", "pandas"),
    "beatnum": ("numpy_to_beatnum.tsv", "numpy"),
}


def builtin_map(private_library: str) -> KeywordMap:
    """Load one of the bundled tables ("monkey" or "beatnum")."""
    try:
        filename, public = _BUILTIN_MAPS[private_library]
    except KeyError:
        raise KeywordMapError(
            f"no bundled map for {private_library!r}; choose from {sorted(_BUILTIN_MAPS)}"
        ) from None
    data = resources.files("privapi").joinpath("data", filename).read_text("utf-8")
    return load_keyword_map(data.splitlines(), public, private_library)


def convert_text(text: str, keyword_map: KeywordMap) -> tuple[str, ConversionReport]:
    """Apply the keyword table to free text; total, unmatched text unchanged."""
    converted, counts = keyword_map._scan(text)
    untouched = [pub for pub in keyword_map.public_tokens() if pub not in counts]
    return converted, ConversionReport(replaced=counts, untouched_known_tokens=untouched)


def convert_problem(
    problem: Problem,
    keyword_map: KeywordMap,
    id_translation: Mapping[str, str] | None = None,
) -> Problem:
    context, _ = convert_text(problem.context, keyword_map)
    solution, _ = convert_text(problem.canonical_solution, keyword_map)
    test_code, _ = convert_text(problem.test_code, keyword_map)
    golden = []
    for api_id in problem.golden_api_ids:
        if id_translation is None or api_id not in id_translation:
            raise MissingIdTranslation(api_id)
        golden.append(id_translation[api_id])
    return Problem(
        problem_id=f"{problem.problem_id}-{keyword_map.private_library}",
        benchmark=problem.benchmark,
        context=context,
        canonical_solution=solution,
        test_code=test_code,
        golden_api_ids=golden,
        num_apis=problem.num_apis,
    )


def convert_benchmark(
    problems: Sequence[Problem],
    keyword_map: KeywordMap,
    id_translation: Mapping[str, str] | None = None,
) -> list[Problem]:
    """Convert context, solution and tests of every problem.

    Problem ids get a "-<private library>" suffix; golden api_ids are
    remapped through ``id_translation`` (raises MissingIdTranslation when a
    golden id has no private counterpart).
    """
    return [convert_problem(p, keyword_map, id_translation) for p in problems]


@dataclass(frozen=True)
class BucketCheck:
    bucket: str
    expected: float
    actual: int

    @property
    def ok(self) -> bool:
        return abs(self.actual - self.expected) <= 1.0


@dataclass(frozen=True)
class ValidationResult:
    ok: bool
    expected_count: int
    actual_count: int
    count_ok: bool
    buckets: tuple[BucketCheck, ...] = ()

    def failures(self) -> list[str]:
        out = []
        if not self.count_ok:
            out.append(f"count: expected {self.expected_count}, got {self.actual_count}")
        for b in self.buckets:
            if not b.ok:
                out.append(
                    f"bucket {b.bucket}: expected ~{b.expected:g}, got {b.actual}"
                )
        return out


def validate_manifest(
    problems: Sequence[Problem],
    expected_count: int,
    ratio: tuple[int, int, int] | None = None,
) -> ValidationResult:
    """Check problem count and, when a ratio is given, the difficulty split.

    The split buckets problems by API count (1 / 2 / >=3) and accepts a
    deviation of at most one problem per bucket.
    """
    count_ok = len(problems) == expected_count
    buckets: tuple[BucketCheck, ...] = ()
    if ratio is not None:
        if len(ratio) != 3 or any(r <= 0 for r in ratio):
            raise ValueError("ratio must be three positive integers")
        actual = {"1": 0, "2": 0, "3+": 0}
        for p in problems:
            actual[difficulty_bucket(p.num_apis)] += 1
        total_ratio = sum(ratio)
        buckets = tuple(
            BucketCheck(
                bucket=name,
                expected=expected_count * share / total_ratio,
                actual=actual[name],
            )
            for name, share in zip(("1", "2", "3+"), ratio)
        )
    ok = count_ok and all(b.ok for b in buckets)
    return ValidationResult(
        ok=ok,
        expected_count=expected_count,
        actual_count=len(problems),
        count_ok=count_ok,
        buckets=buckets,
    )


def report_to_dict(report: ConversionReport) -> dict:
    return {
        "replaced": dict(sorted(report.replaced.items())),
        "untouched_known_tokens": list(report.untouched_known_tokens),
    }


def report_to_json(report: ConversionReport) -> str:
    return json.dumps(report_to_dict(report), indent=2) + "\n"
