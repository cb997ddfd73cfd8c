"""Execution-based evaluation: run candidates against tests, score pass@k.

The estimator follows the standard unbiased formulation: with n samples of
which c are correct, pass@k = 1 when n-c < k and otherwise
1 - prod_{i=n-c+1..n} (1 - k/i). Small n is evaluated with exact rational
arithmetic, large n in log space.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import IO, Iterable, Sequence

from .errors import PrivApiError
from .genclient import Candidate
from .runners import RunRequest, SandboxRunner

# Exact integer-product evaluation up to this n; log-space beyond.
_EXACT_N_LIMIT = 64


class InvalidArgs(PrivApiError):
    """pass_at_k precondition violated (need 0 <= c <= n and 1 <= k <= n)."""


class EmptyResults(PrivApiError):
    """An aggregate was requested over zero results."""


class JoinFailure(PrivApiError):
    """A result references a problem that is not in the problem set."""


class Problem:
    """One benchmark item: context, reference solution, tests, golden APIs."""

    __slots__ = (
        "problem_id",
        "benchmark",
        "context",
        "canonical_solution",
        "test_code",
        "golden_api_ids",
        "num_apis",
    )

    def __init__(
        self,
        problem_id: str,
        benchmark: str,
        context: str,
        canonical_solution: str,
        test_code: str,
        golden_api_ids: Sequence[str] = (),
        num_apis: int | None = None,
    ):
        if not context or not test_code:
            raise ValueError(f"problem {problem_id!r}: context and test_code must be non-empty")
        golden = tuple(golden_api_ids)
        if num_apis is None:
            num_apis = max(len(golden), 1)
        if golden and num_apis != len(golden):
            raise ValueError(f"problem {problem_id!r}: num_apis != |golden_api_ids|")
        self.problem_id = problem_id
        self.benchmark = benchmark
        self.context = context
        self.canonical_solution = canonical_solution
        self.test_code = test_code
        self.golden_api_ids = golden
        self.num_apis = num_apis

    def replace(self, **changes) -> "Problem":
        kwargs = {name: getattr(self, name) for name in self.__slots__}
        kwargs.update(changes)
        return Problem(**kwargs)

    def __eq__(self, other):
        return isinstance(other, Problem) and all(
            getattr(self, name) == getattr(other, name) for name in self.__slots__
        )

    def __repr__(self):
        return f"Problem({self.problem_id!r}, benchmark={self.benchmark!r})"


@dataclass(frozen=True)
class ProblemResult:
    """Correct-sample count for one problem at one temperature."""

    problem_id: str
    temperature: float
    n: int
    c: int
    verdicts: tuple[str, ...] = ()

    def __post_init__(self):
        if not (0 <= self.c <= self.n):
            raise ValueError("need 0 <= c <= n")
        if self.verdicts:
            if len(self.verdicts) != self.n:
                raise ValueError("need |verdicts| == n")
            if sum(v == "pass" for v in self.verdicts) != self.c:
                raise ValueError("c must equal the number of pass verdicts")


@dataclass
class EvalReport:
    benchmark: str
    per_problem: list[ProblemResult] = field(default_factory=list)
    pass_at: dict[int, float] = field(default_factory=dict)
    difficulty_buckets: dict[str, float] = field(default_factory=dict)


def pass_at_k(n: int, c: int, k: int) -> float:
    """Unbiased pass@k estimate from n samples with c correct."""
    if not (isinstance(n, int) and isinstance(c, int) and isinstance(k, int)):
        raise InvalidArgs("n, c, k must be integers")
    if not (0 <= c <= n and 1 <= k <= n):
        raise InvalidArgs(f"need 0 <= c <= n and 1 <= k <= n, got n={n} c={c} k={k}")
    if n - c < k:
        return 1.0
    if c == 0:
        return 0.0
    if k == 1:
        # The product telescopes to 1 - (n-c)/n.
        return c / n
    lo, hi = n - c + 1, n
    if n <= _EXACT_N_LIMIT:
        num = math.prod(i - k for i in range(lo, hi + 1))
        den = math.prod(range(lo, hi + 1))
        return float(1 - Fraction(num, den))
    log_prod = math.fsum(math.log1p(-k / i) for i in range(lo, hi + 1))
    return 1.0 - math.exp(log_prod)


def assemble_program(problem: Problem, code: str) -> str:
    """context + candidate code, then the test code on a fresh line."""
    text = problem.context + code
    if not text.endswith("\n"):
        text += "\n"
    return text + "\n" + problem.test_code


def run_problem(
    problem: Problem,
    candidates: Sequence[Candidate],
    runner: SandboxRunner,
    timeout_secs: float = 10.0,
    memory_limit_mb: int = 512,
    workers: int = 1,
) -> list[ProblemResult]:
    """Execute every candidate and aggregate verdicts per temperature.

    Each candidate runs in its own sandbox invocation so one candidate's
    misbehavior can never taint another's verdict. Results are keyed by
    (temperature, sample_index): aggregation is deterministic no matter how
    the worker pool schedules the runs.
    """
    if not candidates:
        raise EmptyResults(f"no candidates for problem {problem.problem_id!r}")
    for cand in candidates:
        if cand.problem_id != problem.problem_id:
            raise JoinFailure(
                f"candidate for {cand.problem_id!r} passed to problem {problem.problem_id!r}"
            )

    def execute(cand: Candidate) -> tuple[tuple[float, int], str]:
        request = RunRequest(
            program_text=assemble_program(problem, cand.code),
            timeout_secs=timeout_secs,
            memory_limit_mb=memory_limit_mb,
        )
        verdict = runner.run(request)
        return (cand.temperature, cand.sample_index), verdict.status

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            keyed = dict(pool.map(execute, candidates))
    else:
        keyed = dict(execute(c) for c in candidates)

    results = []
    for temp in sorted({t for t, _ in keyed}):
        statuses = tuple(keyed[key] for key in sorted(keyed) if key[0] == temp)
        results.append(
            ProblemResult(
                problem_id=problem.problem_id,
                temperature=temp,
                n=len(statuses),
                c=sum(s == "pass" for s in statuses),
                verdicts=statuses,
            )
        )
    return results


def best_over_temperatures(results: Sequence[ProblemResult], k: int) -> float:
    """Benchmark-level pass@k: mean over problems, maximized over temperatures."""
    if not results:
        raise EmptyResults("no results")
    by_temp: dict[float, list[ProblemResult]] = {}
    for r in results:
        by_temp.setdefault(r.temperature, []).append(r)
    means = []
    for temp_results in by_temp.values():
        vals = [pass_at_k(r.n, r.c, k) for r in temp_results]
        means.append(sum(vals) / len(vals))
    return max(means)


def difficulty_bucket(num_apis: int) -> str:
    if num_apis <= 1:
        return "1"
    if num_apis == 2:
        return "2"
    return "3+"


def difficulty_breakdown(
    results: Sequence[ProblemResult], problems: Sequence[Problem]
) -> dict[str, float]:
    """Solved fraction per API-count bucket.

    A problem counts as solved when any sample at any temperature passed.
    Buckets with no problems are omitted.
    """
    by_id = {p.problem_id: p for p in problems}
    solved: dict[str, bool] = {}
    for r in results:
        if r.problem_id not in by_id:
            raise JoinFailure(f"result for unknown problem {r.problem_id!r}")
        solved[r.problem_id] = solved.get(r.problem_id, False) or r.c > 0
    totals: dict[str, int] = {}
    hits: dict[str, int] = {}
    for pid, was_solved in solved.items():
        bucket = difficulty_bucket(by_id[pid].num_apis)
        totals[bucket] = totals.get(bucket, 0) + 1
        hits[bucket] = hits.get(bucket, 0) + int(was_solved)
    return {b: hits[b] / totals[b] for b in sorted(totals)}


def build_report(
    benchmark: str,
    problems: Sequence[Problem],
    results: Sequence[ProblemResult],
    k_list: Sequence[int] = (1, 10, 100),
) -> EvalReport:
    """Aggregate per-problem results into an EvalReport.

    k values exceeding the sample count of any result are skipped (the
    estimator is undefined there).
    """
    if not results:
        raise EmptyResults("no results")
    min_n = min(r.n for r in results)
    pass_at = {k: best_over_temperatures(results, k) for k in k_list if k <= min_n}
    return EvalReport(
        benchmark=benchmark,
        per_problem=sorted(results, key=lambda r: (r.problem_id, r.temperature)),
        pass_at=pass_at,
        difficulty_buckets=difficulty_breakdown(results, problems),
    )


def report_to_dict(report: EvalReport) -> dict:
    return {
        "benchmark": report.benchmark,
        "pass_at": {str(k): round(v, 6) for k, v in sorted(report.pass_at.items())},
        "difficulty_buckets": {b: round(v, 6) for b, v in sorted(report.difficulty_buckets.items())},
        "per_problem": [
            {
                "problem_id": r.problem_id,
                "temperature": r.temperature,
                "n": r.n,
                "c": r.c,
            }
            for r in report.per_problem
        ],
    }


def report_to_json(report: EvalReport) -> str:
    return json.dumps(report_to_dict(report), indent=2, sort_keys=False) + "\n"


_BUCKET_LABELS = {"1": "1 API", "2": "2 APIs", "3+": ">=3 APIs"}


def report_to_text(report: EvalReport) -> str:
    """Plain-text one-row results table plus the difficulty breakdown."""
    ks = sorted(report.pass_at)
    header = f"{'Benchmark':<20}" + "".join(f"pass@{k:<6}" for k in ks)
    row = f"{report.benchmark:<20}" + "".join(
        f"{100 * report.pass_at[k]:<11.2f}" for k in ks
    )
    lines = [header, row]
    if report.difficulty_buckets:
        parts = [
            f"{_BUCKET_LABELS.get(b, b)} {100 * v:.1f}%"
            for b, v in sorted(report.difficulty_buckets.items())
        ]
        lines.append("difficulty: " + " | ".join(parts))
    return "\n".join(lines) + "\n"


def problem_to_dict(problem: Problem) -> dict:
    return {
        "problem_id": problem.problem_id,
        "benchmark": problem.benchmark,
        "context": problem.context,
        "canonical_solution": problem.canonical_solution,
        "test": problem.test_code,
        "golden_api_ids": list(problem.golden_api_ids),
        "num_apis": problem.num_apis,
    }


def problem_from_dict(obj: dict) -> Problem:
    return Problem(
        problem_id=obj["problem_id"],
        benchmark=obj.get("benchmark", ""),
        context=obj["context"],
        canonical_solution=obj.get("canonical_solution", ""),
        test_code=obj["test"],
        golden_api_ids=obj.get("golden_api_ids") or (),
        num_apis=obj.get("num_apis"),
    )


def load_problems(source: IO[str] | Iterable[str]) -> list[Problem]:
    """Read problems from JSON Lines (one problem object per line)."""
    problems = []
    for line in source:
        if line.strip():
            problems.append(problem_from_dict(json.loads(line)))
    return problems


def load_problem_file(path) -> list[Problem]:
    with open(path, encoding="utf-8") as fh:
        return load_problems(fh)


def dump_problems(problems: Iterable[Problem], sink: IO[str]) -> None:
    for problem in problems:
        sink.write(json.dumps(problem_to_dict(problem), ensure_ascii=False))
        sink.write("\n")
