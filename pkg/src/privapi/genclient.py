"""Client for an external code-completion backend.

Sweeps a temperature grid, collecting n samples per temperature. The output
contract is flat and ordered (temperature-major, sample-index-minor)
regardless of how requests are batched. A scriptable mock backend makes the
whole pipeline runnable offline.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass
from typing import Callable, Mapping, Protocol, Sequence

import httpx

from .errors import PrivApiError
from .promptkit import Prompt

DEFAULT_TEMPERATURES = tuple(round(0.1 * i, 1) for i in range(1, 11))
_MAX_ATTEMPTS = 5


class BackendUnavailable(PrivApiError):
    """The completion backend stayed unreachable after all retries."""


class BackendMalformedResponse(PrivApiError):
    """The backend answered with an unusable payload."""


class UnknownProblem(PrivApiError):
    """The mock backend has no script for the requested problem."""


@dataclass(frozen=True)
class GenerationConfig:
    n_samples: int = 200
    temperatures: tuple[float, ...] = DEFAULT_TEMPERATURES
    max_new_tokens: int = 300
    stop_sequences: tuple[str, ...] = ()
    seed: int = 0

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if not self.temperatures:
            raise ValueError("need at least one temperature")
        for t in self.temperatures:
            if not 0 < t <= 2:
                raise ValueError(f"temperature {t} outside (0, 2]")
        if list(self.temperatures) != sorted(set(self.temperatures)):
            raise ValueError("temperatures must be strictly increasing")


@dataclass(frozen=True)
class Candidate:
    problem_id: str
    temperature: float
    sample_index: int
    code: str


class CompletionBackend(Protocol):
    def complete(
        self, prompt: Prompt, n: int, temperature: float, cfg: GenerationConfig
    ) -> list[str]: ...


class MockBackend:
    """Deterministic backend that cycles a scripted completion list."""

    def __init__(self, script: Mapping[str, Sequence[str]]):
        self._script = {pid: list(snippets) for pid, snippets in script.items()}

    def complete(self, prompt, n, temperature, cfg):
        snippets = self._script.get(prompt.problem_id)
        if not snippets:
            raise UnknownProblem(prompt.problem_id or "<missing problem_id>")
        return [snippets[i % len(snippets)] for i in range(n)]


def mock_backend(script: Mapping[str, Sequence[str]]) -> MockBackend:
    return MockBackend(script)


class HttpBackend:
    """POST /complete client; endpoint and auth come from the environment.

    Env vars: GEN_ENDPOINT (base URL), GEN_API_KEY (optional bearer token),
    GEN_TIMEOUT_SECS (default 120).
    """

    def __init__(
        self,
        endpoint: str | None = None,
        api_key: str | None = None,
        timeout_secs: float | None = None,
        transport: httpx.BaseTransport | None = None,
    ):
        self.endpoint = (endpoint or os.environ.get("GEN_ENDPOINT", "")).rstrip("/")
        if not self.endpoint:
            raise ValueError("no endpoint configured (set GEN_ENDPOINT)")
        self.api_key = api_key if api_key is not None else os.environ.get("GEN_API_KEY")
        if timeout_secs is None:
            timeout_secs = float(os.environ.get("GEN_TIMEOUT_SECS", "120"))
        headers = {"Authorization": f"Bearer {self.api_key}"} if self.api_key else {}
        self._client = httpx.Client(
            timeout=timeout_secs, headers=headers, transport=transport
        )

    def complete(self, prompt, n, temperature, cfg):
        body = {
            "prompt": prompt.text,
            "n": n,
            "temperature": temperature,
            "max_new_tokens": cfg.max_new_tokens,
            "stop": list(cfg.stop_sequences),
            "seed": cfg.seed,
        }
        try:
            response = self._client.post(f"{self.endpoint}/complete", json=body)
            response.raise_for_status()
        except httpx.HTTPError as exc:
            raise BackendUnavailable(str(exc)) from exc
        try:
            completions = response.json()["completions"]
        except (KeyError, ValueError) as exc:
            raise BackendMalformedResponse(f"bad payload: {exc}") from exc
        if not isinstance(completions, list) or len(completions) != n:
            raise BackendMalformedResponse(
                f"expected {n} completions, got {completions!r:.120}"
            )
        return [str(c) for c in completions]


def generate(
    prompt: Prompt,
    cfg: GenerationConfig,
    backend: CompletionBackend,
    backoff_base_secs: float = 0.5,
    _sleep: Callable[[float], None] = time.sleep,
) -> list[Candidate]:
    """Collect |temperatures| x n_samples candidates for one prompt.

    Transient backend failures are retried with exponential backoff, at most
    5 attempts per request; malformed responses are not retried.
    """
    candidates = []
    for temperature in cfg.temperatures:
        completions = _with_retries(
            lambda: backend.complete(prompt, cfg.n_samples, temperature, cfg),
            backoff_base_secs,
            _sleep,
        )
        for index, code in enumerate(completions):
            candidates.append(
                Candidate(
                    problem_id=prompt.problem_id,
                    temperature=temperature,
                    sample_index=index,
                    code=code,
                )
            )
    return candidates


def _with_retries(call, backoff_base_secs, sleep):
    last_error: Exception | None = None
    for attempt in range(_MAX_ATTEMPTS):
        try:
            return call()
        except (BackendMalformedResponse, UnknownProblem):
            raise
        except Exception as exc:
            last_error = exc
            if attempt < _MAX_ATTEMPTS - 1:
                sleep(backoff_base_secs * 2**attempt)
    raise BackendUnavailable(
        f"backend failed after {_MAX_ATTEMPTS} attempts: {last_error}"
    ) from last_error
