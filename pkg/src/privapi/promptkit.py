"""Prompt assembly: prepend an API-information block to a problem context.

Four settings mirror the evaluation protocol: no-API (bare context), perfect
(golden APIs), top-N (retrieval ranking prefix), and human (voted choices).
API info is rendered as line comments so the prompt stays syntactically
inert for the generator.
"""

from __future__ import annotations

from dataclasses import dataclass

from .docstore import DocStore, api_info_line
from .errors import PrivApiError

NO_API = "no_api"
PERFECT = "perfect"
TOP_N = "top_n"
HUMAN = "human"

_VARIANTS = (NO_API, PERFECT, TOP_N, HUMAN)

HEADER_LINE = "# Useful APIs:"
DEFAULT_BUDGET_CHARS = 4000


class UnknownApiId(PrivApiError):
    """A prompt setting references an api_id absent from the store."""


class BudgetTooSmall(PrivApiError):
    """Even the bare context exceeds the character budget."""


@dataclass(frozen=True)
class PromptSetting:
    """Which APIs to prompt, in which order."""

    variant: str
    api_ids: tuple[str, ...] = ()
    n: int | None = None

    def __post_init__(self):
        if self.variant not in _VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.variant == NO_API and self.api_ids:
            raise ValueError("no_api setting must carry no api_ids")
        if self.variant == TOP_N:
            if self.n is None or self.n < 1:
                raise ValueError("top_n setting needs n >= 1")
            if len(self.api_ids) > self.n:
                raise ValueError("top_n setting carries more than n api_ids")

    @classmethod
    def no_api(cls) -> "PromptSetting":
        return cls(NO_API)

    @classmethod
    def perfect(cls, api_ids) -> "PromptSetting":
        return cls(PERFECT, tuple(api_ids))

    @classmethod
    def top_n(cls, n: int, api_ids) -> "PromptSetting":
        return cls(TOP_N, tuple(api_ids)[:n], n=n)

    @classmethod
    def human(cls, api_ids) -> "PromptSetting":
        return cls(HUMAN, tuple(api_ids))


@dataclass(frozen=True)
class Prompt:
    text: str
    setting: PromptSetting
    problem_id: str = ""


def _render(api_lines: list[str], context: str) -> str:
    if not api_lines:
        return context
    return "\n".join([HEADER_LINE, *api_lines]) + "\n\n" + context


def assemble_prompt(
    context: str,
    setting: PromptSetting,
    store: DocStore,
    budget_chars: int = DEFAULT_BUDGET_CHARS,
    problem_id: str = "",
) -> Prompt:
    """Concatenate the API-information block and the context.

    The block is a ``# Useful APIs:`` header plus one ``# name(sig):desc``
    comment line per API, in the given order. When the assembled text
    exceeds ``budget_chars``, APIs are dropped from the end of the list
    (lowest-ranked first) until it fits; the context itself is never
    touched. An empty surviving list degrades to the bare context.
    """
    if not context:
        raise ValueError("context must be non-empty")
    if len(context) > budget_chars:
        raise BudgetTooSmall(
            f"context is {len(context)} chars, budget is {budget_chars}"
        )
    if setting.variant == NO_API:
        return Prompt(text=context, setting=setting, problem_id=problem_id)

    api_lines = []
    for api_id in setting.api_ids:
        if api_id not in store:
            raise UnknownApiId(api_id)
        api_lines.append(f"# {api_info_line(store.get(api_id))}")

    kept = list(api_lines)
    text = _render(kept, context)
    while kept and len(text) > budget_chars:
        kept.pop()
        text = _render(kept, context)
    return Prompt(text=text, setting=setting, problem_id=problem_id)
