import json

import pytest

from privapi.docstore import ingest_doc_dump
from privapi.promptkit import (
    HEADER_LINE,
    BudgetTooSmall,
    PromptSetting,
    UnknownApiId,
    assemble_prompt,
)


@pytest.fixture
def store():
    lines = [
        json.dumps(
            {
                "api_id": f"m.api{i}",
                "library": "monkey",
                "name": f"api{i}",
                "signature": "x, y",
                "description": f"Does operation number {i} on the frame.",
            }
        )
        for i in range(10)
    ]
    return ingest_doc_dump(lines)


CONTEXT = "# solve the problem\nimport monkey as mk\ndef solve(kf):\n"


class TestAssemble:
    def test_no_api_is_identity(self, store):
        prompt = assemble_prompt(CONTEXT, PromptSetting.no_api(), store)
        assert prompt.text == CONTEXT

    def test_perfect_two_apis_three_comment_lines(self, store):
        setting = PromptSetting.perfect(["m.api1", "m.api2"])
        prompt = assemble_prompt(CONTEXT, setting, store)
        block = prompt.text.split("\n\n")[0]
        lines = block.split("\n")
        assert lines[0] == HEADER_LINE
        assert len(lines) == 3
        assert all(line.startswith("# ") for line in lines)
        assert "api1(x, y):Does operation number 1 on the frame." in lines[1]

    def test_context_suffix_untouched(self, store):
        setting = PromptSetting.perfect(["m.api0"])
        prompt = assemble_prompt(CONTEXT, setting, store)
        assert prompt.text.endswith(CONTEXT)

    def test_order_preserved(self, store):
        ids = ["m.api3", "m.api1", "m.api2"]
        prompt = assemble_prompt(CONTEXT, PromptSetting.human(ids), store)
        positions = [prompt.text.find(f"api{i}(x, y)") for i in (3, 1, 2)]
        assert positions == sorted(positions)

    def test_truncation_drops_suffix_only(self, store):
        ids = [f"m.api{i}" for i in range(10)]
        setting = PromptSetting.top_n(10, ids)
        full = assemble_prompt(CONTEXT, setting, store, budget_chars=10_000)
        budget = len(CONTEXT) + 150  # room for the header and ~2 API lines
        tight = assemble_prompt(CONTEXT, setting, store, budget_chars=budget)
        assert len(tight.text) <= budget
        kept = [line for line in tight.text.split("\n") if line.startswith("# api")]
        full_lines = [line for line in full.text.split("\n") if line.startswith("# api")]
        assert kept == full_lines[: len(kept)]
        assert 0 < len(kept) < len(full_lines)

    def test_truncation_can_drop_everything(self, store):
        ids = [f"m.api{i}" for i in range(10)]
        budget = len(CONTEXT) + 5
        prompt = assemble_prompt(CONTEXT, PromptSetting.perfect(ids), store, budget)
        assert prompt.text == CONTEXT

    def test_bare_context_over_budget(self, store):
        with pytest.raises(BudgetTooSmall):
            assemble_prompt(CONTEXT, PromptSetting.no_api(), store, budget_chars=10)

    def test_unknown_api_id(self, store):
        with pytest.raises(UnknownApiId):
            assemble_prompt(CONTEXT, PromptSetting.perfect(["nope"]), store)


class TestSettings:
    def test_no_api_refuses_ids(self):
        with pytest.raises(ValueError):
            PromptSetting("no_api", ("m.api1",))

    def test_top_n_caps_ids(self):
        setting = PromptSetting.top_n(2, ["a", "b", "c"])
        assert setting.api_ids == ("a", "b")

    def test_top_n_needs_n(self):
        with pytest.raises(ValueError):
            PromptSetting("top_n", ("a",))

    def test_unknown_variant(self):
        with pytest.raises(ValueError):
            PromptSetting("sideways")
