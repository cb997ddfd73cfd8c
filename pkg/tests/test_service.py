import json
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from privapi.service import create_app

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def client(tmp_path):
    app = create_app(
        doc_dump_path=FIXTURES / "doc_dump.jsonl",
        benchmark_path=FIXTURES / "micro_benchmark.jsonl",
        mock_script_path=FIXTURES / "mock_script.json",
        selections_path=tmp_path / "selections.jsonl",
    )
    return TestClient(app)


def top5_ids(client, problem_id="p1"):
    return [c["api_id"] for c in client.get(f"/problems/{problem_id}/candidates").json()["candidates"]]


class TestProblems:
    def test_listing(self, client):
        rows = client.get("/problems").json()
        assert [r["problem_id"] for r in rows] == ["p1", "p2", "p3"]
        assert rows[0]["description"] == "Sum the squares of the inputs"

    def test_unknown_problem_404(self, client):
        assert client.get("/problems/zzz/candidates").status_code == 404


class TestCandidates:
    def test_exactly_five_entries_no_signature(self, client):
        payload = client.get("/problems/p1/candidates?k=5").json()
        assert len(payload["candidates"]) == 5
        for card in payload["candidates"]:
            assert set(card) == {"api_id", "name", "description"}
            assert "signature" not in card

    def test_k_is_capped_at_five(self, client):
        payload = client.get("/problems/p1/candidates?k=50").json()
        assert len(payload["candidates"]) == 5

    def test_stable_between_calls(self, client):
        first = top5_ids(client)
        second = top5_ids(client)
        assert first == second


class TestSelections:
    def test_happy_path(self, client):
        ids = top5_ids(client)
        response = client.post(
            "/problems/p1/selections", json={"user_id": "u1", "api_ids": ids[:2]}
        )
        assert response.status_code == 200
        assert response.json()["voters"] == 1

    def test_non_candidate_api_rejected_422(self, client):
        response = client.post(
            "/problems/p1/selections",
            json={"user_id": "u1", "api_ids": ["monkey.nonexistent"]},
        )
        assert response.status_code == 422

    def test_empty_selection_rejected(self, client):
        response = client.post(
            "/problems/p1/selections", json={"user_id": "u1", "api_ids": []}
        )
        assert response.status_code == 422

    def test_vote_before_selection_409(self, client):
        assert client.get("/problems/p1/vote").status_code == 409

    def test_majority_vote(self, client):
        ids = top5_ids(client)
        votes = [
            ("u1", [ids[0], ids[1]]),
            ("u2", [ids[0]]),
            ("u3", [ids[2]]),
        ]
        for user_id, chosen in votes:
            client.post("/problems/p1/selections", json={"user_id": user_id, "api_ids": chosen})
        payload = client.get("/problems/p1/vote").json()
        assert payload["api_ids"] == [ids[0]]
        assert payload["voters"] == 3
        assert payload["threshold"] == 2

    def test_last_write_wins_per_user(self, client):
        ids = top5_ids(client)
        client.post("/problems/p1/selections", json={"user_id": "u1", "api_ids": [ids[0]]})
        client.post("/problems/p1/selections", json={"user_id": "u1", "api_ids": [ids[1]]})
        client.post("/problems/p1/selections", json={"user_id": "u2", "api_ids": [ids[1]]})
        client.post("/problems/p1/selections", json={"user_id": "u3", "api_ids": [ids[1]]})
        payload = client.get("/problems/p1/vote").json()
        assert payload["api_ids"] == [ids[1]]

    def test_selections_persisted_across_restart(self, client, tmp_path):
        ids = top5_ids(client)
        client.post("/problems/p1/selections", json={"user_id": "u1", "api_ids": [ids[0]]})
        reopened = TestClient(
            create_app(
                doc_dump_path=FIXTURES / "doc_dump.jsonl",
                benchmark_path=FIXTURES / "micro_benchmark.jsonl",
                selections_path=tmp_path / "selections.jsonl",
            )
        )
        assert reopened.get("/problems/p1/vote").json()["api_ids"] == [ids[0]]


class TestGenerateEndpoint:
    def vote_all(self, client, problem_id):
        ids = top5_ids(client, problem_id)
        for user in ("u1", "u2", "u3"):
            client.post(
                f"/problems/{problem_id}/selections",
                json={"user_id": user, "api_ids": [ids[0]]},
            )
        return ids[0]

    def test_generate_after_vote(self, client):
        self.vote_all(client, "p1")
        response = client.post("/problems/p1/generate", json={"n": 4, "temperature": 0.2})
        assert response.status_code == 200
        payload = response.json()
        assert payload["n"] == 4
        assert payload["c"] == 4
        assert payload["pass_at_1"] == 1.0
        assert payload["verdicts"] == ["pass"] * 4

    def test_generate_requires_vote_409(self, client):
        assert client.post("/problems/p2/generate", json={"n": 2}).status_code == 409

    def test_sample_cap_enforced(self, client):
        self.vote_all(client, "p1")
        payload = client.post("/problems/p1/generate", json={"n": 999}).json()
        assert payload["n"] == 20

    def test_broken_problem_reports_failures(self, client):
        self.vote_all(client, "p3")
        payload = client.post("/problems/p3/generate", json={"n": 3}).json()
        assert payload["c"] == 0
        assert payload["pass_at_1"] == 0.0
