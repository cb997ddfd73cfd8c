"""HTTP service: problem listing, candidate APIs, human selections, voting,
and synchronous desk-scale generation.

This is the surface the human-in-the-loop frontend consumes. Candidate
responses carry API names and descriptions only — never signatures, which
measurably mislead choosers. Selections are persisted append-only, last
write per (problem, user) wins; the doc store and benchmark files are never
mutated.
"""

from __future__ import annotations

import json
import os
import threading
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from . import docstore, evalharness, genclient, promptkit
from . import retriever as retr
from .runners import InProcessRunner

UI_CANDIDATE_K = 5
UI_SAMPLE_CAP = 20


class SelectionBody(BaseModel):
    user_id: str = Field(min_length=1)
    api_ids: list[str] = Field(min_length=1)


class GenerateBody(BaseModel):
    n: int = 4
    temperature: float = 0.2


def problem_description(problem: evalharness.Problem) -> str:
    """The natural-language statement: leading comment lines of the context."""
    lines = []
    for line in problem.context.split("\n"):
        stripped = line.strip()
        if stripped.startswith("#"):
            lines.append(stripped.lstrip("#").strip())
        elif stripped:
            break
    return " ".join(lines)


class SelectionStore:
    """Append-only JSONL persistence; in-memory view is last-write-wins."""

    def __init__(self, path: Path):
        self.path = path
        self._lock = threading.Lock()
        self._by_problem: dict[str, dict[str, list[str]]] = {}
        if path.exists():
            with open(path, encoding="utf-8") as fh:
                for line in fh:
                    if line.strip():
                        obj = json.loads(line)
                        self._by_problem.setdefault(obj["problem_id"], {})[
                            obj["user_id"]
                        ] = list(obj["api_ids"])

    def record(self, problem_id: str, user_id: str, api_ids: list[str]) -> None:
        with self._lock:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(
                    json.dumps(
                        {"problem_id": problem_id, "user_id": user_id, "api_ids": api_ids}
                    )
                )
                fh.write("\n")
            self._by_problem.setdefault(problem_id, {})[user_id] = list(api_ids)

    def selections_for(self, problem_id: str) -> dict[str, list[str]]:
        with self._lock:
            return dict(self._by_problem.get(problem_id, {}))


def default_selections_path() -> Path:
    home = Path(os.environ.get("PRIVAPI_HOME", ".privapi"))
    return home / "selections.jsonl"


def create_app(
    doc_dump_path=None,
    benchmark_path=None,
    *,
    store: docstore.DocStore | None = None,
    problems: list[evalharness.Problem] | None = None,
    embedder=None,
    backend=None,
    mock_script_path=None,
    selections_path: Path | None = None,
    runner=None,
    ui_dir=None,
) -> FastAPI:
    if store is None:
        store = docstore.load_doc_dump(doc_dump_path)
    if problems is None:
        problems = evalharness.load_problem_file(benchmark_path)
    if embedder is None:
        embedder = retr.BaselineEmbedder()
    if backend is None and mock_script_path:
        with open(mock_script_path, encoding="utf-8") as fh:
            backend = genclient.mock_backend(json.load(fh))
    if runner is None:
        runner = InProcessRunner()

    by_id = {p.problem_id: p for p in problems}
    index = retr.build_index(store, embedder)
    selections = SelectionStore(selections_path or default_selections_path())
    candidate_cache: dict[str, list[str]] = {}

    app = FastAPI(title="privapi service")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    def get_problem(problem_id: str) -> evalharness.Problem:
        problem = by_id.get(problem_id)
        if problem is None:
            raise HTTPException(404, f"unknown problem {problem_id!r}")
        return problem

    def candidate_ids(problem_id: str) -> list[str]:
        if problem_id not in candidate_cache:
            problem = by_id[problem_id]
            ranking = retr.query(
                index, problem_description(problem) or problem.context,
                UI_CANDIDATE_K, embedder,
            )
            candidate_cache[problem_id] = ranking.ids()
        return candidate_cache[problem_id]

    @app.get("/problems")
    def list_problems():
        return [
            {
                "problem_id": p.problem_id,
                "benchmark": p.benchmark,
                "description": problem_description(p),
                "context": p.context,
            }
            for p in problems
        ]

    @app.get("/problems/{problem_id}/candidates")
    def candidates(problem_id: str, k: int = UI_CANDIDATE_K):
        problem = get_problem(problem_id)
        ids = candidate_ids(problem.problem_id)[: max(1, min(k, UI_CANDIDATE_K))]
        return {
            "problem_id": problem_id,
            "candidates": [
                {
                    "api_id": api_id,
                    "name": store.get(api_id).name,
                    "description": store.get(api_id).description_first,
                }
                for api_id in ids
            ],
        }

    @app.post("/problems/{problem_id}/selections")
    def post_selection(problem_id: str, body: SelectionBody):
        get_problem(problem_id)
        allowed = set(candidate_ids(problem_id))
        bad = [api_id for api_id in body.api_ids if api_id not in allowed]
        if bad:
            raise HTTPException(422, f"api_ids outside the candidate list: {bad}")
        selections.record(problem_id, body.user_id, body.api_ids)
        return {"ok": True, "voters": len(selections.selections_for(problem_id))}

    def voted_ids(problem_id: str) -> tuple[list[str], int]:
        chosen = selections.selections_for(problem_id)
        if not chosen:
            raise HTTPException(409, "no selections recorded for this problem yet")
        votes = [set(ids) for ids in chosen.values()]
        winners = retr.aggregate_votes(votes)
        ranked = candidate_ids(problem_id)
        ordered = [api_id for api_id in ranked if api_id in winners]
        ordered += sorted(winners - set(ranked))
        return ordered, len(votes)

    @app.get("/problems/{problem_id}/vote")
    def vote(problem_id: str):
        get_problem(problem_id)
        ordered, voters = voted_ids(problem_id)
        return {
            "problem_id": problem_id,
            "api_ids": ordered,
            "voters": voters,
            "threshold": voters // 2 + 1,
        }

    @app.post("/problems/{problem_id}/generate")
    def generate(problem_id: str, body: GenerateBody):
        problem = get_problem(problem_id)
        if backend is None:
            raise HTTPException(503, "no completion backend configured")
        ordered, _ = voted_ids(problem_id)
        prompt = promptkit.assemble_prompt(
            problem.context,
            promptkit.PromptSetting.human(ordered),
            store,
            problem_id=problem_id,
        )
        cfg = genclient.GenerationConfig(
            n_samples=max(1, min(body.n, UI_SAMPLE_CAP)),
            temperatures=(body.temperature,),
        )
        cands = genclient.generate(prompt, cfg, backend)
        (result,) = evalharness.run_problem(problem, cands, runner)
        return {
            "problem_id": problem_id,
            "prompted_api_ids": ordered,
            "temperature": body.temperature,
            "n": result.n,
            "c": result.c,
            "verdicts": list(result.verdicts),
            "pass_at_1": round(evalharness.pass_at_k(result.n, result.c, 1), 6),
        }

    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
