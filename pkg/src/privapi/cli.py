"""Command-line entry points wiring the pipeline together.

Every command is a thin wrapper over one module pipeline. Exit codes:
0 success, 1 validation error (bad inputs), 2 runtime failure. Errors go
to stderr as one machine-readable JSON object.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import benchforge, corpusforge, docstore, evalharness, genclient, promptkit
from . import retriever as retr
from .errors import PrivApiError
from .runners import InProcessRunner, SubprocessRunner


def _fail(exit_code: int, error: Exception) -> None:
    payload = {"error": type(error).__name__, "message": str(error)}
    click.echo(json.dumps(payload), err=True)
    sys.exit(exit_code)


def _guarded(fn):
    """Map exceptions to the exit-code contract."""

    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (PrivApiError, ValueError, OSError, json.JSONDecodeError) as exc:
            _fail(1, exc)
        except click.ClickException:
            raise
        except Exception as exc:  # unexpected: runtime failure
            _fail(2, exc)

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


@click.group()
def main():
    """Retrieval-augmented code generation toolkit for private libraries."""


@main.command()
@click.option("--doc-dump", "doc_dump", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Write the normalized dump here.")
@_guarded
def ingest(doc_dump, out_path):
    """Validate a doc dump and report store statistics."""
    store = docstore.load_doc_dump(doc_dump)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            docstore.dump_store(store, fh)
    stats = {
        "records": len(store),
        "libraries": {lib: len(ids) for lib, ids in sorted(store.by_library.items())},
    }
    click.echo(json.dumps(stats, indent=2))


@main.command()
@click.option("--doc-dump", "doc_dump", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--dimension", default=retr.DEFAULT_DIMENSION, show_default=True)
@_guarded
def index(doc_dump, out_path, dimension):
    """Embed every record and persist the inner-product index."""
    store = docstore.load_doc_dump(doc_dump)
    embedder = retr.BaselineEmbedder(dimension)
    built = retr.build_index(store, embedder)
    retr.save_index(built, out_path)
    click.echo(json.dumps({"entries": len(built), "dimension": dimension,
                           "fingerprint": built.embedder_fingerprint}))


@main.command()
@click.option("--index", "index_path", required=True, type=click.Path(exists=True))
@click.option("--doc-dump", "doc_dump", required=True, type=click.Path(exists=True))
@click.option("--query", "query_text", required=True)
@click.option("-k", "top_k", default=5, show_default=True)
@_guarded
def retrieve(index_path, doc_dump, query_text, top_k):
    """Print the top-k APIs for a problem description as JSON."""
    store = docstore.load_doc_dump(doc_dump)
    loaded = retr.load_index(index_path)
    embedder = retr.BaselineEmbedder(loaded.dimension)
    ranking = retr.query(loaded, query_text, top_k, embedder)
    rows = [
        {
            "api_id": api_id,
            "name": store.get(api_id).name,
            "description": store.get(api_id).description_first,
            "score": round(score, 6),
        }
        for api_id, score in ranking.ranked
    ]
    click.echo(json.dumps(rows, indent=2))


def _parse_setting(setting, api_ids, top_n):
    ids = list(api_ids)
    if setting == "no_api":
        return promptkit.PromptSetting.no_api()
    if setting == "perfect":
        return promptkit.PromptSetting.perfect(ids)
    if setting == "top_n":
        return promptkit.PromptSetting.top_n(top_n, ids)
    return promptkit.PromptSetting.human(ids)


@main.command()
@click.option("--doc-dump", "doc_dump", required=True, type=click.Path(exists=True))
@click.option("--benchmark", "benchmark_path", required=True, type=click.Path(exists=True))
@click.option("--problem-id", required=True)
@click.option("--setting", type=click.Choice(["no_api", "perfect", "top_n", "human"]),
              default="perfect", show_default=True)
@click.option("--api-id", "api_ids", multiple=True,
              help="Explicit APIs for top_n/human settings (repeatable).")
@click.option("-n", "top_n", default=5, show_default=True)
@click.option("--budget", default=promptkit.DEFAULT_BUDGET_CHARS, show_default=True)
@_guarded
def prompt(doc_dump, benchmark_path, problem_id, setting, api_ids, top_n, budget):
    """Assemble and print the generation prompt for one problem."""
    store = docstore.load_doc_dump(doc_dump)
    problems = {p.problem_id: p for p in evalharness.load_problem_file(benchmark_path)}
    if problem_id not in problems:
        raise ValueError(f"unknown problem {problem_id!r}")
    problem = problems[problem_id]
    if setting == "perfect" and not api_ids:
        api_ids = problem.golden_api_ids
    built = promptkit.assemble_prompt(
        problem.context, _parse_setting(setting, api_ids, top_n), store,
        budget_chars=budget, problem_id=problem_id,
    )
    click.echo(built.text, nl=False)


def _make_backend(backend, script_path):
    if backend == "mock":
        if not script_path:
            raise ValueError("--script is required with the mock backend")
        with open(script_path, encoding="utf-8") as fh:
            return genclient.mock_backend(json.load(fh))
    return genclient.HttpBackend()


def _make_runner(runner_name):
    if runner_name == "subprocess":
        return SubprocessRunner()
    return InProcessRunner()


@main.command()
@click.option("--doc-dump", "doc_dump", required=True, type=click.Path(exists=True))
@click.option("--benchmark", "benchmark_path", required=True, type=click.Path(exists=True))
@click.option("--setting", type=click.Choice(["no_api", "perfect"]), default="no_api",
              show_default=True)
@click.option("--backend", type=click.Choice(["mock", "http"]), default="mock",
              show_default=True)
@click.option("--script", "script_path", type=click.Path(exists=True), default=None,
              help="problem_id -> completions JSON for the mock backend.")
@click.option("-n", "n_samples", default=4, show_default=True)
@click.option("--temperature", "temperatures", multiple=True, type=float, default=(0.2,),
              show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
@_guarded
def generate(doc_dump, benchmark_path, setting, backend, script_path, n_samples,
             temperatures, seed, out_path):
    """Collect candidates for every problem into a JSON Lines file."""
    store = docstore.load_doc_dump(doc_dump)
    problems = evalharness.load_problem_file(benchmark_path)
    cfg = genclient.GenerationConfig(
        n_samples=n_samples, temperatures=tuple(sorted(temperatures)), seed=seed
    )
    chosen_backend = _make_backend(backend, script_path)
    with open(out_path, "w", encoding="utf-8") as fh:
        for problem in problems:
            prompt_setting = (
                promptkit.PromptSetting.perfect(problem.golden_api_ids)
                if setting == "perfect"
                else promptkit.PromptSetting.no_api()
            )
            built = promptkit.assemble_prompt(
                problem.context, prompt_setting, store, problem_id=problem.problem_id
            )
            for cand in genclient.generate(built, cfg, chosen_backend):
                fh.write(json.dumps({
                    "problem_id": cand.problem_id,
                    "temperature": cand.temperature,
                    "sample_index": cand.sample_index,
                    "code": cand.code,
                }, ensure_ascii=False))
                fh.write("\n")
    click.echo(json.dumps({"problems": len(problems),
                           "candidates": len(problems) * len(cfg.temperatures) * n_samples}))


def _load_candidates(path):
    by_problem: dict[str, list[genclient.Candidate]] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            obj = json.loads(line)
            cand = genclient.Candidate(
                problem_id=obj["problem_id"],
                temperature=float(obj["temperature"]),
                sample_index=int(obj["sample_index"]),
                code=obj["code"],
            )
            by_problem.setdefault(cand.problem_id, []).append(cand)
    return by_problem


@main.command(name="eval")
@click.option("--benchmark", "benchmark_path", required=True, type=click.Path(exists=True))
@click.option("--candidates", "candidates_path", type=click.Path(exists=True), default=None)
@click.option("--backend", type=click.Choice(["mock", "http"]), default="mock",
              show_default=True)
@click.option("--script", "script_path", type=click.Path(exists=True), default=None)
@click.option("-n", "n_samples", default=4, show_default=True)
@click.option("--temperature", "temperatures", multiple=True, type=float, default=(0.2,))
@click.option("--k", "k_list", multiple=True, type=int, default=(1, 10, 100),
              show_default=True)
@click.option("--runner", "runner_name", type=click.Choice(["inprocess", "subprocess"]),
              default="inprocess", show_default=True)
@click.option("--timeout", "timeout_secs", default=10.0, show_default=True)
@click.option("--workers", default=1, show_default=True)
@click.option("--self-test", is_flag=True,
              help="Evaluate canonical solutions instead of generated candidates.")
@click.option("--report-out", "report_path", type=click.Path(), default=None)
@_guarded
def eval_cmd(benchmark_path, candidates_path, backend, script_path, n_samples,
             temperatures, k_list, runner_name, timeout_secs, workers, self_test,
             report_path):
    """Execute candidates and emit the pass@k report (JSON + text table)."""
    problems = evalharness.load_problem_file(benchmark_path)
    runner = _make_runner(runner_name)

    if self_test:
        by_problem = {
            p.problem_id: [genclient.Candidate(p.problem_id, 0.0, 0, p.canonical_solution)]
            for p in problems
        }
    elif candidates_path:
        by_problem = _load_candidates(candidates_path)
    else:
        chosen_backend = _make_backend(backend, script_path)
        cfg = genclient.GenerationConfig(
            n_samples=n_samples, temperatures=tuple(sorted(temperatures))
        )
        by_problem = {}
        for problem in problems:
            built = promptkit.Prompt(
                text=problem.context,
                setting=promptkit.PromptSetting.no_api(),
                problem_id=problem.problem_id,
            )
            by_problem[problem.problem_id] = genclient.generate(built, cfg, chosen_backend)

    results = []
    for problem in problems:
        cands = by_problem.get(problem.problem_id, [])
        if not cands:
            raise ValueError(f"no candidates for problem {problem.problem_id!r}")
        results.extend(
            evalharness.run_problem(problem, cands, runner,
                                    timeout_secs=timeout_secs, workers=workers)
        )

    benchmark_name = problems[0].benchmark if problems else "benchmark"
    report = evalharness.build_report(benchmark_name, problems, results, tuple(k_list))
    rendered = evalharness.report_to_json(report)
    if report_path:
        Path(report_path).write_text(rendered, encoding="utf-8")
    click.echo(rendered, nl=False)
    click.echo(evalharness.report_to_text(report), err=True, nl=False)
    if self_test and any(r.c != r.n for r in results):
        bad = [r.problem_id for r in results if r.c != r.n]
        raise ValueError(f"canonical solutions failed their own tests: {bad}")


@main.command()
@click.option("--map", "map_name", required=True,
              help='"monkey", "beatnum", or a TSV path.')
@click.option("--libraries", "library_pair", default=None,
              help="public:private names when --map is a TSV path.")
@click.option("--text", "text", default=None, help="Convert a literal text argument.")
@click.option("--in", "in_path", type=click.Path(exists=True), default=None)
@click.option("--benchmark", "benchmark_path", type=click.Path(exists=True), default=None)
@click.option("--id-map", "id_map_path", type=click.Path(exists=True), default=None,
              help="JSON object translating golden api_ids public -> private.")
@click.option("--out", "out_path", type=click.Path(), default=None)
@click.option("--report", "report_path", type=click.Path(), default=None)
@_guarded
def convert(map_name, library_pair, text, in_path, benchmark_path, id_map_path,
            out_path, report_path):
    """Apply a keyword map to text, a file, or a whole benchmark."""
    if map_name in ("monkey", "beatnum"):
        keyword_map = benchforge.builtin_map(map_name)
    else:
        if not library_pair or ":" not in library_pair:
            raise ValueError("--libraries public:private is required with a TSV path")
        public, private = library_pair.split(":", 1)
        with open(map_name, encoding="utf-8") as fh:
            keyword_map = benchforge.load_keyword_map(fh, public, private)

    sources = [opt for opt in (text, in_path, benchmark_path) if opt is not None]
    if len(sources) != 1:
        raise ValueError("exactly one of --text, --in, --benchmark is required")

    if benchmark_path:
        problems = evalharness.load_problem_file(benchmark_path)
        id_map = None
        if id_map_path:
            with open(id_map_path, encoding="utf-8") as fh:
                id_map = json.load(fh)
        converted = benchforge.convert_benchmark(problems, keyword_map, id_map)
        if not out_path:
            raise ValueError("--out is required with --benchmark")
        with open(out_path, "w", encoding="utf-8") as fh:
            evalharness.dump_problems(converted, fh)
        click.echo(json.dumps({"problems": len(converted)}))
        return

    raw = text if text is not None else Path(in_path).read_text(encoding="utf-8")
    converted_text, report = benchforge.convert_text(raw, keyword_map)
    if out_path:
        Path(out_path).write_text(converted_text, encoding="utf-8")
    else:
        click.echo(converted_text, nl=False)
    if report_path:
        Path(report_path).write_text(benchforge.report_to_json(report), encoding="utf-8")


@main.command()
@click.option("--corpus", "corpus_dir", required=True, type=click.Path(exists=True))
@click.option("--doc-dump", "doc_dump", required=True, type=click.Path(exists=True))
@click.option("--signals", "signals_path", type=click.Path(exists=True), default=None,
              help="Sidecar JSON Lines of file-quality signals keyed by path.")
@click.option("--out-dir", "out_dir", required=True, type=click.Path())
@click.option("--neg-ratio", default=corpusforge.DEFAULT_NEGATIVE_RATIO, show_default=True)
@click.option("--noise-rate", default=corpusforge.DEFAULT_NOISE_RATE, show_default=True)
@click.option("--seed", default=0, show_default=True)
@_guarded
def forge(corpus_dir, doc_dump, signals_path, out_dir, neg_ratio, noise_rate, seed):
    """Build retrieval examples and pretraining documents from a corpus tree."""
    store = docstore.load_doc_dump(doc_dump)
    signals_by_file = {}
    if signals_path:
        with open(signals_path, encoding="utf-8") as fh:
            signals_by_file = corpusforge.load_quality_signals(fh)
    root = Path(corpus_dir)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    examples_out = []
    docs_out = []
    for path in sorted(root.rglob("*.py")):
        file_id = path.relative_to(root).as_posix()
        examples, doc = corpusforge.forge_file(
            file_id,
            path.read_text(encoding="utf-8"),
            store,
            neg_ratio=neg_ratio,
            noise_rate=noise_rate,
            rng_seed=seed,
            signals=signals_by_file.get(file_id),
        )
        examples_out.extend(corpusforge.example_to_dict(e) for e in examples)
        docs_out.append(corpusforge.document_to_dict(doc))
    with open(out / "retrieval_examples.jsonl", "w", encoding="utf-8") as fh:
        corpusforge.dump_jsonl(examples_out, fh)
    with open(out / "pretrain_docs.jsonl", "w", encoding="utf-8") as fh:
        corpusforge.dump_jsonl(docs_out, fh)
    click.echo(json.dumps({"files": len(docs_out), "examples": len(examples_out)}))


@main.command()
@click.option("--doc-dump", "doc_dump", required=True, type=click.Path(exists=True))
@click.option("--benchmark", "benchmark_path", required=True, type=click.Path(exists=True))
@click.option("--script", "script_path", type=click.Path(exists=True), default=None,
              help="Mock-backend script for the generate endpoint.")
@click.option("--ui-dir", "ui_dir", type=click.Path(exists=True), default=None,
              help="Serve a built frontend from this directory at /.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8321, show_default=True)
@_guarded
def serve(doc_dump, benchmark_path, script_path, ui_dir, host, port):
    """Run the HTTP service (problems, candidates, selections, vote, generate)."""
    import uvicorn

    from .service import create_app

    app = create_app(
        doc_dump_path=doc_dump,
        benchmark_path=benchmark_path,
        mock_script_path=script_path,
        ui_dir=ui_dir,
    )
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
