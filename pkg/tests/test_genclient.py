import httpx
import pytest
from hypothesis import given, settings, strategies as st

from privapi.genclient import (
    BackendMalformedResponse,
    BackendUnavailable,
    Candidate,
    GenerationConfig,
    HttpBackend,
    UnknownProblem,
    generate,
    mock_backend,
)
from privapi.promptkit import Prompt, PromptSetting

PROMPT = Prompt(text="def f():\n", setting=PromptSetting.no_api(), problem_id="p1")


def cfg(n=3, temps=(0.2,), **kw):
    return GenerationConfig(n_samples=n, temperatures=temps, **kw)


class TestMockBackend:
    def test_scripted_echo(self):
        backend = mock_backend({"p1": ["return 1"]})
        out = generate(PROMPT, cfg(n=3), backend, _sleep=lambda s: None)
        assert [c.code for c in out] == ["return 1"] * 3

    def test_cycling(self):
        backend = mock_backend({"p1": ["a", "b"]})
        out = generate(PROMPT, cfg(n=3), backend, _sleep=lambda s: None)
        assert [c.code for c in out] == ["a", "b", "a"]

    def test_unknown_problem(self):
        backend = mock_backend({"other": ["a"]})
        with pytest.raises(UnknownProblem):
            generate(PROMPT, cfg(), backend, _sleep=lambda s: None)

    def test_empty_script_list(self):
        backend = mock_backend({"p1": []})
        with pytest.raises(UnknownProblem):
            generate(PROMPT, cfg(), backend, _sleep=lambda s: None)

    def test_determinism(self):
        backend = mock_backend({"p1": ["a", "b", "c"]})
        one = generate(PROMPT, cfg(n=5, temps=(0.1, 0.5)), backend, _sleep=lambda s: None)
        two = generate(PROMPT, cfg(n=5, temps=(0.1, 0.5)), backend, _sleep=lambda s: None)
        assert one == two


class TestOrdering:
    def test_temperature_major_index_minor(self):
        backend = mock_backend({"p1": ["x"]})
        out = generate(PROMPT, cfg(n=2, temps=(0.1, 0.2)), backend, _sleep=lambda s: None)
        assert [(c.temperature, c.sample_index) for c in out] == [
            (0.1, 0),
            (0.1, 1),
            (0.2, 0),
            (0.2, 1),
        ]

    @given(
        n=st.integers(1, 6),
        n_temps=st.integers(1, 10),
    )
    @settings(max_examples=50)
    def test_count_identity(self, n, n_temps):
        temps = tuple(round(0.1 * i, 1) for i in range(1, n_temps + 1))
        backend = mock_backend({"p1": ["x", "y"]})
        out = generate(PROMPT, cfg(n=n, temps=temps), backend, _sleep=lambda s: None)
        assert len(out) == n * n_temps


class TestRetries:
    def test_unreachable_backend_five_attempts(self):
        attempts = []

        class Down:
            def complete(self, prompt, n, temperature, cfg):
                attempts.append(1)
                raise ConnectionError("nope")

        with pytest.raises(BackendUnavailable):
            generate(PROMPT, cfg(), Down(), _sleep=lambda s: None)
        assert len(attempts) == 5

    def test_recovers_after_transient_failure(self):
        calls = {"n": 0}

        class Flaky:
            def complete(self, prompt, n, temperature, cfg):
                calls["n"] += 1
                if calls["n"] < 3:
                    raise ConnectionError("blip")
                return ["ok"] * n

        out = generate(PROMPT, cfg(n=2), Flaky(), _sleep=lambda s: None)
        assert [c.code for c in out] == ["ok", "ok"]

    def test_malformed_not_retried(self):
        calls = {"n": 0}

        class Malformed:
            def complete(self, prompt, n, temperature, cfg):
                calls["n"] += 1
                raise BackendMalformedResponse("bad")

        with pytest.raises(BackendMalformedResponse):
            generate(PROMPT, cfg(), Malformed(), _sleep=lambda s: None)
        assert calls["n"] == 1

    def test_backoff_is_exponential(self):
        delays = []

        class Down:
            def complete(self, prompt, n, temperature, cfg):
                raise ConnectionError("nope")

        with pytest.raises(BackendUnavailable):
            generate(PROMPT, cfg(), Down(), backoff_base_secs=0.5, _sleep=delays.append)
        assert delays == [0.5, 1.0, 2.0, 4.0]


class TestHttpBackend:
    def make(self, handler):
        return HttpBackend(
            endpoint="http://gen.test",
            timeout_secs=5,
            transport=httpx.MockTransport(handler),
        )

    def test_happy_path(self):
        import json

        def handler(request):
            body = json.loads(request.content)
            assert body["prompt"] == PROMPT.text
            assert body["temperature"] == 0.2
            return httpx.Response(200, json={"completions": ["ok"] * body["n"]})

        out = generate(PROMPT, cfg(n=4), self.make(handler), _sleep=lambda s: None)
        assert len(out) == 4

    def test_malformed_payload(self):
        def handler(request):
            return httpx.Response(200, json={"something": []})

        with pytest.raises(BackendMalformedResponse):
            generate(PROMPT, cfg(), self.make(handler), _sleep=lambda s: None)

    def test_wrong_count_is_malformed(self):
        def handler(request):
            return httpx.Response(200, json={"completions": ["only one"]})

        with pytest.raises(BackendMalformedResponse):
            generate(PROMPT, cfg(n=3), self.make(handler), _sleep=lambda s: None)

    def test_http_error_retried_then_unavailable(self):
        def handler(request):
            return httpx.Response(503)

        with pytest.raises(BackendUnavailable):
            generate(PROMPT, cfg(), self.make(handler), _sleep=lambda s: None)


class TestConfig:
    def test_defaults_match_protocol(self):
        c = GenerationConfig()
        assert c.n_samples == 200
        assert c.temperatures == (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)

    def test_validation(self):
        with pytest.raises(ValueError):
            GenerationConfig(n_samples=0)
        with pytest.raises(ValueError):
            GenerationConfig(temperatures=(0.5, 0.3))
        with pytest.raises(ValueError):
            GenerationConfig(temperatures=(0.0,))
        with pytest.raises(ValueError):
            GenerationConfig(temperatures=(2.5,))

    def test_candidate_fields(self):
        c = Candidate("p", 0.3, 2, "code")
        assert (c.problem_id, c.temperature, c.sample_index) == ("p", 0.3, 2)
