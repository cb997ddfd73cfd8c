"""Sandbox runner clients for candidate execution.

The execution boundary is a JSON protocol: a runner process reads one
request object (``program_text``, ``timeout_secs``, ``memory_limit_mb``) on
stdin and writes one verdict object (``status``, ``duration_secs``,
``message``) on stdout, exiting 0 unless the protocol itself fails.

Two client-side runners are provided:

* :class:`SubprocessRunner` speaks that protocol to an external runner
  command (one fresh process per candidate, verdicts fully isolated);
* :class:`InProcessRunner` is a stub for scripted desk-scale fixtures: it
  ``exec``s the program in this interpreter, so it enforces no timeout, no
  memory limit, and no isolation.
"""

from __future__ import annotations

import io
import json
import os
import subprocess
import sys
import time
import traceback
from contextlib import redirect_stderr, redirect_stdout
from dataclasses import dataclass
from typing import Protocol

from .errors import PrivApiError

VERDICT_STATUSES = ("pass", "fail", "timeout", "crash")

# Extra wall-clock grace on top of the candidate budget: covers interpreter
# startup of the runner process itself.
_PROTOCOL_GRACE_SECS = 10.0

_MESSAGE_LIMIT = 2000


class RunnerUnavailable(PrivApiError):
    """The runner command could not be started."""


@dataclass(frozen=True)
class RunRequest:
    program_text: str
    timeout_secs: float = 10.0
    memory_limit_mb: int = 512

    def __post_init__(self):
        if self.timeout_secs <= 0:
            raise ValueError("timeout_secs must be positive")


@dataclass(frozen=True)
class RunVerdict:
    status: str
    duration_secs: float = 0.0
    message: str = ""

    def __post_init__(self):
        if self.status not in VERDICT_STATUSES:
            raise ValueError(f"unknown verdict status {self.status!r}")
        if len(self.message) > _MESSAGE_LIMIT:
            object.__setattr__(self, "message", self.message[:_MESSAGE_LIMIT])


class SandboxRunner(Protocol):
    def run(self, request: RunRequest) -> RunVerdict: ...


class InProcessRunner:
    """Evaluate a program with ``exec`` in this interpreter.

    Misbehaving programs still map to verdicts (assertion -> fail, other
    exception -> crash), but an infinite loop will hang the caller: use the
    subprocess runner for untrusted or unbounded candidates.
    """

    def run(self, request: RunRequest) -> RunVerdict:
        start = time.perf_counter()
        sink = io.StringIO()
        namespace = {"__name__": "__main__"}
        try:
            with redirect_stdout(sink), redirect_stderr(sink):
                exec(compile(request.program_text, "<candidate>", "exec"), namespace)
            status, message = "pass", ""
        except AssertionError:
            status, message = "fail", traceback.format_exc(limit=2)
        except SystemExit as exc:
            ok = exc.code in (None, 0)
            status, message = ("pass", "") if ok else ("crash", f"exit code {exc.code}")
        except KeyboardInterrupt:
            raise
        except BaseException:
            status, message = "crash", traceback.format_exc(limit=2)
        duration = time.perf_counter() - start
        return RunVerdict(status=status, duration_secs=duration, message=message)


def default_runner_command() -> list[str]:
    """Command for the external runner; override with PRIVAPI_RUNNER_CMD."""
    env_cmd = os.environ.get("PRIVAPI_RUNNER_CMD")
    if env_cmd:
        return env_cmd.split()
    return [sys.executable, "-m", "sandbox_runner"]


class SubprocessRunner:
    """Client for the stdin/stdout JSON runner protocol."""

    def __init__(self, command: list[str] | None = None):
        self.command = list(command) if command else default_runner_command()

    def run(self, request: RunRequest) -> RunVerdict:
        payload = json.dumps(
            {
                "program_text": request.program_text,
                "timeout_secs": request.timeout_secs,
                "memory_limit_mb": request.memory_limit_mb,
            }
        )
        start = time.perf_counter()
        try:
            proc = subprocess.run(
                self.command,
                input=payload,
                capture_output=True,
                text=True,
                timeout=request.timeout_secs + _PROTOCOL_GRACE_SECS,
            )
        except FileNotFoundError as exc:
            raise RunnerUnavailable(f"runner command not found: {self.command}") from exc
        except subprocess.TimeoutExpired:
            duration = time.perf_counter() - start
            return RunVerdict("crash", duration, "runner protocol timeout")
        duration = time.perf_counter() - start
        try:
            obj = json.loads(proc.stdout)
            return RunVerdict(
                status=obj["status"],
                duration_secs=float(obj.get("duration_secs", duration)),
                message=str(obj.get("message", "")),
            )
        except (json.JSONDecodeError, KeyError, TypeError, ValueError):
            detail = (proc.stderr or proc.stdout or "")[:200]
            return RunVerdict("crash", duration, f"malformed runner output: {detail}")
