"""Execute one program in a fresh interpreter process and classify the outcome.

Protocol (see __main__): one JSON request on stdin, one JSON verdict on
stdout, exit code 0 unless the protocol itself fails. Candidate misbehavior
of any kind maps to a verdict, never to a runner failure:

* clean exit                -> pass
* assertion failure         -> fail
* wall-clock / CPU / memory -> timeout
* anything else             -> crash

The program runs in a child interpreter (not in the runner process), so a
candidate that floods stdout, exhausts memory, or calls os._exit cannot
corrupt the verdict channel. One process per run, no pooling: verdicts are
fully independent.
"""

from __future__ import annotations

import json
import os
import signal
import subprocess
import sys
import tempfile
import time
from dataclasses import dataclass

MESSAGE_LIMIT = 2000

# Exit codes of the child bootstrap, chosen to avoid common program codes.
_EXIT_FAIL = 3
_EXIT_CRASH = 4
_EXIT_LIMIT = 5

# The child applies its own resource limits, then executes the program text
# from argv[1] under a __main__-like namespace.
_BOOTSTRAP = r"""
import sys, traceback

def _apply_limits(timeout_secs, memory_mb):
    try:
        import resource
        cpu = max(1, int(timeout_secs) + 1)
        resource.setrlimit(resource.RLIMIT_CPU, (cpu, cpu + 1))
        if memory_mb > 0:
            limit = memory_mb * 1024 * 1024
            resource.setrlimit(resource.RLIMIT_AS, (limit, limit))
    except (ImportError, ValueError, OSError):
        pass  # limits are best effort; the parent still enforces wall clock

path, timeout_secs, memory_mb = sys.argv[1], float(sys.argv[2]), int(sys.argv[3])
_apply_limits(timeout_secs, memory_mb)
with open(path, encoding="utf-8") as fh:
    source = fh.read()
try:
    exec(compile(source, "<candidate>", "exec"), {"__name__": "__main__"})
except AssertionError:
    traceback.print_exc()
    sys.exit(3)
except MemoryError:
    sys.stderr.write("memory limit exceeded\n")
    sys.exit(5)
except SystemExit:
    raise
except BaseException:
    traceback.print_exc()
    sys.exit(4)
"""


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
    duration_secs: float
    message: str = ""

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "duration_secs": round(self.duration_secs, 6),
            "message": self.message[:MESSAGE_LIMIT],
        }


def _classify(returncode: int) -> str:
    if returncode == 0:
        return "pass"
    if returncode == _EXIT_FAIL:
        return "fail"
    if returncode == _EXIT_LIMIT:
        return "timeout"
    if returncode < 0:
        sig = -returncode
        if sig in (signal.SIGXCPU, signal.SIGKILL):
            return "timeout"
        return "crash"
    return "crash"


def run(request: RunRequest) -> RunVerdict:
    """Execute the program and return its verdict; never raises on program
    misbehavior."""
    start = time.perf_counter()
    fd, path = tempfile.mkstemp(suffix=".py", prefix="candidate_")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(request.program_text)
        cmd = [
            sys.executable,
            "-c",
            _BOOTSTRAP,
            path,
            str(request.timeout_secs),
            str(request.memory_limit_mb),
        ]
        try:
            proc = subprocess.run(
                cmd,
                capture_output=True,
                text=True,
                errors="replace",
                timeout=request.timeout_secs,
            )
        except subprocess.TimeoutExpired:
            duration = time.perf_counter() - start
            return RunVerdict("timeout", duration, "wall-clock limit exceeded")
        duration = time.perf_counter() - start
        status = _classify(proc.returncode)
        message = "" if status == "pass" else (proc.stderr or "").strip()[-MESSAGE_LIMIT:]
        return RunVerdict(status, duration, message)
    finally:
        try:
            os.unlink(path)
        except OSError:
            pass
