"""Protocol entry point: one RunRequest JSON object on stdin, one RunVerdict
JSON object on stdout. Exit code is 0 whenever a verdict was produced; only
a protocol failure (unreadable or invalid request) exits nonzero."""

import json
import sys

from . import RunRequest, run


def main() -> int:
    try:
        payload = json.load(sys.stdin)
        request = RunRequest(
            program_text=payload["program_text"],
            timeout_secs=float(payload.get("timeout_secs", 10.0)),
            memory_limit_mb=int(payload.get("memory_limit_mb", 512)),
        )
    except Exception as exc:
        sys.stderr.write(f"protocol error: {exc}\n")
        return 2
    verdict = run(request)
    json.dump(verdict.to_dict(), sys.stdout)
    sys.stdout.write("\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
