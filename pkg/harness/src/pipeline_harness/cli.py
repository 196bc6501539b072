"""Harness command line.

    pipeline-harness run SCRIPT --workdir DIR --timeout S [--report PATH]
    pipeline-harness smoke ARTIFACT_DIR [--timeout S]

`run` executes one generated pipeline script: the final stdout line
mirrors the child's RESULT:<float> line, the report JSON lands next to
the child logs, and the exit code is 0 only for a clean scored run
(1 crash, 2 timeout, 3 missing/invalid RESULT line). That makes the
harness directly usable as the synthesis engine's executor:

    --exec "pipeline-harness run {script} --workdir {workdir} --timeout 600"
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .runner import STATUS_CRASH, STATUS_OK, STATUS_TIMEOUT, run_script
from .smoke import smoke_suite

log = logging.getLogger(__name__)

_EXIT_BY_STATUS = {STATUS_OK: 0, STATUS_CRASH: 1, STATUS_TIMEOUT: 2}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pipeline-harness", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one pipeline script")
    p_run.add_argument("script")
    p_run.add_argument("--workdir", required=True)
    p_run.add_argument("--timeout", type=float, default=600.0)
    p_run.add_argument("--report", help="report JSON path (default: <workdir>/report.json)")

    p_smoke = sub.add_parser("smoke", help="run every candidate in an artifact directory")
    p_smoke.add_argument("artifact_dir")
    p_smoke.add_argument("--timeout", type=float, default=600.0)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    if args.command == "run":
        report = run_script(args.script, args.workdir, args.timeout, args.report)
        print(f"status: {report.status} duration: {report.duration:.2f}s", file=sys.stderr)
        if report.status == STATUS_OK:
            print(f"RESULT:{report.score!r}")
        return _EXIT_BY_STATUS.get(report.status, 3)

    report = smoke_suite(args.artifact_dir, args.timeout)
    print(json.dumps(report, indent=2))
    return 0 if report["status"] == "pass" else 1


if __name__ == "__main__":
    sys.exit(main())
