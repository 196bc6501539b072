"""Run one generated pipeline script with a timeout and produce a
structured report.

The report JSON is the executor contract shared with the synthesis
engine's result parser:

    {"script": ..., "script_id": ..., "status": "ok|crash|timeout|parse_failure",
     "score": float|null, "duration": seconds, "log_path": ..., "stderr_tail": ...}
"""

from __future__ import annotations

import json
import re
import subprocess
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

_RESULT_RE = re.compile(r"^RESULT:\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*$")

STATUS_OK = "ok"
STATUS_CRASH = "crash"
STATUS_TIMEOUT = "timeout"
STATUS_PARSE_FAILURE = "parse_failure"

STDERR_TAIL_LINES = 20


@dataclass
class HarnessReport:
    script: str
    script_id: str
    status: str
    score: Optional[float]
    duration: float
    log_path: str
    stderr_tail: str

    def to_json_obj(self) -> dict:
        return {
            "script": self.script,
            "script_id": self.script_id,
            "status": self.status,
            "score": self.score,
            "duration": self.duration,
            "log_path": self.log_path,
            "stderr_tail": self.stderr_tail,
        }

    @classmethod
    def from_json_obj(cls, raw: dict) -> "HarnessReport":
        return cls(
            script=raw["script"],
            script_id=raw["script_id"],
            status=raw["status"],
            score=raw.get("score"),
            duration=float(raw["duration"]),
            log_path=raw.get("log_path", ""),
            stderr_tail=raw.get("stderr_tail", ""),
        )


def parse_result_line(stdout: str) -> Optional[float]:
    """Final RESULT:<float> stdout line, or None."""
    score = None
    for line in stdout.splitlines():
        match = _RESULT_RE.match(line.strip())
        if match:
            score = float(match.group(1))
    return score


def script_identifier(script: Path) -> str:
    """Candidates are laid out as candidates/<script_id>/pipeline.py; fall
    back to the file stem for free-standing scripts."""
    if script.name == "pipeline.py":
        return script.parent.name
    return script.stem


def run_script(script: str, workdir: str, timeout: float,
               report_path: Optional[str] = None,
               python: Optional[str] = None) -> HarnessReport:
    """Execute one script with cwd=workdir, kill it at the timeout, parse
    the final RESULT line, and write the report JSON. Never raises for
    child failures; they become statuses."""
    script_p = Path(script).resolve()
    workdir_p = Path(workdir).resolve()
    workdir_p.mkdir(parents=True, exist_ok=True)
    stdout_log = workdir_p / "harness_stdout.txt"
    stderr_log = workdir_p / "harness_stderr.txt"

    start = time.monotonic()
    timed_out = False
    try:
        proc = subprocess.Popen(
            [python or sys.executable, str(script_p)],
            cwd=workdir_p, stdout=subprocess.PIPE, stderr=subprocess.PIPE, text=True,
        )
        try:
            stdout, stderr = proc.communicate(timeout=timeout)
            returncode = proc.returncode
        except subprocess.TimeoutExpired:
            proc.kill()
            stdout, stderr = proc.communicate()
            returncode, timed_out = -9, True
    except OSError as exc:
        stdout, stderr, returncode = "", f"failed to launch: {exc}", -1
    duration = time.monotonic() - start
    stdout_log.write_text(stdout, encoding="utf-8")
    stderr_log.write_text(stderr, encoding="utf-8")

    if timed_out:
        status, score = STATUS_TIMEOUT, None
    elif returncode != 0:
        status, score = STATUS_CRASH, None
    else:
        score = parse_result_line(stdout)
        status = STATUS_OK if score is not None else STATUS_PARSE_FAILURE

    report = HarnessReport(
        script=str(script_p),
        script_id=script_identifier(script_p),
        status=status,
        score=score,
        duration=duration,
        log_path=str(stderr_log),
        stderr_tail="\n".join(stderr.splitlines()[-STDERR_TAIL_LINES:]),
    )
    out_path = Path(report_path) if report_path else workdir_p / "report.json"
    out_path.write_text(json.dumps(report.to_json_obj(), indent=2) + "\n", encoding="utf-8")
    return report
