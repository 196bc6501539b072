"""Candidate validation: run emitted scripts through an external executor
on an internal train/validation split, pick the best, and produce the
final artifact bound to the full training data and held-out test set.

The executor contract: the command line is built from a template with
{script} and {workdir} placeholders; the child process must print
`RESULT:<float>` as its final stdout line and exit 0 on success.
"""

from __future__ import annotations

import json
import logging
import random
import re
import shlex
import subprocess
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from .errors import AllCandidatesFailed, ConfigError, DegenerateSplit
from .instantiate import CandidatePipeline
from .tabular import Dataset, TaskKind, split_rows, take_rows, write_csv

log = logging.getLogger(__name__)

_RESULT_RE = re.compile(r"^RESULT:\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*$")

STATUS_OK = "ok"
STATUS_CRASH = "crash"
STATUS_TIMEOUT = "timeout"
STATUS_PARSE_FAILURE = "parse_failure"


@dataclass(frozen=True)
class ExecutorConfig:
    command_template: str
    timeout: float = 600.0          # per candidate
    max_parallel: int = 1
    overall_budget: float = 3600.0  # whole batch; stragglers become timeouts

    def __post_init__(self):
        for placeholder in ("{script}", "{workdir}"):
            if placeholder not in self.command_template:
                raise ConfigError(f"executor command template must contain {placeholder}")
        if self.timeout <= 0 or self.overall_budget <= 0:
            raise ConfigError("executor timeouts must be positive")

    def command(self, script: str, workdir: str) -> list[str]:
        line = self.command_template.format(script=script, workdir=workdir)
        return shlex.split(line)


@dataclass
class EvalResult:
    script_id: str
    status: str
    score: Optional[float]
    duration: float
    log_path: Optional[str] = None

    def to_json_obj(self) -> dict:
        return {
            "script_id": self.script_id,
            "status": self.status,
            "score": self.score,
            "duration": self.duration,
            "log_path": self.log_path,
        }

    @classmethod
    def from_json_obj(cls, raw: dict) -> "EvalResult":
        status = raw["status"]
        if status not in (STATUS_OK, STATUS_CRASH, STATUS_TIMEOUT, STATUS_PARSE_FAILURE):
            raise ValueError(f"unknown status {status!r}")
        score = raw.get("score")
        if (score is None) == (status == STATUS_OK):
            raise ValueError("score must be present exactly when status is ok")
        return cls(
            script_id=raw["script_id"],
            status=status,
            score=float(score) if score is not None else None,
            duration=float(raw.get("duration", 0.0)),
            log_path=raw.get("log_path"),
        )


@dataclass
class SelectionOutcome:
    best_script_id: str
    validation_score: float
    all_results: list[EvalResult]
    final_test_score: Optional[float] = None

    def to_json_obj(self) -> dict:
        return {
            "best_script_id": self.best_script_id,
            "validation_score": self.validation_score,
            "final_test_score": self.final_test_score,
            "all_results": [r.to_json_obj() for r in self.all_results],
        }


def parse_result_line(stdout: str) -> Optional[float]:
    """The last line matching RESULT:<float>, or None."""
    score = None
    for line in stdout.splitlines():
        m = _RESULT_RE.match(line.strip())
        if m:
            score = float(m.group(1))
    return score


def internal_split(train: Dataset, seed: int, ratio: float = 0.75) -> tuple[Dataset, Dataset]:
    """75:25 deterministic split of the user-provided training data.
    Classification splits are label-stratified (largest-remainder
    allocation, so the overall sizes still match round(ratio * n)) when
    every class has at least 4 rows."""
    n = train.n_rows
    if n < 8:
        raise DegenerateSplit(f"internal split needs >= 8 rows, got {n}")
    if train.task == TaskKind.CLASSIFICATION:
        labels = train.target_columns[0].values
        by_class: dict[str, list[int]] = {}
        for i, v in enumerate(labels):
            by_class.setdefault(repr(v), []).append(i)
        if len(by_class) >= 2 and all(len(ix) >= 4 for ix in by_class.values()):
            return _stratified_split(train, by_class, ratio, seed)
    return split_rows(train, ratio, seed)


def _stratified_split(train: Dataset, by_class: dict[str, list[int]],
                      ratio: float, seed: int) -> tuple[Dataset, Dataset]:
    rng = random.Random(seed)
    total_first = int(round(ratio * train.n_rows))
    classes = sorted(by_class)
    quotas = {c: ratio * len(by_class[c]) for c in classes}
    floors = {c: int(quotas[c]) for c in classes}
    leftover = total_first - sum(floors.values())
    # distribute remaining slots by largest fractional remainder
    by_remainder = sorted(classes, key=lambda c: (-(quotas[c] - floors[c]), c))
    for c in by_remainder[:leftover]:
        floors[c] += 1
    first_idx, second_idx = [], []
    for c in classes:
        indices = list(by_class[c])
        rng.shuffle(indices)
        first_idx.extend(indices[:floors[c]])
        second_idx.extend(indices[floors[c]:])
    if not first_idx or not second_idx:
        raise DegenerateSplit("stratified split left one side empty")
    return take_rows(train, sorted(first_idx)), take_rows(train, sorted(second_idx))


def _run_one(candidate: CandidatePipeline, workdir: Path, exec_cfg: ExecutorConfig) -> EvalResult:
    workdir = Path(workdir).resolve()
    script = workdir / "pipeline.py"
    stdout_path = workdir / "stdout.txt"
    stderr_path = workdir / "stderr.txt"
    args = exec_cfg.command(str(script), str(workdir))
    start = time.monotonic()
    try:
        proc = subprocess.run(
            args, cwd=workdir, capture_output=True, text=True, timeout=exec_cfg.timeout
        )
        stdout, stderr, returncode = proc.stdout, proc.stderr, proc.returncode
        timed_out = False
    except subprocess.TimeoutExpired as exc:
        stdout = exc.stdout.decode() if isinstance(exc.stdout, bytes) else (exc.stdout or "")
        stderr = exc.stderr.decode() if isinstance(exc.stderr, bytes) else (exc.stderr or "")
        returncode, timed_out = -1, True
    except OSError as exc:
        stdout, stderr, returncode, timed_out = "", f"failed to launch executor: {exc}", -1, False
    duration = time.monotonic() - start
    stdout_path.write_text(stdout, encoding="utf-8")
    stderr_path.write_text(stderr, encoding="utf-8")

    if timed_out:
        status, score = STATUS_TIMEOUT, None
    elif returncode != 0:
        status, score = STATUS_CRASH, None
    else:
        score = parse_result_line(stdout)
        status = STATUS_OK if score is not None else STATUS_PARSE_FAILURE
    if status != STATUS_OK:
        log.warning("candidate %s: %s (see %s)", candidate.script_id, status, stderr_path)
    return EvalResult(
        script_id=candidate.script_id,
        status=status,
        score=score,
        duration=duration,
        log_path=str(stderr_path),
    )


def run_candidates(candidates: Sequence[CandidatePipeline], inner_train: Dataset,
                   inner_valid: Dataset, out_dir: Path, exec_cfg: ExecutorConfig,
                   delimiter: str = ",") -> list[EvalResult]:
    """Execute every candidate in its own workdir (scripts read
    training.csv / test.csv from the cwd). Failures never abort the batch;
    results come back in candidate order."""
    out_dir = Path(out_dir)
    workdirs = []
    for c in candidates:
        workdir = out_dir / "candidates" / c.script_id
        workdir.mkdir(parents=True, exist_ok=True)
        (workdir / "pipeline.py").write_text(c.source, encoding="utf-8")
        write_csv(inner_train, str(workdir / "training.csv"), delimiter)
        write_csv(inner_valid, str(workdir / "test.csv"), delimiter)
        workdirs.append(workdir)

    batch_start = time.monotonic()

    def guarded(candidate: CandidatePipeline, workdir: Path) -> EvalResult:
        if time.monotonic() - batch_start > exec_cfg.overall_budget:
            log.warning("candidate %s skipped: overall budget of %.0fs exhausted",
                        candidate.script_id, exec_cfg.overall_budget)
            return EvalResult(candidate.script_id, STATUS_TIMEOUT, None, 0.0)
        return _run_one(candidate, workdir, exec_cfg)

    if exec_cfg.max_parallel > 1:
        with ThreadPoolExecutor(max_workers=exec_cfg.max_parallel) as pool:
            futures = [pool.submit(guarded, c, w)
                       for c, w in zip(candidates, workdirs)]
            return [f.result() for f in futures]
    return [guarded(c, w) for c, w in zip(candidates, workdirs)]


def select_best(results: Sequence[EvalResult],
                candidates: Sequence[CandidatePipeline]) -> SelectionOutcome:
    """Maximum score among ok results; ties break to the lower model rank,
    then the lower hyperparameter index, then the script id."""
    if not results:
        raise AllCandidatesFailed("no results to select from", [])
    by_id = {c.script_id: c for c in candidates}
    ok = [r for r in results if r.status == STATUS_OK]
    if not ok:
        diagnostics = "; ".join(f"{r.script_id}: {r.status}" for r in results)
        raise AllCandidatesFailed(f"every candidate failed ({diagnostics})", list(results))
    best = min(ok, key=lambda r: (
        -r.score, by_id[r.script_id].model_rank, by_id[r.script_id].hyperparam_index, r.script_id
    ))
    return SelectionOutcome(
        best_script_id=best.script_id,
        validation_score=best.score,
        all_results=list(results),
    )


def finalize(best: CandidatePipeline, full_train: Dataset, test: Optional[Dataset],
             out_dir: Path, exec_cfg: ExecutorConfig,
             delimiter: str = ",") -> Optional[EvalResult]:
    """Re-run the winning source on the full training data against the
    held-out test set. Returns None when no test set was provided."""
    out_dir = Path(out_dir)
    final_dir = out_dir / "final"
    final_dir.mkdir(parents=True, exist_ok=True)
    (final_dir / "pipeline.py").write_text(best.source, encoding="utf-8")
    (out_dir / "best_pipeline.py").write_text(best.source, encoding="utf-8")
    if test is None:
        return None
    write_csv(full_train, str(final_dir / "training.csv"), delimiter)
    write_csv(test, str(final_dir / "test.csv"), delimiter)
    return _run_one(best, final_dir, exec_cfg)


def write_results(results: Sequence[EvalResult], path: Path) -> None:
    payload = [r.to_json_obj() for r in results]
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def read_results(path: Path) -> list[EvalResult]:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    return [EvalResult.from_json_obj(r) for r in payload]
