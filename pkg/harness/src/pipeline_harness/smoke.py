"""Smoke suite over a synthesis artifact directory: re-run every
candidate, require at least one success, and require the final pipeline
to beat the Default baseline on the held-out data."""

from __future__ import annotations

import json
import logging
from pathlib import Path

from .baseline import default_baseline_score
from .runner import STATUS_OK, run_script

log = logging.getLogger(__name__)


def smoke_suite(artifact_dir: str, timeout: float = 600.0) -> dict:
    """Returns a report dict with status "pass" or "fail" and the evidence;
    never raises for candidate failures."""
    root = Path(artifact_dir)
    failures: list[str] = []
    candidates_manifest = root / "candidates.json"
    if not candidates_manifest.exists():
        return {"status": "fail", "failures": [f"no candidates manifest in {root}"],
                "candidates": []}
    manifest = json.loads(candidates_manifest.read_text(encoding="utf-8"))
    if not manifest:
        return {"status": "fail", "failures": ["zero candidates in the artifact directory"],
                "candidates": []}

    summary = {}
    summary_path = root / "summary.json"
    if summary_path.exists():
        summary = json.loads(summary_path.read_text(encoding="utf-8"))
    task = summary.get("task", "classification")
    target = summary.get("target")

    reports = []
    for entry in manifest:
        script = root / entry["path"]
        workdir = script.parent
        report = run_script(str(script), str(workdir), timeout)
        reports.append(report)
        log.info("candidate %s: %s (score=%s)", report.script_id, report.status, report.score)
        if report.status != STATUS_OK:
            failures.append(f"{report.script_id}: {report.status} (see {report.log_path})")

    ok = [r for r in reports if r.status == STATUS_OK]
    if not ok:
        failures.insert(0, "no candidate executed successfully")
        return {"status": "fail", "failures": failures,
                "candidates": [r.to_json_obj() for r in reports]}
    winner = max(ok, key=lambda r: r.score)

    baseline = None
    final_score = None
    final_dir = root / "final"
    if target and (final_dir / "test.csv").exists():
        final_report = run_script(str(final_dir / "pipeline.py"), str(final_dir), timeout)
        if final_report.status == STATUS_OK:
            final_score = final_report.score
            baseline = default_baseline_score(
                str(final_dir / "training.csv"), str(final_dir / "test.csv"), target, task)
            if final_score < baseline:
                failures.append(
                    f"final pipeline score {final_score:.4f} below the Default "
                    f"baseline {baseline:.4f}")
        else:
            failures.append(f"final pipeline failed: {final_report.status}")
    elif target:
        # no held-out set in the artifact; compare on the winner's inner split
        workdir = root / "candidates" / winner.script_id
        baseline = default_baseline_score(
            str(workdir / "training.csv"), str(workdir / "test.csv"), target, task)
        if winner.score < baseline:
            failures.append(
                f"winner score {winner.score:.4f} below the Default baseline {baseline:.4f}")

    status = "fail" if any("baseline" in f or "no candidate" in f or "final pipeline failed" in f
                           for f in failures) else "pass"
    return {
        "status": status,
        "n_candidates": len(reports),
        "n_ok": len(ok),
        "winner": winner.script_id,
        "winner_score": winner.score,
        "final_score": final_score,
        "baseline_score": baseline,
        "failures": failures,
        "candidates": [r.to_json_obj() for r in reports],
    }
