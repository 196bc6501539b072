"""Golden-file contract: harness report JSON parses into EvalResult.
The same fixture files live in the harness test suite; both sides must
keep accepting them byte for byte."""

import json
from pathlib import Path

import pytest

from pipesynth.validate import EvalResult

DATA = Path(__file__).parent / "data"


@pytest.mark.parametrize("name,status,score", [
    ("report_ok.json", "ok", 0.8234567),
    ("report_timeout.json", "timeout", None),
    ("report_crash.json", "crash", None),
    ("report_parse_failure.json", "parse_failure", None),
])
def test_golden_report_parses(name, status, score):
    raw = json.loads((DATA / name).read_text())
    result = EvalResult.from_json_obj(raw)
    assert result.status == status
    assert result.score == score
    assert result.script_id == raw["script_id"]


def test_status_round_trips():
    for name in ("report_ok.json", "report_timeout.json", "report_crash.json",
                 "report_parse_failure.json"):
        raw = json.loads((DATA / name).read_text())
        result = EvalResult.from_json_obj(raw)
        again = EvalResult.from_json_obj(result.to_json_obj())
        assert again == result


def test_score_status_consistency_enforced():
    raw = json.loads((DATA / "report_ok.json").read_text())
    raw["score"] = None
    with pytest.raises(ValueError):
        EvalResult.from_json_obj(raw)
    raw = json.loads((DATA / "report_crash.json").read_text())
    raw["score"] = 0.5
    with pytest.raises(ValueError):
        EvalResult.from_json_obj(raw)
