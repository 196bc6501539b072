import random
import sys

import pytest

from pipesynth.errors import AllCandidatesFailed, ConfigError, DegenerateSplit
from pipesynth.instantiate import CandidatePipeline, OrderedSkeleton
from pipesynth.tabular import ColumnKind, TaskKind
from pipesynth.validate import (
    EvalResult,
    ExecutorConfig,
    finalize,
    internal_split,
    parse_result_line,
    run_candidates,
    select_best,
)
from tests.conftest import make_column, make_dataset

PYTHON_EXEC = ExecutorConfig(
    command_template=f"{sys.executable} {{script}} --workdir {{workdir}}",
    timeout=20.0,
)


def candidate(source, script_id, model_rank=1, hp_index=0):
    skeleton = OrderedSkeleton(fe_ordered=(), model="CatBoost",
                               model_rank=model_rank, hyperparams={})
    return CandidatePipeline(source=source, skeleton=skeleton, model_rank=model_rank,
                             hyperparam_index=hp_index, script_id=script_id)


def toy_dataset(n=40, minority=0.5):
    labels = [1.0 if i < n * minority else 0.0 for i in range(n)]
    return make_dataset([
        make_column("a", ColumnKind.NUMERIC, [float(i) for i in range(n)]),
        make_column("y", ColumnKind.NUMBER_CATEGORY, labels),
    ])


class TestExecutorConfig:
    def test_requires_placeholders(self):
        with pytest.raises(ConfigError):
            ExecutorConfig(command_template="python pipeline.py")
        with pytest.raises(ConfigError):
            ExecutorConfig(command_template="python {script}")

    def test_requires_positive_timeout(self):
        with pytest.raises(ConfigError):
            ExecutorConfig(command_template="run {script} {workdir}", timeout=0)


class TestParseResultLine:
    @pytest.mark.parametrize("stdout,expected", [
        ("RESULT:0.5\n", 0.5),
        ("noise\nRESULT:0.25\nRESULT:0.75\n", 0.75),  # final line wins
        ("RESULT: 0.125\n", 0.125),
        ("RESULT:-1.5e-2\n", -0.015),
        ("no marker at all\n", None),
        ("RESULT:not_a_number\n", None),
    ])
    def test_cases(self, stdout, expected):
        assert parse_result_line(stdout) == expected


class TestInternalSplit:
    def test_sizes(self):
        inner_train, inner_valid = internal_split(toy_dataset(100), seed=0)
        assert (inner_train.n_rows, inner_valid.n_rows) == (75, 25)

    def test_stratified_minority_presence(self):
        ds = toy_dataset(100, minority=0.1)  # 10 positives
        inner_train, inner_valid = internal_split(ds, seed=0)
        minority_valid = sum(1 for v in inner_valid.target_columns[0].values if v == 1.0)
        assert minority_valid >= 2
        assert (inner_train.n_rows, inner_valid.n_rows) == (75, 25)

    def test_too_small(self):
        with pytest.raises(DegenerateSplit):
            internal_split(toy_dataset(4), seed=0)

    def test_deterministic(self):
        ds = toy_dataset(60, minority=0.3)
        a1, b1 = internal_split(ds, seed=5)
        a2, b2 = internal_split(ds, seed=5)
        assert a1.column("a").values == a2.column("a").values
        assert b1.column("a").values == b2.column("a").values

    def test_partition(self):
        ds = toy_dataset(80, minority=0.25)
        inner_train, inner_valid = internal_split(ds, seed=9)
        seen = sorted(list(inner_train.column("a").values) + list(inner_valid.column("a").values))
        assert seen == [float(i) for i in range(80)]

    def test_regression_uses_plain_split(self):
        ds = make_dataset([
            make_column("a", ColumnKind.NUMERIC, [float(i) for i in range(40)]),
            make_column("y", ColumnKind.NUMERIC, [float(i) * 2 for i in range(40)]),
        ], task=TaskKind.REGRESSION)
        inner_train, inner_valid = internal_split(ds, seed=1)
        assert (inner_train.n_rows, inner_valid.n_rows) == (30, 10)


class TestRunCandidates:
    def test_ok_crash_garbage_timeout(self, tmp_path):
        cands = [
            candidate("print('RESULT:0.5')", "ok_one", 1),
            candidate("raise SystemExit(3)", "crasher", 2),
            candidate("print('no marker here')", "garbled", 3),
            candidate("import time\ntime.sleep(30)", "sleeper", 4),
        ]
        exec_cfg = ExecutorConfig(
            command_template=f"{sys.executable} {{script}} --workdir {{workdir}}",
            timeout=2.0,
        )
        ds = toy_dataset(20)
        results = run_candidates(cands, ds, ds, tmp_path, exec_cfg)
        by_id = {r.script_id: r for r in results}
        assert by_id["ok_one"].status == "ok" and by_id["ok_one"].score == 0.5
        assert by_id["crasher"].status == "crash"
        assert by_id["garbled"].status == "parse_failure"
        assert by_id["sleeper"].status == "timeout"
        # failure artifacts persist for debugging
        assert (tmp_path / "candidates" / "crasher" / "stderr.txt").exists()

    def test_data_files_written_per_candidate(self, tmp_path):
        cands = [candidate("print('RESULT:1.0')", "only")]
        ds = toy_dataset(16)
        run_candidates(cands, ds, ds, tmp_path, PYTHON_EXEC)
        workdir = tmp_path / "candidates" / "only"
        assert (workdir / "training.csv").exists()
        assert (workdir / "test.csv").exists()
        assert (workdir / "pipeline.py").read_text() == "print('RESULT:1.0')"

    def test_overall_budget_skips_stragglers(self, tmp_path):
        body = "import time\ntime.sleep(0.4)\nprint('RESULT:0.5')"
        cands = [candidate(body + f"\n# {i}", f"c{i}", i + 1) for i in range(3)]
        exec_cfg = ExecutorConfig(
            command_template=f"{sys.executable} {{script}} --workdir {{workdir}}",
            timeout=10.0, overall_budget=0.2,
        )
        ds = toy_dataset(16)
        results = run_candidates(cands, ds, ds, tmp_path, exec_cfg)
        # the first candidate starts inside the budget; the ones after the
        # budget is spent are marked timeout without running
        assert results[0].status == "ok"
        assert results[1].status == "timeout" and results[1].duration == 0.0
        assert results[2].status == "timeout" and results[2].duration == 0.0

    def test_parallel_results_in_candidate_order(self, tmp_path):
        cands = [candidate(f"print('RESULT:0.{i}')", f"c{i}", i + 1) for i in range(4)]
        exec_cfg = ExecutorConfig(
            command_template=f"{sys.executable} {{script}} --workdir {{workdir}}",
            timeout=20.0, max_parallel=4,
        )
        ds = toy_dataset(16)
        results = run_candidates(cands, ds, ds, tmp_path, exec_cfg)
        assert [r.script_id for r in results] == ["c0", "c1", "c2", "c3"]


class TestSelectBest:
    def fabricate(self, scores):
        cands, results = [], []
        for i, score in enumerate(scores):
            c = candidate("", f"c{i}", model_rank=i + 1)
            cands.append(c)
            if score is None:
                results.append(EvalResult(c.script_id, "crash", None, 1.0))
            else:
                results.append(EvalResult(c.script_id, "ok", score, 1.0))
        return results, cands

    def test_max_score_wins(self):
        results, cands = self.fabricate([0.3, 0.9, 0.7])
        assert select_best(results, cands).best_script_id == "c1"

    def test_tie_goes_to_lower_rank(self):
        results, cands = self.fabricate([0.9, 0.9])
        assert select_best(results, cands).best_script_id == "c0"

    def test_failures_skipped(self):
        results, cands = self.fabricate([None, 0.1])
        outcome = select_best(results, cands)
        assert outcome.best_script_id == "c1"
        assert outcome.validation_score == 0.1

    def test_all_failed(self):
        results, cands = self.fabricate([None, None])
        with pytest.raises(AllCandidatesFailed, match="crash"):
            select_best(results, cands)

    def test_result_order_never_matters(self):
        results, cands = self.fabricate([0.5, 0.8, 0.8, 0.2])
        winner = select_best(results, cands).best_script_id
        rng = random.Random(0)
        for _ in range(10):
            shuffled = results[:]
            rng.shuffle(shuffled)
            assert select_best(shuffled, cands).best_script_id == winner

    def test_winner_score_is_max(self):
        results, cands = self.fabricate([0.5, None, 0.8, 0.2])
        outcome = select_best(results, cands)
        ok_scores = [r.score for r in results if r.status == "ok"]
        assert outcome.validation_score >= max(ok_scores)


class TestFinalize:
    def test_final_score_from_stub(self, tmp_path):
        best = candidate("print('RESULT:0.7')", "win")
        ds = toy_dataset(24)
        result = finalize(best, ds, ds, tmp_path, PYTHON_EXEC)
        assert result.status == "ok" and result.score == 0.7
        assert (tmp_path / "best_pipeline.py").exists()
        assert (tmp_path / "final" / "training.csv").exists()

    def test_no_test_set(self, tmp_path):
        best = candidate("print('RESULT:0.7')", "win")
        assert finalize(best, toy_dataset(24), None, tmp_path, PYTHON_EXEC) is None
        assert (tmp_path / "best_pipeline.py").exists()

    def test_crash_reported(self, tmp_path):
        best = candidate("raise SystemExit(1)", "win")
        result = finalize(best, toy_dataset(24), toy_dataset(24), tmp_path, PYTHON_EXEC)
        assert result.status == "crash"
        assert result.log_path is not None
