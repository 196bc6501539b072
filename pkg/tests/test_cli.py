import csv
import hashlib
import json
import random
import sys

import pytest

from pipesynth.cli import SynthesisConfig, cmd_synthesize, cmd_train, main
from pipesynth.corpus import MetaCorpus, generate_synthetic_corpus, load_taxonomy, serialize_corpus
from pipesynth.errors import ConfigError
from pipesynth.predictor import SkeletonPredictorBundle
from tests.test_corpus import make_pipeline

STUB_EXEC = f"{sys.executable} -m pipesynth.stub_executor {{script}} --workdir {{workdir}}"


@pytest.fixture(scope="module")
def corpus_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("corpus") / "corpus.jsonl"
    serialize_corpus(generate_synthetic_corpus(seed=42, n=500), str(path))
    return str(path)


@pytest.fixture(scope="module")
def bundle_file(tmp_path_factory, corpus_file):
    path = tmp_path_factory.mktemp("bundle") / "bundle.json"
    cmd_train(corpus_file, str(path), seed=0)
    return str(path)


def write_dataset_csv(path, n=120, seed=3, with_missing=True, with_strcat=True):
    rng = random.Random(seed)
    with open(path, "w", newline="") as fh:
        names = ["amount", "age", "card_type", "label"]
        writer = csv.DictWriter(fh, fieldnames=names)
        writer.writeheader()
        for i in range(n):
            y = 1 if rng.random() < 0.3 else 0
            writer.writerow({
                "amount": "" if (with_missing and rng.random() < 0.2) else f"{rng.gauss(y, 1):.4f}",
                "age": f"{rng.uniform(18, 90):.2f}",
                "card_type": (rng.choice(["visa", "amex", "mc"]) if with_strcat
                              else f"{rng.random():.5f}"),
                "label": str(y),
            })
    return str(path)


class TestTrain:
    def test_bundle_written_with_report_and_dag(self, tmp_path, corpus_file):
        out = tmp_path / "b.json"
        cmd_train(corpus_file, str(out), seed=0)
        assert out.exists()
        report = json.loads((tmp_path / "b.json.report.json").read_text())
        assert "Imputer" in report["fe"]
        assert (tmp_path / "b.json.dag.json").exists()

    def test_imputer_tree_splits_on_missingness(self, bundle_file):
        bundle = SkeletonPredictorBundle.load(bundle_file)
        tree = bundle.fe_trees["Imputer"]
        assert not tree.is_constant
        assert tree.root.feature == "has_missing"

    def test_same_seed_identical_bundle(self, tmp_path, corpus_file):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        cmd_train(corpus_file, str(a), seed=0)
        cmd_train(corpus_file, str(b), seed=0)
        digest = lambda p: hashlib.sha256(p.read_bytes()).hexdigest()
        assert digest(a) == digest(b)

    def test_single_record_corpus_trains_constants(self, tmp_path, caplog):
        corpus = MetaCorpus(records=(make_pipeline(("Imputer",), "CatBoost"),),
                            taxonomy=load_taxonomy())
        path = tmp_path / "one.jsonl"
        serialize_corpus(corpus, str(path))
        with caplog.at_level("WARNING"):
            bundle = cmd_train(str(path), str(tmp_path / "one_bundle.json"), seed=0)
        assert bundle.fe_trees["Imputer"].is_constant
        assert bundle.fe_trees["Imputer"].predict_prob({}) == 1.0
        assert caplog.records  # warned about the degenerate corpus


class TestSynthesize:
    def test_artifact_directory_contents(self, tmp_path, bundle_file):
        train_csv = write_dataset_csv(tmp_path / "train.csv")
        out = tmp_path / "artifacts"
        summary = cmd_synthesize(SynthesisConfig(
            target="label", train_path=train_csv, bundle_path=bundle_file,
            seed=0, exec_command=STUB_EXEC, out_dir=str(out),
        ))
        for name in ("meta_features.json", "skeletons.json", "candidates.json",
                     "results.json", "best_pipeline.py", "summary.json"):
            assert (out / name).exists(), name
        skeletons = json.loads((out / "skeletons.json").read_text())
        labels = {c["label"] for s in skeletons for c in s["fe"]}
        assert "Imputer" in labels
        assert {"OrdinalEncoder", "OneHotEncoder"} & labels
        assert summary["best_script_id"]

    def test_clean_numeric_dataset_may_have_no_fe(self, tmp_path, bundle_file):
        train_csv = write_dataset_csv(tmp_path / "clean.csv", with_missing=False,
                                      with_strcat=False)
        out = tmp_path / "clean_art"
        summary = cmd_synthesize(SynthesisConfig(
            target="label", train_path=train_csv, bundle_path=bundle_file,
            seed=0, exec_command=STUB_EXEC, out_dir=str(out),
        ))
        skeletons = json.loads((out / "skeletons.json").read_text())
        labels = {c["label"] for s in skeletons for c in s["fe"]}
        assert "Imputer" not in labels
        assert summary["n_candidates"] >= 1  # pipeline still emitted

    def test_missing_bundle_exits_2(self, tmp_path):
        train_csv = write_dataset_csv(tmp_path / "train.csv")
        code = main(["synthesize", "--bundle", str(tmp_path / "nope.json"),
                     "--train", train_csv, "--target", "label",
                     "--out", str(tmp_path / "o")])
        assert code == 2

    def test_missing_data_file_exits_3(self, tmp_path, bundle_file):
        code = main(["synthesize", "--bundle", bundle_file,
                     "--train", str(tmp_path / "ghost.csv"), "--target", "label",
                     "--out", str(tmp_path / "o")])
        assert code == 3

    def test_requires_exactly_one_of_corpus_bundle(self, tmp_path):
        with pytest.raises(ConfigError):
            SynthesisConfig(target="y", train_path="x.csv")
        with pytest.raises(ConfigError):
            SynthesisConfig(target="y", train_path="x.csv",
                            corpus_path="c.jsonl", bundle_path="b.json")

    def test_config_file_supplies_flags_and_flags_win(self, tmp_path, bundle_file,
                                                      corpus_file):
        train_csv = write_dataset_csv(tmp_path / "train.csv")
        config = {
            "bundle": bundle_file,
            "train": train_csv,
            "target": "label",
            "k": 2,
            "exec": STUB_EXEC,
            "out": str(tmp_path / "from_config"),
            "seed": 11,
        }
        config_path = tmp_path / "cfg.json"
        config_path.write_text(json.dumps(config))
        # config alone
        assert main(["synthesize", "--config", str(config_path)]) == 0
        summary = json.loads((tmp_path / "from_config" / "summary.json").read_text())
        assert summary["k"] == 2 and summary["seed"] == 11
        # the flag overrides the config value
        assert main(["synthesize", "--config", str(config_path),
                     "--out", str(tmp_path / "flag_out"), "--k", "1"]) == 0
        summary = json.loads((tmp_path / "flag_out" / "summary.json").read_text())
        assert summary["k"] == 1

    def test_synthesize_from_corpus_directly(self, tmp_path, corpus_file):
        train_csv = write_dataset_csv(tmp_path / "train.csv")
        out = tmp_path / "from_corpus"
        summary = cmd_synthesize(SynthesisConfig(
            target="label", train_path=train_csv, corpus_path=corpus_file,
            seed=0, exec_command=STUB_EXEC, out_dir=str(out),
        ))
        assert summary["n_candidates"] == 3
