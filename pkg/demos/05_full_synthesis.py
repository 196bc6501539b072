"""End-to-end batch synthesis: train a bundle from the synthetic corpus,
synthesize candidate pipelines for a fresh dataset, validate them on an
internal split, and report the selected pipeline.

Uses the real executor (the generated scripts need pandas/scikit-learn);
pass --stub to score candidates with the deterministic stub instead.

Run:  python3 demos/05_full_synthesis.py [--stub]
"""

import csv
import random
import sys
import tempfile
from pathlib import Path

from pipesynth import generate_synthetic_corpus, serialize_corpus
from pipesynth.cli import SynthesisConfig, cmd_synthesize, cmd_train

workdir = Path(tempfile.mkdtemp(prefix="pipesynth_demo_"))
print("working in", workdir)

corpus_path = workdir / "corpus.jsonl"
serialize_corpus(generate_synthetic_corpus(seed=42, n=500), str(corpus_path))
bundle_path = workdir / "bundle.json"
cmd_train(str(corpus_path), str(bundle_path), seed=0)

rng = random.Random(11)
rows = []
for i in range(200):
    y = 1 if rng.random() < 0.2 else 0
    rows.append({
        "amount": "" if rng.random() < 0.15 else f"{rng.gauss(2.0 * y, 1.0):.4f}",
        "balance": "" if rng.random() < 0.10 else f"{rng.gauss(1.0 - 2.0 * y, 1.5):.4f}",
        "age": f"{rng.uniform(18, 90):.2f}",
        "card_type": rng.choice(["alpha", "beta", "gamma"]) if y else rng.choice(["alpha", "delta"]),
        "label": str(y),
    })
for name, part in (("train.csv", rows[:150]), ("test.csv", rows[150:])):
    with open(workdir / name, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
        writer.writeheader()
        writer.writerows(part)

executor = None
if "--stub" in sys.argv:
    executor = f"{sys.executable} -m pipesynth.stub_executor {{script}} --workdir {{workdir}}"

summary = cmd_synthesize(SynthesisConfig(
    target="label",
    train_path=str(workdir / "train.csv"),
    test_path=str(workdir / "test.csv"),
    bundle_path=str(bundle_path),
    seed=0,
    exec_command=executor,
    out_dir=str(workdir / "artifacts"),
))

print("\nsynthesis summary:")
for key, value in summary.items():
    print(f"  {key:>18}: {value}")
print("\nbest pipeline script:", workdir / "artifacts" / "best_pipeline.py")
