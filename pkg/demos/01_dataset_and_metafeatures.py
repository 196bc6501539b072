"""Load a tabular dataset, inspect the inferred column kinds, and compute
the 38 meta-features that drive component prediction.

Run:  python3 demos/01_dataset_and_metafeatures.py
"""

import csv
import random
import tempfile
from pathlib import Path

from pipesynth import compute_meta_features, load_csv

# build a small transactions-style CSV: numeric columns with missing
# values, a string-categorical column, a date column, and a binary target
rng = random.Random(0)
workdir = Path(tempfile.mkdtemp(prefix="pipesynth_demo_"))
path = workdir / "transactions.csv"
with open(path, "w", newline="") as fh:
    writer = csv.writer(fh)
    writer.writerow(["amount", "card_type", "signup_date", "is_fraud"])
    for i in range(300):
        fraud = rng.random() < 0.15
        writer.writerow([
            "" if rng.random() < 0.2 else f"{rng.lognormvariate(3, 1):.2f}",
            rng.choice(["visa", "mastercard", "amex"]),
            f"20{rng.randint(15, 23)}-{rng.randint(1, 12):02d}-{rng.randint(1, 28):02d}",
            int(fraud),
        ])

dataset = load_csv(str(path), target_names=["is_fraud"])
print(f"loaded {dataset.n_rows} rows, task = {dataset.task.value}")
for col in dataset.columns:
    missing = sum(1 for v in col.values if v is None)
    print(f"  {col.name:>12}  kind={col.kind.value:<16} missing={missing}")

print("\nmeta-features:")
mf = compute_meta_features(dataset)
for name, value in mf.items():
    print(f"  {name:>22} = {value:g}")
