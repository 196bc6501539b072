"""Generate the synthetic training corpus, look at a record, and mine the
component-order DAG from it.

Run:  python3 demos/02_corpus_and_order_mining.py
"""

import json

from pipesynth import generate_synthetic_corpus, mine_order_dag

corpus = generate_synthetic_corpus(seed=42, n=500)
print(f"{len(corpus.records)} synthetic abstract pipelines")
print("FE meta-targets:", ", ".join(corpus.fe_meta_targets()))

record = corpus.records[0]
print("\nfirst record:")
print("  dataset_id :", record.dataset_id)
print("  task       :", record.task.value)
print("  fe_sequence:", " -> ".join(record.fe_sequence) or "(none)")
print("  model      :", record.model)

dag = mine_order_dag(corpus, min_support=0.8)
print("\nmined order DAG (transitively reduced):")
for (a, b), support in sorted(dag.edges.items()):
    print(f"  {a:>18} -> {b:<18} support={support}")

print("\nserialized form:")
print(json.dumps(json.loads(dag.to_json())["edges"][:3], indent=2), "...")
