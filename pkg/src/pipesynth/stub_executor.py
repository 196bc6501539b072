"""Scripted executor for tests and dry runs: prints a deterministic score
derived from the script contents instead of running it.

Usage (matches the executor contract):

    python -m pipesynth.stub_executor {script} --workdir {workdir}
"""

from __future__ import annotations

import argparse
import hashlib
import sys


def scripted_score(source: bytes) -> float:
    """Stable pseudo-score in [0, 1) from the script bytes."""
    digest = hashlib.md5(source).hexdigest()
    return (int(digest[:12], 16) % 1_000_000) / 1_000_000


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("script")
    parser.add_argument("--workdir", default=".")
    args = parser.parse_args(argv)
    with open(args.script, "rb") as fh:
        score = scripted_score(fh.read())
    print(f"RESULT:{score:.6f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
