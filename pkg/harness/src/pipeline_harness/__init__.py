"""Reference executor for generated ML pipeline scripts: timeout-guarded
single-script runs with structured reports, the Default baseline, and a
smoke suite over synthesis artifact directories."""

from .baseline import default_baseline_score
from .runner import HarnessReport, parse_result_line, run_script
from .smoke import smoke_suite

__version__ = "0.1.0"
