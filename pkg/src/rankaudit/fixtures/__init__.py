"""Bundled score fixtures.

`lra_matrix()` loads the transcribed public Long Range Arena per-task
accuracy table (11 models x 5 tasks); see lra_metrics.json for the
provenance note.  Synthetic fixtures used by tests live in the test tree,
not here.
"""

from __future__ import annotations

from importlib import resources

from ..scorebank import ScoreMatrix, load_matrix, load_metrics

LRA_SCORES = "lra_scores.csv"
LRA_METRICS = "lra_metrics.json"


def _read(name: str) -> bytes:
    return resources.files(__package__).joinpath(name).read_bytes()


def lra_matrix() -> ScoreMatrix:
    metrics = load_metrics(_read(LRA_METRICS))
    return load_matrix(_read(LRA_SCORES), "csv", metrics)


def fixture_path(name: str):
    """Filesystem path of a bundled fixture (for CLI-level tests and demos)."""
    return resources.files(__package__).joinpath(name)
