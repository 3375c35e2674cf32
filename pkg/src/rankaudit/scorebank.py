"""Score-matrix data model, ingestion, validation, and normalization.

A ScoreMatrix is the universal input of the package: a dense models x tasks
table of optional scores plus per-task metric metadata (direction, group,
weight, baselines).  Matrices are immutable after construction and safe to
share across threads.

Missing scores are represented explicitly as None and are never imputed:
any operation whose task subset touches a missing cell fails loudly,
because silently filling cells would manufacture rankings.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field, replace
from typing import IO, Mapping, Sequence

import numpy as np

from .errors import ConfigError, MissingScoreError, ParseError, SchemaError

HIGHER = "higher"
LOWER = "lower"

_METRIC_KEYS = {"direction", "group", "weight", "random_baseline", "human_reference"}


@dataclass(frozen=True)
class MetricSpec:
    """Per-task metric metadata.

    direction says whether larger raw scores are better.  group is an
    optional label used by macro-averaging.  weight (strictly positive)
    is the default weight used by the weighted means.  The two optional
    baselines anchor human-normalization.
    """

    direction: str = HIGHER
    group: str | None = None
    weight: float = 1.0
    random_baseline: float | None = None
    human_reference: float | None = None

    def __post_init__(self) -> None:
        if self.direction not in (HIGHER, LOWER):
            raise ConfigError(f"direction must be '{HIGHER}' or '{LOWER}', got {self.direction!r}")
        if not (self.weight > 0):
            raise ConfigError(f"metric weight must be positive, got {self.weight}")
        if self.random_baseline is not None and self.human_reference is not None:
            if self.random_baseline == self.human_reference:
                raise ConfigError("random_baseline and human_reference must differ")


@dataclass(frozen=True)
class ScoreMatrix:
    """Immutable models x tasks score table with per-task metadata.

    scores is row-major (one row per model); cells are floats or None for
    missing.  Every present score must be finite.
    """

    model_ids: tuple[str, ...]
    task_ids: tuple[str, ...]
    scores: tuple[tuple[float | None, ...], ...]
    metrics: Mapping[str, MetricSpec] = field(default_factory=dict)

    def __post_init__(self) -> None:
        models = tuple(self.model_ids)
        tasks = tuple(self.task_ids)
        if len(set(models)) != len(models):
            raise SchemaError("duplicate model id")
        if len(set(tasks)) != len(tasks):
            raise SchemaError("duplicate task id")
        rows = tuple(tuple(row) for row in self.scores)
        if len(rows) != len(models):
            raise SchemaError(f"expected {len(models)} score rows, got {len(rows)}")
        for mid, row in zip(models, rows):
            if len(row) != len(tasks):
                raise SchemaError(
                    f"model {mid!r}: expected {len(tasks)} cells, got {len(row)}"
                )
            for tid, cell in zip(tasks, row):
                if cell is not None and not math.isfinite(cell):
                    raise SchemaError(f"non-finite score for model {mid!r}, task {tid!r}")
        metrics = dict(self.metrics)
        unknown = set(metrics) - set(tasks)
        if unknown:
            raise SchemaError(f"metric metadata for unknown task(s): {sorted(unknown)}")
        full = {tid: metrics.get(tid, MetricSpec()) for tid in tasks}
        object.__setattr__(self, "model_ids", models)
        object.__setattr__(self, "task_ids", tasks)
        object.__setattr__(self, "scores", rows)
        object.__setattr__(self, "metrics", full)

    # -- access helpers -------------------------------------------------

    @property
    def n_models(self) -> int:
        return len(self.model_ids)

    @property
    def n_tasks(self) -> int:
        return len(self.task_ids)

    def task_index(self, task_id: str) -> int:
        try:
            return self.task_ids.index(task_id)
        except ValueError:
            raise ConfigError(f"unknown task {task_id!r}") from None

    def value(self, model_id: str, task_id: str) -> float | None:
        try:
            i = self.model_ids.index(model_id)
        except ValueError:
            raise ConfigError(f"unknown model {model_id!r}") from None
        return self.scores[i][self.task_index(task_id)]

    def column(self, task_id: str) -> tuple[float | None, ...]:
        j = self.task_index(task_id)
        return tuple(row[j] for row in self.scores)

    def to_array(self, subset: Sequence[str] | None = None) -> np.ndarray:
        """Dense float array restricted to `subset` (all tasks if None).

        Raises MissingScoreError naming the first absent cell touched.
        """
        tasks = self.task_ids if subset is None else tuple(subset)
        cols = [self.task_index(t) for t in tasks]
        out = np.empty((self.n_models, len(cols)), dtype=float)
        for i, row in enumerate(self.scores):
            for k, j in enumerate(cols):
                cell = row[j]
                if cell is None:
                    raise MissingScoreError(
                        f"missing score for model {self.model_ids[i]!r}, "
                        f"task {self.task_ids[j]!r}"
                    )
                out[i, k] = cell
        return out

    def missing_cells(self) -> list[tuple[str, str]]:
        return [
            (mid, tid)
            for mid, row in zip(self.model_ids, self.scores)
            for tid, cell in zip(self.task_ids, row)
            if cell is None
        ]


class NormalizedMatrix(ScoreMatrix):
    """A ScoreMatrix whose every task is oriented higher-is-better."""

    def __post_init__(self) -> None:
        super().__post_init__()
        for tid, spec in self.metrics.items():
            if spec.direction != HIGHER:
                raise SchemaError(f"normalized matrix has lower-is-better task {tid!r}")


def orient(m: ScoreMatrix) -> NormalizedMatrix:
    """Flip lower-is-better columns by negation so all tasks read higher-is-better.

    Baselines of flipped tasks are negated alongside the scores so that
    human-normalization commutes with orientation.  Higher-is-better
    columns pass through unchanged.
    """
    flip = [m.metrics[t].direction == LOWER for t in m.task_ids]
    rows = tuple(
        tuple(
            None if cell is None else (-cell if flip[j] else cell)
            for j, cell in enumerate(row)
        )
        for row in m.scores
    )
    metrics = {}
    for j, tid in enumerate(m.task_ids):
        spec = m.metrics[tid]
        if flip[j]:
            spec = replace(
                spec,
                direction=HIGHER,
                random_baseline=None if spec.random_baseline is None else -spec.random_baseline,
                human_reference=None if spec.human_reference is None else -spec.human_reference,
            )
        metrics[tid] = spec
    return NormalizedMatrix(m.model_ids, m.task_ids, rows, metrics)


def human_normalize(m: ScoreMatrix) -> NormalizedMatrix:
    """Rescale every score to (s - random_baseline) / (human_reference - random_baseline).

    The random baseline maps to 0 and the human reference to 1.  The
    formula applied to raw scores already lands higher-is-better for both
    directions (for lower-is-better tasks the reference is numerically
    below the baseline, which flips the slope), so it equals orienting
    first and normalizing after.  Every task must carry both baselines.
    """
    for tid in m.task_ids:
        spec = m.metrics[tid]
        if spec.random_baseline is None or spec.human_reference is None:
            raise ConfigError(
                f"task {tid!r} lacks random_baseline/human_reference needed for normalization"
            )
    rows = []
    for row in m.scores:
        out_row = []
        for tid, cell in zip(m.task_ids, row):
            spec = m.metrics[tid]
            if cell is None:
                out_row.append(None)
            else:
                rb, hr = spec.random_baseline, spec.human_reference
                out_row.append((cell - rb) / (hr - rb))
        rows.append(tuple(out_row))
    metrics = {
        tid: replace(
            m.metrics[tid], direction=HIGHER, random_baseline=0.0, human_reference=1.0
        )
        for tid in m.task_ids
    }
    return NormalizedMatrix(m.model_ids, m.task_ids, tuple(rows), metrics)


# -- ingestion ----------------------------------------------------------


def _as_text(source: bytes | str | IO) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, str):
        return source
    data = source.read()
    return data.decode("utf-8") if isinstance(data, bytes) else data


def parse_metric_spec(task_id: str, raw: Mapping[str, object]) -> MetricSpec:
    unknown = set(raw) - _METRIC_KEYS
    if unknown:
        raise SchemaError(f"task {task_id!r}: unknown metric key(s) {sorted(unknown)}")
    kwargs: dict = {}
    if "direction" in raw:
        kwargs["direction"] = raw["direction"]
    if "group" in raw:
        kwargs["group"] = raw["group"]
    for key in ("weight", "random_baseline", "human_reference"):
        if key in raw and raw[key] is not None:
            try:
                kwargs[key] = float(raw[key])  # type: ignore[arg-type]
            except (TypeError, ValueError):
                raise ParseError(f"task {task_id!r}: {key} is not numeric") from None
    return MetricSpec(**kwargs)


def load_metrics(source: bytes | str | IO) -> dict[str, MetricSpec]:
    """Parse a sidecar metric-metadata JSON: {"tasks": {task_id: {...}}}."""
    try:
        doc = json.loads(_as_text(source))
    except json.JSONDecodeError as exc:
        raise ParseError(f"metric sidecar is not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or not isinstance(doc.get("tasks"), dict):
        raise SchemaError('metric sidecar must be {"tasks": {...}}')
    out = {}
    for tid, raw in doc["tasks"].items():
        if not isinstance(raw, dict):
            raise SchemaError(f"task {tid!r}: metric entry must be an object")
        out[tid] = parse_metric_spec(tid, raw)
    return out


def _parse_cell(text: str, row_no: int, col_name: str) -> float | None:
    text = text.strip()
    if not text:
        return None
    try:
        value = float(text)
    except ValueError:
        raise ParseError(
            f"row {row_no}, column {col_name!r}: cannot parse {text!r} as a number"
        ) from None
    if not math.isfinite(value):
        raise ParseError(f"row {row_no}, column {col_name!r}: non-finite value {text!r}")
    return value


def load_matrix(
    source: bytes | str | IO,
    format: str = "csv",
    metrics: Mapping[str, MetricSpec] | None = None,
) -> ScoreMatrix:
    """Parse a score matrix from CSV or JSON.

    CSV: header row `model,<task>,...`, one row per model, blank cell =
    missing; metric metadata comes from the `metrics` argument (typically
    a parsed sidecar).  JSON: an object with "models", "tasks", "scores"
    (array of arrays, null = missing) and optional inline "metrics".
    """
    if format == "csv":
        return _load_csv(_as_text(source), metrics)
    if format == "json":
        return _load_json(_as_text(source), metrics)
    raise ConfigError(f"unknown matrix format {format!r}")


def _load_csv(text: str, metrics: Mapping[str, MetricSpec] | None) -> ScoreMatrix:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError("empty CSV stream") from None
    if not header or header[0].strip() != "model":
        raise SchemaError("CSV header must start with 'model'")
    task_ids = tuple(h.strip() for h in header[1:])
    if not task_ids:
        raise SchemaError("CSV header declares no tasks")
    model_ids: list[str] = []
    rows: list[tuple[float | None, ...]] = []
    for row_no, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue  # tolerate trailing blank line
        if len(row) != len(task_ids) + 1:
            raise SchemaError(
                f"row {row_no}: expected {len(task_ids) + 1} cells, got {len(row)}"
            )
        model_ids.append(row[0].strip())
        rows.append(
            tuple(
                _parse_cell(cell, row_no, task_ids[j])
                for j, cell in enumerate(row[1:])
            )
        )
    if not model_ids:
        raise SchemaError("CSV stream contains no model rows")
    return ScoreMatrix(tuple(model_ids), task_ids, tuple(rows), dict(metrics or {}))


def _load_json(text: str, metrics: Mapping[str, MetricSpec] | None) -> ScoreMatrix:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"matrix stream is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise SchemaError("JSON matrix must be an object")
    for key in ("models", "tasks", "scores"):
        if key not in doc:
            raise SchemaError(f"JSON matrix lacks {key!r}")
    model_ids = tuple(str(m) for m in doc["models"])
    task_ids = tuple(str(t) for t in doc["tasks"])
    raw_scores = doc["scores"]
    if not isinstance(raw_scores, list):
        raise SchemaError("'scores' must be an array of arrays")
    rows = []
    for i, raw_row in enumerate(raw_scores):
        if not isinstance(raw_row, list):
            raise SchemaError("'scores' must be an array of arrays")
        cells = []
        for j, cell in enumerate(raw_row):
            if cell is None:
                cells.append(None)
            elif isinstance(cell, (int, float)) and not isinstance(cell, bool):
                if not math.isfinite(cell):
                    raise ParseError(f"row {i + 1}, column {j + 1}: non-finite score")
                cells.append(float(cell))
            else:
                raise ParseError(
                    f"row {i + 1}, column {j + 1}: cannot parse {cell!r} as a number"
                )
        rows.append(tuple(cells))
    merged: dict[str, MetricSpec] = {}
    if "metrics" in doc and doc["metrics"] is not None:
        if not isinstance(doc["metrics"], dict):
            raise SchemaError("'metrics' must be an object keyed by task id")
        for tid, raw in doc["metrics"].items():
            merged[tid] = parse_metric_spec(tid, raw)
    if metrics:
        merged.update(metrics)
    return ScoreMatrix(model_ids, task_ids, tuple(rows), merged)


# -- serialization ------------------------------------------------------


def _metric_to_dict(spec: MetricSpec) -> dict:
    out: dict = {"direction": spec.direction}
    if spec.group is not None:
        out["group"] = spec.group
    if spec.weight != 1.0:
        out["weight"] = spec.weight
    if spec.random_baseline is not None:
        out["random_baseline"] = spec.random_baseline
    if spec.human_reference is not None:
        out["human_reference"] = spec.human_reference
    return out


def save_matrix(m: ScoreMatrix, format: str = "csv") -> str:
    """Serialize a matrix so load_matrix(save_matrix(m)) round-trips exactly."""
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["model", *m.task_ids])
        for mid, row in zip(m.model_ids, m.scores):
            writer.writerow([mid, *["" if c is None else repr(c) for c in row]])
        return buf.getvalue()
    if format == "json":
        doc = {
            "models": list(m.model_ids),
            "tasks": list(m.task_ids),
            "scores": [[c for c in row] for row in m.scores],
            "metrics": {tid: _metric_to_dict(m.metrics[tid]) for tid in m.task_ids},
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    raise ConfigError(f"unknown matrix format {format!r}")


def save_metrics(m: ScoreMatrix) -> str:
    """Serialize metric metadata in the sidecar format accepted by load_metrics."""
    doc = {"tasks": {tid: _metric_to_dict(m.metrics[tid]) for tid in m.task_ids}}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
