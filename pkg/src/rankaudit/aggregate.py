"""Aggregation schemes that turn a score matrix into per-model scores or rankings.

Seven schemes are provided: arithmetic mean, geometric mean, median,
macro-average over task groups, average rank, robust average rank (scores
binned into fixed-width buckets before ranking), and elimination ranking
(an exhaustive-ballot vote where tasks repeatedly vote for their top
remaining model and the fewest-votes models are knocked out).

The value-based schemes expect an oriented (higher-is-better) matrix; the
`aggregate` dispatcher orients automatically and returns a Ranking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import ConfigError, DomainError
from .ranking import Ranking, fractional_ranks, rank_models
from .scorebank import HIGHER, ScoreMatrix, orient

METHODS = (
    "arithmetic_mean",
    "geometric_mean",
    "median",
    "macro_average",
    "average_rank",
    "robust_average_rank",
    "elimination_ranking",
)

RANK_VALUED = {"average_rank", "robust_average_rank"}


@dataclass(frozen=True)
class AggregationSpec:
    """Which aggregation scheme to run, plus its parameters.

    bin_width is used only by robust_average_rank, group_map only by
    macro_average, and weights only by the mean-based schemes (rank-based
    schemes deliberately ignore weights).
    """

    method: str = "arithmetic_mean"
    bin_width: float = 1.0
    group_map: Mapping[str, str] | None = None
    weights: Mapping[str, float] | None = None

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ConfigError(f"unknown aggregation method {self.method!r}")
        if not (self.bin_width > 0):
            raise ConfigError(f"bin_width must be positive, got {self.bin_width}")
        if self.weights is not None:
            for tid, w in self.weights.items():
                if not (w > 0):
                    raise ConfigError(f"weight for task {tid!r} must be positive, got {w}")


@dataclass(frozen=True)
class AggregateResult:
    """Per-model aggregate values; higher_is_better is False for rank-valued ones."""

    per_model: Mapping[str, float]
    higher_is_better: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "per_model", dict(self.per_model))


def _check_subset(m: ScoreMatrix, subset: Sequence[str] | None) -> tuple[str, ...]:
    tasks = tuple(m.task_ids if subset is None else subset)
    if not tasks:
        raise ConfigError("task subset is empty")
    if len(set(tasks)) != len(tasks):
        raise ConfigError("task subset contains duplicates")
    for t in tasks:
        m.task_index(t)
    return tasks


def _require_oriented(m: ScoreMatrix, tasks: Sequence[str]) -> None:
    for t in tasks:
        if m.metrics[t].direction != HIGHER:
            raise ConfigError(
                f"task {t!r} is lower-is-better; orient() the matrix before aggregating"
            )


def _resolve_weights(
    m: ScoreMatrix, tasks: Sequence[str], weights: Mapping[str, float] | None
) -> list[float]:
    out = []
    for t in tasks:
        if weights is not None and t in weights:
            w = float(weights[t])
        else:
            w = m.metrics[t].weight
        if not (w > 0):
            raise ConfigError(f"weight for task {t!r} must be positive, got {w}")
        out.append(w)
    return out


def arithmetic_mean(
    m: ScoreMatrix,
    subset: Sequence[str] | None = None,
    weights: Mapping[str, float] | None = None,
) -> AggregateResult:
    """Per-model weighted mean over the subset."""
    tasks = _check_subset(m, subset)
    _require_oriented(m, tasks)
    w = _resolve_weights(m, tasks, weights)
    total_w = sum(w)
    arr = m.to_array(tasks)
    values = {
        mid: float(sum(wi * x for wi, x in zip(w, row)) / total_w)
        for mid, row in zip(m.model_ids, arr)
    }
    return AggregateResult(values, higher_is_better=True)


def geometric_mean(
    m: ScoreMatrix,
    subset: Sequence[str] | None = None,
    weights: Mapping[str, float] | None = None,
) -> AggregateResult:
    """exp of the weighted mean of logs; every selected score must be > 0."""
    tasks = _check_subset(m, subset)
    _require_oriented(m, tasks)
    w = _resolve_weights(m, tasks, weights)
    total_w = sum(w)
    arr = m.to_array(tasks)
    values = {}
    for i, mid in enumerate(m.model_ids):
        log_sum = 0.0
        for j, t in enumerate(tasks):
            x = arr[i, j]
            if x <= 0:
                raise DomainError(
                    f"geometric mean undefined: model {mid!r} has score {x} on task {t!r}"
                )
            log_sum += w[j] * math.log(x)
        values[mid] = math.exp(log_sum / total_w)
    return AggregateResult(values, higher_is_better=True)


def median_score(m: ScoreMatrix, subset: Sequence[str] | None = None) -> AggregateResult:
    """Per-model median over the subset (even count: mean of the two central values)."""
    tasks = _check_subset(m, subset)
    _require_oriented(m, tasks)
    arr = m.to_array(tasks)
    values = {}
    for mid, row in zip(m.model_ids, arr):
        s = sorted(row)
        n = len(s)
        if n % 2:
            values[mid] = float(s[n // 2])
        else:
            values[mid] = float((s[n // 2 - 1] + s[n // 2]) / 2.0)
    return AggregateResult(values, higher_is_better=True)


def macro_average(
    m: ScoreMatrix,
    subset: Sequence[str] | None = None,
    group_map: Mapping[str, str] | None = None,
    weights: Mapping[str, float] | None = None,
) -> AggregateResult:
    """Unweighted mean over groups of the weighted mean within each group.

    Groups come from `group_map` where given, falling back to the task's
    metric metadata; a selected task without a group is an error.
    """
    tasks = _check_subset(m, subset)
    _require_oriented(m, tasks)
    groups: dict[str, list[str]] = {}
    for t in tasks:
        g = None
        if group_map is not None:
            g = group_map.get(t)
        if g is None:
            g = m.metrics[t].group
        if g is None:
            raise ConfigError(f"task {t!r} has no group; macro-average needs a total group map")
        groups.setdefault(g, []).append(t)
    w = dict(zip(tasks, _resolve_weights(m, tasks, weights)))
    arr = m.to_array(tasks)
    col = {t: j for j, t in enumerate(tasks)}
    values = {}
    for i, mid in enumerate(m.model_ids):
        group_means = []
        for g in groups.values():
            total_w = sum(w[t] for t in g)
            group_means.append(sum(w[t] * arr[i, col[t]] for t in g) / total_w)
        values[mid] = float(sum(group_means) / len(group_means))
    return AggregateResult(values, higher_is_better=True)


def average_rank(m: ScoreMatrix, subset: Sequence[str] | None = None) -> AggregateResult:
    """Rank models per task (1 = best, ties share the average rank), then mean."""
    tasks = _check_subset(m, subset)
    _require_oriented(m, tasks)
    arr = m.to_array(tasks)
    totals = [0.0] * m.n_models
    for j in range(len(tasks)):
        for i, r in enumerate(fractional_ranks(arr[:, j].tolist(), descending=True)):
            totals[i] += r
    values = {mid: totals[i] / len(tasks) for i, mid in enumerate(m.model_ids)}
    return AggregateResult(values, higher_is_better=False)


def robust_average_rank(
    m: ScoreMatrix,
    subset: Sequence[str] | None = None,
    bin_width: float = 1.0,
) -> AggregateResult:
    """Average rank after replacing each score s by floor(s / bin_width).

    Scores falling in the same bucket tie, which makes the ranking robust
    to sub-bucket score noise.  Buckets are anchored at zero.
    """
    if not (bin_width > 0):
        raise ConfigError(f"bin_width must be positive, got {bin_width}")
    tasks = _check_subset(m, subset)
    _require_oriented(m, tasks)
    arr = m.to_array(tasks)
    totals = [0.0] * m.n_models
    for j in range(len(tasks)):
        binned = [float(math.floor(x / bin_width)) for x in arr[:, j]]
        for i, r in enumerate(fractional_ranks(binned, descending=True)):
            totals[i] += r
    values = {mid: totals[i] / len(tasks) for i, mid in enumerate(m.model_ids)}
    return AggregateResult(values, higher_is_better=False)


def elimination_ranking(m: ScoreMatrix, subset: Sequence[str] | None = None) -> Ranking:
    """Exhaustive-ballot elimination: tasks vote, fewest votes drop out.

    Each round every task casts one vote for its top remaining model
    (task-level ties split the vote fractionally).  All models holding
    the minimal vote total are eliminated together and take the worst
    open positions; their order within that block is settled by running
    the same contest among themselves, so a one-task ballot degenerates
    to the plain score ordering.  If a round would eliminate everyone,
    the remaining models tie.  Votes are exact rationals, so outcomes do
    not depend on summation order.
    """
    tasks = _check_subset(m, subset)
    _require_oriented(m, tasks)
    arr = m.to_array(tasks)
    score = {
        mid: {t: arr[i, j] for j, t in enumerate(tasks)}
        for i, mid in enumerate(m.model_ids)
    }

    def contest(models: frozenset[str]) -> list[frozenset[str]]:
        """Tie groups best-first for a sub-field of models."""
        if len(models) == 1:
            return [models]
        votes: dict[str, Fraction] = {mid: Fraction(0) for mid in models}
        for t in tasks:
            best = max(score[mid][t] for mid in models)
            tops = [mid for mid in models if score[mid][t] == best]
            share = Fraction(1, len(tops))
            for mid in tops:
                votes[mid] += share
        v_min = min(votes.values())
        losers = frozenset(mid for mid in models if votes[mid] == v_min)
        if losers == models:
            return [models]
        return contest(models - losers) + contest(losers)

    groups = contest(frozenset(m.model_ids))
    entries: dict[str, float] = {}
    position = 1
    for group in groups:
        rank = position + (len(group) - 1) / 2.0
        for mid in group:
            entries[mid] = rank
        position += len(group)
    return Ranking(entries)


def aggregate(
    m: ScoreMatrix,
    subset: Sequence[str] | None = None,
    spec: AggregationSpec | None = None,
) -> Ranking:
    """Dispatch to the configured scheme and return a Ranking.

    The matrix is oriented first if any selected task is lower-is-better;
    rank-valued aggregates are converted with lower-is-better semantics so
    rank 1 is best everywhere.
    """
    spec = spec or AggregationSpec()
    tasks = _check_subset(m, subset)
    if any(m.metrics[t].direction != HIGHER for t in tasks):
        m = orient(m)
    if spec.method == "arithmetic_mean":
        result = arithmetic_mean(m, tasks, spec.weights)
    elif spec.method == "geometric_mean":
        result = geometric_mean(m, tasks, spec.weights)
    elif spec.method == "median":
        result = median_score(m, tasks)
    elif spec.method == "macro_average":
        result = macro_average(m, tasks, spec.group_map, spec.weights)
    elif spec.method == "average_rank":
        result = average_rank(m, tasks)
    elif spec.method == "robust_average_rank":
        result = robust_average_rank(m, tasks, spec.bin_width)
    elif spec.method == "elimination_ranking":
        return elimination_ranking(m, tasks)
    else:  # pragma: no cover - guarded by AggregationSpec validation
        raise ConfigError(f"unknown aggregation method {spec.method!r}")
    return rank_models(result)
