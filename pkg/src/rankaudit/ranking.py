"""Rankings, fractional ranks, Kendall tau-b, Top-k extraction, subset streams."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

from .errors import ConfigError, SchemaError, UndefinedCorrelationError


def fractional_ranks(values: Sequence[float], descending: bool = True) -> list[float]:
    """Rank values with rank 1 = best; exactly equal values share the average rank.

    `descending=True` means larger values rank better.  Equality is exact
    float equality: callers that want tolerance must round/bin first.
    """
    order = sorted(range(len(values)), key=lambda i: values[i], reverse=descending)
    ranks = [0.0] * len(values)
    pos = 0
    while pos < len(order):
        end = pos
        while end + 1 < len(order) and values[order[end + 1]] == values[order[pos]]:
            end += 1
        avg = (pos + 1 + end + 1) / 2.0
        for idx in order[pos : end + 1]:
            ranks[idx] = avg
        pos = end + 1
    return ranks


@dataclass(frozen=True)
class Ranking:
    """A total preorder over models as fractional ranks (rank 1 = best).

    Ties share identical rank values and the ranks always sum to
    n(n+1)/2, which pins them to a valid fractional ranking.
    """

    entries: Mapping[str, float]

    def __post_init__(self) -> None:
        entries = dict(self.entries)
        if not entries:
            raise ConfigError("ranking over an empty model set")
        n = len(entries)
        total = sum(entries.values())
        if abs(total - n * (n + 1) / 2.0) > 1e-6:
            raise SchemaError(
                f"ranks sum to {total}, expected {n * (n + 1) / 2.0} for {n} models"
            )
        if min(entries.values()) < 1.0 - 1e-12:
            raise SchemaError("ranks must be >= 1")
        object.__setattr__(self, "entries", entries)

    @property
    def n_models(self) -> int:
        return len(self.entries)

    def order(self) -> list[str]:
        """Models best-first; ties broken by id for display stability only."""
        return sorted(self.entries, key=lambda m: (self.entries[m], m))

    def tie_groups(self) -> list[frozenset[str]]:
        """Tied sets of models, best group first."""
        by_rank: dict[float, set[str]] = {}
        for model, rank in self.entries.items():
            by_rank.setdefault(rank, set()).add(model)
        return [frozenset(by_rank[r]) for r in sorted(by_rank)]


@dataclass(frozen=True)
class TopK:
    """The k best positions of a ranking; a tied position is a set.

    If a tie straddles the k-th place the whole tied set is included and
    `boundary_tied` is set, so truncation never silently orders tied
    models.
    """

    k: int
    sequence: tuple[frozenset[str], ...]
    boundary_tied: bool

    def n_placed(self) -> int:
        return sum(len(group) for group in self.sequence)

    def names(self) -> list[str]:
        """Flat best-first model list; raises if any position is tied."""
        out = []
        for group in self.sequence:
            if len(group) != 1:
                raise ValueError("tied position cannot be flattened to single names")
            out.append(next(iter(group)))
        return out

    def render(self) -> str:
        parts = []
        for group in self.sequence:
            if len(group) == 1:
                parts.append(next(iter(group)))
            else:
                parts.append("{" + " | ".join(sorted(group)) + "}")
        text = ", ".join(parts)
        if self.boundary_tied:
            text += " [boundary tie]"
        return text


def rank_models(agg, higher_is_better: bool = True) -> Ranking:
    """Turn per-model aggregate values into a fractional Ranking.

    Accepts either a plain mapping model -> value with an explicit
    direction flag, or an aggregate-result object carrying `per_model`
    and its own `higher_is_better` (which then wins), so rank-valued
    aggregates orient themselves correctly.
    """
    per_model: Mapping[str, float] = getattr(agg, "per_model", agg)
    higher_is_better = getattr(agg, "higher_is_better", higher_is_better)
    if not per_model:
        raise ConfigError("cannot rank an empty aggregate")
    models = list(per_model)
    ranks = fractional_ranks([per_model[m] for m in models], descending=higher_is_better)
    return Ranking(dict(zip(models, ranks)))


def top_k(r: Ranking, k: int) -> TopK:
    """Extract the ordered Top-k positions, keeping boundary ties whole."""
    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k}")
    sequence: list[frozenset[str]] = []
    placed = 0
    boundary = False
    for group in r.tie_groups():
        if placed >= k:
            break
        sequence.append(group)
        if placed < k < placed + len(group):
            boundary = True
        placed += len(group)
    return TopK(k=k, sequence=tuple(sequence), boundary_tied=boundary)


def kendall_tau_b(a: Ranking, b: Ranking) -> float:
    """Tie-corrected Kendall rank correlation between two rankings.

    tau_b = (nc - nd) / sqrt((n0 - n1) (n0 - n2)) where n0 = n(n-1)/2 and
    n1, n2 are the tie terms of each side.  Discordances are counted by
    merge-sort inversion counting in O(n log n); the O(n^2) definition
    lives in the test suite as the independent oracle.
    """
    if set(a.entries) != set(b.entries):
        raise SchemaError("rankings compare different model sets")
    models = sorted(a.entries)
    ra = [a.entries[m] for m in models]
    rb = [b.entries[m] for m in models]
    n = len(models)
    n0 = n * (n - 1) // 2
    n1 = _tie_term(ra)
    n2 = _tie_term(rb)
    if n0 == n1 or n0 == n2:
        raise UndefinedCorrelationError("tau-b undefined: one side is entirely tied")
    order = sorted(range(n), key=lambda i: (ra[i], rb[i]))
    nd = _discordant_pairs([rb[i] for i in order])
    n3 = _joint_tie_term(ra, rb)
    nc = n0 - n1 - n2 + n3 - nd
    return (nc - nd) / ((n0 - n1) ** 0.5 * (n0 - n2) ** 0.5)


def _tie_term(ranks: Sequence[float]) -> int:
    counts: dict[float, int] = {}
    for r in ranks:
        counts[r] = counts.get(r, 0) + 1
    return sum(c * (c - 1) // 2 for c in counts.values())


def _joint_tie_term(ra: Sequence[float], rb: Sequence[float]) -> int:
    counts: dict[tuple[float, float], int] = {}
    for pair in zip(ra, rb):
        counts[pair] = counts.get(pair, 0) + 1
    return sum(c * (c - 1) // 2 for c in counts.values())


def _discordant_pairs(b_sorted_by_a: list[float]) -> int:
    """Count discordant pairs given the b ranks sorted by (a, b).

    Equal-a runs arrive sorted by b, so they contribute no strict
    b-inversions, and pairs tied in b never invert; every remaining
    strict inversion is exactly one discordant pair.
    """
    return _count_strict_inversions(list(b_sorted_by_a))


def _count_strict_inversions(seq: list[float]) -> int:
    if len(seq) < 2:
        return 0

    def merge_count(lo: int, hi: int) -> int:
        if hi - lo < 2:
            return 0
        mid = (lo + hi) // 2
        count = merge_count(lo, mid) + merge_count(mid, hi)
        merged = []
        i, j = lo, mid
        while i < mid and j < hi:
            if seq[j] < seq[i]:
                count += mid - i
                merged.append(seq[j])
                j += 1
            else:
                merged.append(seq[i])
                i += 1
        merged.extend(seq[i:mid])
        merged.extend(seq[j:hi])
        seq[lo:hi] = merged
        return count

    return merge_count(0, len(seq))


def enumerate_subsets(tasks: Sequence[str], size: int) -> Iterator[tuple[str, ...]]:
    """Stream all size-`size` task subsets in lexicographic index order."""
    n = len(tasks)
    if not 1 <= size <= n:
        raise ConfigError(f"subset size must be in [1, {n}], got {size}")
    return itertools.combinations(tuple(tasks), size)
