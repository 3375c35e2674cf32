import math

import numpy as np
import pytest

from rankaudit import fixtures
from rankaudit.aggregate import (
    AggregationSpec,
    aggregate,
    arithmetic_mean,
    average_rank,
    elimination_ranking,
    geometric_mean,
    macro_average,
    median_score,
    robust_average_rank,
)
from rankaudit.errors import ConfigError, DomainError, MissingScoreError
from rankaudit.ranking import rank_models
from rankaudit.scorebank import LOWER, MetricSpec, ScoreMatrix


def matrix(rows, model_ids=None, task_ids=None, metrics=None):
    n_models = len(rows)
    n_tasks = len(rows[0])
    model_ids = model_ids or tuple(chr(ord("A") + i) for i in range(n_models))
    task_ids = task_ids or tuple(f"t{j + 1}" for j in range(n_tasks))
    return ScoreMatrix(tuple(model_ids), tuple(task_ids),
                       tuple(tuple(float(x) for x in r) for r in rows), metrics or {})


def random_matrix(rng, n_models, n_tasks, low=0.0, high=100.0):
    rows = rng.uniform(low, high, size=(n_models, n_tasks))
    return matrix(rows.tolist())


# -- arithmetic mean --------------------------------------------------------


def test_mean_single_task_is_identity():
    m = matrix([[3.0, 9.0], [1.0, 7.0]])
    res = arithmetic_mean(m, ["t1"])
    assert res.per_model == {"A": 3.0, "B": 1.0}
    assert res.higher_is_better


def test_mean_equal_weights():
    m = matrix([[2.0, 4.0]])
    assert arithmetic_mean(m).per_model["A"] == 3.0


def test_mean_respects_weights():
    m = matrix([[2.0, 4.0]])
    res = arithmetic_mean(m, weights={"t1": 3.0, "t2": 1.0})
    assert res.per_model["A"] == pytest.approx(2.5)


def test_mean_lra_argmax_is_bigbird():
    m = fixtures.lra_matrix()
    res = arithmetic_mean(m)
    assert max(res.per_model, key=res.per_model.get) == "BigBird"


def test_mean_errors():
    with pytest.raises(ConfigError):
        arithmetic_mean(matrix([[1.0]]), [])
    holey = ScoreMatrix(("A",), ("t1", "t2"), ((1.0, None),))
    with pytest.raises(MissingScoreError):
        arithmetic_mean(holey)
    assert arithmetic_mean(holey, ["t1"]).per_model == {"A": 1.0}


def test_lower_better_guard():
    m = matrix([[1.0]], metrics={"t1": MetricSpec(direction=LOWER)})
    with pytest.raises(ConfigError, match="orient"):
        arithmetic_mean(m)


# -- geometric mean ---------------------------------------------------------


def test_geometric_mean_basics():
    assert geometric_mean(matrix([[4.0, 9.0]])).per_model["A"] == pytest.approx(6.0)
    assert geometric_mean(matrix([[7.0, 7.0, 7.0]])).per_model["A"] == pytest.approx(7.0)


def test_geometric_mean_rejects_non_positive():
    with pytest.raises(DomainError, match="'A'.*'t2'"):
        geometric_mean(matrix([[1.0, 0.0]]))


# -- median ------------------------------------------------------------------


def test_median_order_statistic():
    assert median_score(matrix([[1.0, 2.0, 100.0]])).per_model["A"] == 2.0
    assert median_score(matrix([[1.0, 3.0]])).per_model["A"] == 2.0
    assert median_score(matrix([[5.0]])).per_model["A"] == 5.0


# -- macro average -----------------------------------------------------------


def test_macro_constant_is_constant():
    m = matrix([[7.0, 7.0, 7.0, 7.0]])
    groups = {"t1": "a", "t2": "b", "t3": "b", "t4": "b"}
    assert macro_average(m, group_map=groups).per_model["A"] == pytest.approx(7.0)


def test_macro_two_level_mean():
    m = matrix([[1.0, 0.0, 0.0]])
    groups = {"t1": "A", "t2": "B", "t3": "B"}
    assert macro_average(m, group_map=groups).per_model["A"] == pytest.approx(0.5)
    assert arithmetic_mean(m).per_model["A"] == pytest.approx(1 / 3)


def test_macro_hand_computed_grouped_fixture():
    # 4 models x 6 tasks, groups G1={t1,t2,t3}, G2={t4,t5}, G3={t6};
    # expected values are the hand-computed mean-of-group-means
    rows = [
        [80, 90, 70, 60, 40, 95],
        [60, 60, 60, 90, 90, 30],
        [100, 40, 70, 50, 70, 80],
        [20, 30, 40, 100, 100, 100],
    ]
    groups = {"t1": "G1", "t2": "G1", "t3": "G1", "t4": "G2", "t5": "G2", "t6": "G3"}
    res = macro_average(matrix(rows, model_ids=("M1", "M2", "M3", "M4")), group_map=groups)
    assert res.per_model["M1"] == pytest.approx(75.0)
    assert res.per_model["M2"] == pytest.approx(60.0)
    assert res.per_model["M3"] == pytest.approx(70.0)
    assert res.per_model["M4"] == pytest.approx(230.0 / 3.0)


def test_macro_weighted_within_group():
    rows = [[80, 90, 70, 60, 40, 95]]
    groups = {"t1": "G1", "t2": "G1", "t3": "G1", "t4": "G2", "t5": "G2", "t6": "G3"}
    res = macro_average(matrix(rows), group_map=groups, weights={"t4": 3.0})
    # G2 weighted mean = (60*3 + 40) / 4 = 55
    assert res.per_model["A"] == pytest.approx((80 + 55 + 95) / 3.0)


def test_macro_requires_total_group_map():
    m = matrix([[1.0, 2.0]])
    with pytest.raises(ConfigError, match="'t2'"):
        macro_average(m, group_map={"t1": "a"})
    # metric metadata can supply the groups instead
    m2 = matrix([[1.0, 2.0]], metrics={"t1": MetricSpec(group="a"), "t2": MetricSpec(group="b")})
    assert macro_average(m2).per_model["A"] == pytest.approx(1.5)


# -- average rank -------------------------------------------------------------


def test_average_rank_single_task():
    m = matrix([[3.0], [1.0], [2.0]])
    res = average_rank(m)
    assert res.per_model == {"A": 1.0, "B": 3.0, "C": 2.0}
    assert not res.higher_is_better


def test_average_rank_tie_convention():
    m = matrix([[5.0], [5.0], [1.0]])
    assert average_rank(m).per_model == {"A": 1.5, "B": 1.5, "C": 3.0}


def test_average_rank_reversed_tasks_symmetric():
    m = matrix([[1.0, 2.0], [2.0, 1.0]])
    assert average_rank(m).per_model == {"A": 1.5, "B": 1.5}


# -- robust average rank -------------------------------------------------------


def test_robust_rank_bins_close_scores_together():
    m = matrix([[90.2], [90.9]])
    assert robust_average_rank(m, bin_width=1.0).per_model == {"A": 1.5, "B": 1.5}


def test_robust_rank_separates_across_bucket_edge():
    m = matrix([[89.9], [90.1]])
    assert robust_average_rank(m, bin_width=1.0).per_model == {"A": 2.0, "B": 1.0}


def test_robust_rank_tiny_bin_equals_average_rank():
    rng = np.random.default_rng(5)
    m = random_matrix(rng, 6, 4)
    gaps = []
    arr = m.to_array()
    for j in range(arr.shape[1]):
        col = sorted(arr[:, j])
        gaps += [b - a for a, b in zip(col, col[1:])]
    width = min(g for g in gaps if g > 0) / 2.0
    assert robust_average_rank(m, bin_width=width).per_model == average_rank(m).per_model


def test_robust_rank_huge_bin_ties_everything():
    rng = np.random.default_rng(6)
    m = random_matrix(rng, 5, 3, low=10.0, high=20.0)
    res = robust_average_rank(m, bin_width=1000.0)
    assert set(res.per_model.values()) == {3.0}


# -- elimination ranking --------------------------------------------------------


def test_elimination_unanimous():
    m = matrix([[2.0, 2.0], [1.0, 1.0]])
    r = elimination_ranking(m)
    assert r.entries == {"A": 1.0, "B": 2.0}


def test_elimination_three_model_hand_run():
    # per-task winners A, A, B: C is voted out first, then B, leaving A
    m = matrix([
        [3.0, 3.0, 1.0],
        [2.0, 2.0, 3.0],
        [1.0, 1.0, 2.0],
    ])
    r = elimination_ranking(m)
    assert r.entries == {"A": 1.0, "B": 2.0, "C": 3.0}


def test_elimination_identical_models_all_tie():
    m = matrix([[1.0, 2.0], [1.0, 2.0], [1.0, 2.0]])
    r = elimination_ranking(m)
    assert set(r.entries.values()) == {2.0}


def test_elimination_single_task_equals_score_order():
    rng = np.random.default_rng(7)
    for _ in range(20):
        scores = rng.permutation(rng.uniform(0, 100, size=6))
        m = matrix([[s] for s in scores])
        elim = elimination_ranking(m)
        by_score = rank_models(arithmetic_mean(m).per_model, higher_is_better=True)
        assert elim.entries == by_score.entries


# -- dispatcher -----------------------------------------------------------------


def test_dispatch_lra_top3():
    m = fixtures.lra_matrix()
    r = aggregate(m, None, AggregationSpec("arithmetic_mean"))
    assert r.order()[:3] == ["BigBird", "Transformer", "Longformer"]


def test_dispatch_single_task_median_equals_mean():
    rng = np.random.default_rng(8)
    m = random_matrix(rng, 5, 3)
    a = aggregate(m, ["t2"], AggregationSpec("arithmetic_mean"))
    b = aggregate(m, ["t2"], AggregationSpec("median"))
    assert a.entries == b.entries


def test_dispatch_tiny_bin_matches_average_rank():
    rng = np.random.default_rng(9)
    m = random_matrix(rng, 5, 3)
    a = aggregate(m, None, AggregationSpec("average_rank"))
    b = aggregate(m, None, AggregationSpec("robust_average_rank", bin_width=1e-9))
    assert a.entries == b.entries


def test_dispatch_auto_orients_lower_better_tasks():
    m = matrix([[1.0], [3.0]], metrics={"t1": MetricSpec(direction=LOWER)})
    r = aggregate(m, None, AggregationSpec("arithmetic_mean"))
    assert r.entries == {"A": 1.0, "B": 2.0}


def test_spec_validation():
    with pytest.raises(ConfigError):
        AggregationSpec(method="bogus")
    with pytest.raises(ConfigError):
        AggregationSpec(bin_width=0.0)
    with pytest.raises(ConfigError):
        AggregationSpec(weights={"t1": -1.0})


# -- cross-method invariants ------------------------------------------------------


ALL_SPECS = [
    AggregationSpec("arithmetic_mean"),
    AggregationSpec("geometric_mean"),
    AggregationSpec("median"),
    AggregationSpec("macro_average", group_map={"t1": "g"}),
    AggregationSpec("average_rank"),
    AggregationSpec("elimination_ranking"),
]


def test_all_methods_agree_on_one_distinct_task():
    rng = np.random.default_rng(10)
    for _ in range(20):
        scores = rng.uniform(1.0, 100.0, size=7)
        while len(set(scores)) < 7:  # pragma: no cover - vanishingly unlikely
            scores = rng.uniform(1.0, 100.0, size=7)
        m = matrix([[s] for s in scores])
        gap = min(abs(a - b) for i, a in enumerate(scores) for b in scores[i + 1:])
        specs = ALL_SPECS + [AggregationSpec("robust_average_rank", bin_width=gap / 2.0)]
        rankings = [aggregate(m, ["t1"], spec).entries for spec in specs]
        assert all(r == rankings[0] for r in rankings)


def test_permutation_invariance_of_model_rows():
    rng = np.random.default_rng(11)
    base = rng.uniform(1.0, 100.0, size=(6, 4))
    perm = rng.permutation(6)
    m1 = matrix(base.tolist())
    m2 = ScoreMatrix(
        tuple(m1.model_ids[i] for i in perm),
        m1.task_ids,
        tuple(m1.scores[i] for i in perm),
        m1.metrics,
    )
    for spec in [AggregationSpec("arithmetic_mean"), AggregationSpec("median"),
                 AggregationSpec("average_rank"), AggregationSpec("elimination_ranking")]:
        assert aggregate(m1, None, spec).entries == aggregate(m2, None, spec).entries


def test_permutation_invariance_of_task_columns():
    rng = np.random.default_rng(15)
    base = rng.uniform(1.0, 100.0, size=(6, 4))
    perm = rng.permutation(4)
    m1 = matrix(base.tolist())
    m2 = ScoreMatrix(
        m1.model_ids,
        tuple(m1.task_ids[j] for j in perm),
        tuple(tuple(row[j] for j in perm) for row in m1.scores),
        m1.metrics,
    )
    for spec in [AggregationSpec("arithmetic_mean"), AggregationSpec("geometric_mean"),
                 AggregationSpec("average_rank"), AggregationSpec("elimination_ranking")]:
        assert aggregate(m1, None, spec).entries == aggregate(m2, None, spec).entries


MONOTONE_TRANSFORMS = [
    lambda x: x,
    lambda x: 2.0 * x + 5.0,
    lambda x: x**3,
    lambda x: math.exp(x / 50.0),
    lambda x: math.log1p(x - 0.5),
]


def test_monotone_transform_invariance_rank_based():
    rng = np.random.default_rng(12)
    for trial in range(50):
        m = random_matrix(rng, 6, 4, low=1.0, high=100.0)
        transforms = [MONOTONE_TRANSFORMS[rng.integers(len(MONOTONE_TRANSFORMS))]
                      for _ in m.task_ids]
        twisted = matrix(
            [[transforms[j](cell) for j, cell in enumerate(row)] for row in m.scores]
        )
        for spec in [AggregationSpec("average_rank"), AggregationSpec("elimination_ranking")]:
            assert aggregate(m, None, spec).entries == aggregate(twisted, None, spec).entries


def test_geometric_mean_scale_invariance():
    rng = np.random.default_rng(13)
    for trial in range(50):
        m = random_matrix(rng, 6, 4, low=0.5, high=100.0)
        scales = rng.uniform(0.1, 10.0, size=4)
        scaled = matrix(
            [[cell * scales[j] for j, cell in enumerate(row)] for row in m.scores]
        )
        spec = AggregationSpec("geometric_mean")
        assert aggregate(m, None, spec).entries == aggregate(scaled, None, spec).entries


def test_arithmetic_mean_common_affine_invariance():
    rng = np.random.default_rng(14)
    for trial in range(50):
        m = random_matrix(rng, 6, 4)
        a, b = rng.uniform(0.1, 5.0), rng.uniform(-50.0, 50.0)
        mapped = matrix([[a * cell + b for cell in row] for row in m.scores])
        spec = AggregationSpec("arithmetic_mean")
        assert aggregate(m, None, spec).entries == aggregate(mapped, None, spec).entries
