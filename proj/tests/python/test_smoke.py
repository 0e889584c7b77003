"""End-to-end smoke tests for the fairexpo python module."""

import math

import pytest

import fairexpo


def test_preference_score():
    assert fairexpo.preference_score(3, 1, 8) == pytest.approx(0.25)
    assert fairexpo.preference_score(0, 4, 4) == pytest.approx(-1.0)
    with pytest.raises(Exception):
        fairexpo.preference_score(1, 0, 0)


def test_kl_divergence_identity_and_separation():
    likes = {("User", "farming"): (1.0, True), ("Studio", "health"): (0.0, False)}
    dislikes = {("User", "farming"): (-1.0, True), ("Studio", "health"): (0.0, False)}
    assert fairexpo.kl_divergence(likes, likes) == pytest.approx(0.0, abs=1e-12)
    assert fairexpo.kl_divergence(likes, dislikes) > 0.1


def test_kl_divergence_rejects_unknown_source():
    with pytest.raises(Exception):
        fairexpo.kl_divergence({("Nobody", "t"): (0.0, True)}, {})


def test_k_prototypes_recovers_two_groups():
    group_a = {("User", "farming"): (1.0, True), ("User", "health"): (-1.0, True)}
    group_b = {("User", "farming"): (-1.0, True), ("User", "health"): (1.0, True)}
    vectors = [group_a] * 4 + [group_b] * 4
    result = fairexpo.k_prototypes(vectors, k=2, seed=7)
    assignment = result["assignment"]
    assert len(assignment) == 8
    assert len(set(assignment[:4])) == 1
    assert len(set(assignment[4:])) == 1
    assert assignment[0] != assignment[4]
    assert len(result["centroids"]) == 2
    assert result["gamma"] > 0


def test_aspect_shares_rules():
    beta = {"a": 0.7, "b": 0.28, "c": 0.02}
    equal = fairexpo.aspect_shares("equal", beta)
    assert all(share == pytest.approx(1 / 3) for share in equal.values())
    floored = fairexpo.aspect_shares("min_guarantee", beta, min_share=0.05)
    assert floored["c"] == pytest.approx(0.05)
    assert sum(floored.values()) == pytest.approx(1.0)
    assert fairexpo.aspect_shares("user_pref", beta) == pytest.approx(beta)


def test_item_targets_and_inventory():
    inventory = fairexpo.total_inventory(
        users_per_hour=[10.0] * 24,
        rank_reach_prob=[1.0, 0.5],
        horizon_hours=10,
        list_length=2,
    )
    assert inventory == pytest.approx(10 * 10 * 1.5)
    targets = fairexpo.item_targets(
        shares={"a": 0.5, "b": 0.5},
        items_by_aspect={"a": ["x", "y"], "b": ["z"]},
        item_rule="equal",
        inventory=inventory,
    )
    assert targets["x"] == pytest.approx(inventory * 0.25)
    assert targets["z"] == pytest.approx(inventory * 0.5)
    rated = fairexpo.item_targets(
        shares={"a": 1.0},
        items_by_aspect={"a": ["x", "y"]},
        item_rule="rating",
        inventory=100.0,
        ratings={"x": 5, "y": 3},
    )
    assert rated["x"] == pytest.approx(62.5)
    assert rated["y"] == pytest.approx(37.5)


def test_rank_list_respects_prefix_bounds():
    pool = [
        ("a1", ["a"], 10.0, 10.0),
        ("a2", ["a"], 9.0, 9.0),
        ("b1", ["b"], 8.0, 8.0),
        ("b2", ["b"], 7.0, 7.0),
    ]
    ranked = fairexpo.rank_list(pool, shares={"a": 0.5, "b": 0.5}, n=4)
    assert ranked["positions"] == ["a1", "b1", "a2", "b2"]
    assert ranked["fallback_positions"] == []


def test_rank_list_fallback():
    pool = [("a1", ["a"], 2.0, 2.0), ("a2", ["a"], 1.0, 1.0)]
    ranked = fairexpo.rank_list(pool, shares={"a": 0.5, "b": 0.5}, n=2)
    assert ranked["positions"] == ["a1", "a2"]
    assert ranked["fallback_positions"] == [2]


def test_metrics():
    assert fairexpo.gini([1.0, 0.0, 0.0, 0.0]) == 0.75
    assert fairexpo.gini([5.0, 5.0, 5.0]) == pytest.approx(0.0)

    points = fairexpo.lorenz_points([1.0, 2.0, 3.0])
    assert points[0] == (0.0, 0.0)
    assert points[-1] == (1.0, 1.0)
    assert all(y <= x + 1e-12 for x, y in points)

    uniform = fairexpo.hhi([["g%d" % (i % 5)] for i in range(10)])
    assert uniform == 0.2
    assert fairexpo.hhi([["solo"], ["solo"]]) == pytest.approx(1.0)

    deviation = fairexpo.normalized_rmse({"x": 4, "y": 0}, {"x": 2, "y": 2})
    assert deviation == pytest.approx(math.sqrt(4.0) / 2.0)
    assert fairexpo.normalized_rmse({"x": 2, "y": 2}, {"x": 2, "y": 2}) == pytest.approx(0.0)
