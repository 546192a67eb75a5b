import itertools
import math

import numpy as np
import pytest

from keyopt.metrics import (
    UndefinedBaselineError,
    performance_profile,
    rpd,
    wilcoxon_one_sided,
)


def test_rpd_values():
    assert rpd(100.0, 100.0) == 0.0
    assert rpd(103.0, 100.0) == pytest.approx(3.0)
    assert rpd(84300.39, 84296.53) == pytest.approx(0.00458, abs=1e-4)


def test_rpd_rejects_nonpositive_baseline():
    with pytest.raises(UndefinedBaselineError):
        rpd(10.0, 0.0)
    with pytest.raises(UndefinedBaselineError):
        rpd(10.0, -5.0)


def hand_case():
    """Four instances, three methods, hand-set times; method C fails the
    tolerance on i3."""
    times = {
        ("i1", "A"): 1.0, ("i1", "B"): 2.0, ("i1", "C"): 4.0,
        ("i2", "A"): 2.0, ("i2", "B"): 1.0, ("i2", "C"): 8.0,
        ("i3", "A"): 1.0, ("i3", "B"): 1.0, ("i3", "C"): 1.0,
        ("i4", "A"): 3.0, ("i4", "B"): 6.0, ("i4", "C"): 6.0,
    }
    rpd_best = {key: 0.0 for key in times}
    rpd_best[("i3", "C")] = 5.0  # over the 1% tolerance -> time becomes inf
    return times, rpd_best


def test_profile_matches_hand_computation():
    times, rpd_best = hand_case()
    profile = performance_profile(times, rpd_best, tolerance=1.0)
    # Hand-derived ratios: A -> 1,2,1,1; B -> 2,1,1,2; C -> 4,8,inf,2.
    assert profile.value("A", 1.0) == pytest.approx(3 / 4)
    assert profile.value("B", 1.0) == pytest.approx(2 / 4)
    assert profile.value("C", 1.0) == pytest.approx(0.0)
    assert profile.value("A", 2.0) == pytest.approx(1.0)
    assert profile.value("B", 2.0) == pytest.approx(1.0)
    assert profile.value("C", 2.0) == pytest.approx(1 / 4)
    assert profile.value("C", 4.0) == pytest.approx(2 / 4)
    assert profile.value("C", 8.0) == pytest.approx(3 / 4)
    assert profile.value("C", 100.0) == pytest.approx(3 / 4)  # i3 never arrives


def test_profile_single_fast_method_and_failed_method():
    times = {("i1", "A"): 1.0, ("i1", "B"): 5.0}
    rpd_best = {("i1", "A"): 0.0, ("i1", "B"): 0.0}
    profile = performance_profile(times, rpd_best, tolerance=1.0)
    assert profile.value("A", 1.0) == 1.0
    assert profile.value("B", 1.0) == 0.0

    # All-failing method: rho stays identically zero.
    rpd_best[("i1", "B")] = 99.0
    profile = performance_profile(times, rpd_best, tolerance=1.0)
    assert all(v == 0.0 for v in profile.rho["B"])


def test_profile_monotonicity_on_fuzzed_inputs():
    rng = np.random.default_rng(1)
    for _ in range(50):
        n_inst = int(rng.integers(2, 7))
        n_meth = int(rng.integers(2, 5))
        times, rpd_best = {}, {}
        for i in range(n_inst):
            for m in range(n_meth):
                key = (f"i{i}", f"m{m}")
                times[key] = float(rng.uniform(0.1, 10.0))
                rpd_best[key] = float(rng.choice([0.0, 0.5, 3.0]))
        profile = performance_profile(times, rpd_best, tolerance=1.0)
        for method in profile.methods:
            values = profile.rho[method]
            assert all(b >= a for a, b in zip(values, values[1:]))
            assert values[-1] <= 1.0
        # When every instance has a within-tolerance method, some method is
        # fastest on each instance, so the rho values at tau=1 sum to >= 1.
        every_instance_served = all(
            any(math.isfinite(profile.ratios[(inst, m)]) for m in profile.methods)
            for inst in profile.instances
        )
        if every_instance_served:
            at_one = sum(profile.value(m, 1.0) for m in profile.methods)
            assert at_one >= 1.0 - 1e-12


def test_profile_rows_are_log2_scaled():
    times, rpd_best = hand_case()
    profile = performance_profile(times, rpd_best, tolerance=1.0)
    rows = list(profile.rows())
    for method, log_tau, value in rows:
        assert profile.value(method, 2.0**log_tau) == pytest.approx(value)


def oracle_wilcoxon(x, y):
    """Independent enumeration oracle: signed-rank lower-tail p-value over
    all sign patterns of the observed absolute-difference ranks."""
    diffs = [a - b for a, b in zip(x, y) if a != b]
    n = len(diffs)
    sorted_abs = sorted((abs(d), i) for i, d in enumerate(diffs))
    ranks = [0.0] * n
    i = 0
    while i < n:
        j = i
        while j + 1 < n and sorted_abs[j + 1][0] == sorted_abs[i][0]:
            j += 1
        for k in range(i, j + 1):
            ranks[sorted_abs[k][1]] = (i + j) / 2 + 1
        i = j + 1
    w_obs = sum(r for d, r in zip(diffs, ranks) if d > 0)
    hits = 0
    for pattern in itertools.product((False, True), repeat=n):
        w = sum(r for keep, r in zip(pattern, ranks) if keep)
        if w <= w_obs + 1e-9:
            hits += 1
    return hits / 2**n


def test_wilcoxon_uniform_sign_minimum():
    x = [1.0 * i for i in range(10)]
    y = [v + 1.0 + 0.1 * i for i, v in enumerate(x)]  # x < y in every pair
    res = wilcoxon_one_sided(x, y)
    assert res.exact
    assert res.p_value == pytest.approx(1.0 / 1024.0)


def test_wilcoxon_equal_samples_degenerate():
    x = [1.0, 2.0, 3.0, 4.0, 5.0]
    res = wilcoxon_one_sided(x, list(x))
    assert res.degenerate
    assert res.p_value == 1.0


def test_wilcoxon_exact_matches_enumeration_oracle():
    rng = np.random.default_rng(2)
    for _ in range(30):
        n = int(rng.integers(5, 9))
        x = [float(rng.integers(0, 20)) for _ in range(n)]
        y = [float(rng.integers(0, 20)) for _ in range(n)]
        if all(a == b for a, b in zip(x, y)):
            continue
        res = wilcoxon_one_sided(x, y)
        assert res.exact
        assert res.p_value == pytest.approx(oracle_wilcoxon(x, y))


def test_wilcoxon_textbook_eight_pair_sample():
    x = [78.0, 24.0, 64.0, 45.0, 64.0, 52.0, 30.0, 50.0]
    y = [78.0, 24.0, 62.0, 48.0, 68.0, 56.0, 25.0, 44.0]
    res = wilcoxon_one_sided(x, y)
    assert res.exact
    assert res.p_value == pytest.approx(oracle_wilcoxon(x, y))


def test_wilcoxon_complement_relation_on_tie_free_data():
    rng = np.random.default_rng(3)
    for _ in range(20):
        n = int(rng.integers(5, 11))
        x = list(rng.permutation(100)[:n].astype(float))
        y = [v + float(rng.uniform(0.1, 5.0)) * (1 if rng.random() < 0.5 else -1)
             for v in x]
        p_xy = wilcoxon_one_sided(x, y)
        p_yx = wilcoxon_one_sided(y, x)
        # P(W <= w) + P(W <= total - w) = 1 + P(W = w) for the symmetric null
        ranks = list(range(1, n + 1))
        total = sum(ranks)
        point_mass = 0
        for pattern in itertools.product((False, True), repeat=n):
            w = sum(r for keep, r in zip(pattern, ranks) if keep)
            if abs(w - p_xy.statistic) < 1e-9:
                point_mass += 1
        assert p_xy.p_value + p_yx.p_value == pytest.approx(
            1.0 + point_mass / 2**n
        )
        assert 0.0 < p_xy.p_value <= 1.0


def test_wilcoxon_normal_approximation_for_large_samples():
    rng = np.random.default_rng(4)
    x = list(rng.normal(0.0, 1.0, size=30))
    y = [v + 1.0 for v in x]
    res = wilcoxon_one_sided(x, y)
    assert not res.exact
    assert res.p_value < 0.001  # x is clearly smaller
    rev = wilcoxon_one_sided(y, x)
    assert rev.p_value > 0.999


def test_wilcoxon_rejects_short_or_mismatched_samples():
    with pytest.raises(ValueError):
        wilcoxon_one_sided([1.0, 2.0], [2.0, 3.0])
    with pytest.raises(ValueError):
        wilcoxon_one_sided([1.0] * 6, [2.0] * 5)
