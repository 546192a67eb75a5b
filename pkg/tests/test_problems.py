import math

import numpy as np
import pytest

import instgen
from keyopt.core import ParseError, RngStream, SizeGuardError, random_vector
from keyopt.problems import (
    HubTreeDecoder,
    HubTreeInstance,
    PartitionDecoder,
    PartitionInstance,
    PMedianDecoder,
    SetCoverDecoder,
    SetCoverInstance,
    TspDecoder,
    assignment_cost,
    brute_force,
    brute_force_hubtree,
    brute_force_partition,
    brute_force_pmedian,
    brute_force_setcover,
    brute_force_tsp,
    load_instance,
    parse_hubtree,
    parse_orlib_pmed,
    parse_partition,
    parse_setcover,
    plain_routing_cost,
    write_hubtree,
    write_orlib_pmed,
    write_partition,
    write_setcover,
    write_tsp,
)


def fig7_partition_instance() -> PartitionInstance:
    """Six stations, two controllers; handovers laid out so the greedy
    assignment walks exactly as in the worked decoder example."""
    h = np.zeros((6, 6))
    h[3][4] = 191.0
    h[1][4] = 116.0
    h[3][5] = 157.0
    h[4][5] = 150.0
    h[1][5] = 13.0
    h[1][2] = 55.0
    h[0][1] = 30.0
    h[0][2] = 20.0
    return PartitionInstance(traffic=np.ones(6), capacity=[10.0, 10.0], handovers=h)


# ---------------------------------------------------------------- tsp


def test_tsp_example_vector_decodes_to_known_tour():
    inst = instgen.tiny_tsp(np.random.default_rng(0), n=5)
    decoder = TspDecoder(inst)
    keys = np.array([0.085, 0.277, 0.149, 0.332, 0.148])
    _, tour = decoder.decode(keys)
    assert [i + 1 for i in tour] == [1, 5, 3, 2, 4]


def test_tsp_sorted_keys_give_identity_tour():
    inst = instgen.tiny_tsp(np.random.default_rng(1), n=6)
    decoder = TspDecoder(inst)
    _, tour = decoder.decode(np.linspace(0.05, 0.9, 6))
    assert list(tour) == list(range(6))


def test_tsp_cost_matches_independent_recomputation():
    inst = instgen.tiny_tsp(np.random.default_rng(2), n=4)
    decoder = TspDecoder(inst)
    rng = RngStream(3, 0)
    for _ in range(100):
        keys = random_vector(4, rng)
        fit, tour = decoder.decode(keys)
        walked = 0.0
        for a, b in zip(tour, tour[1:] + tour[:1]):
            walked += inst.dist[a, b]
        assert fit.objective == pytest.approx(walked)


def test_tsp_brute_force_dominates_decodes():
    inst = instgen.tiny_tsp(np.random.default_rng(4), n=4)
    decoder = TspDecoder(inst)
    optimum, _ = brute_force_tsp(inst)
    rng = RngStream(5, 0)
    for _ in range(1000):
        fit, _ = decoder.decode(random_vector(4, rng))
        assert fit.objective >= optimum - 1e-9


def test_tsp_roundtrip(tmp_path):
    inst = instgen.tiny_tsp(np.random.default_rng(6), n=5)
    path = tmp_path / "tour.txt"
    write_tsp(inst, path)
    again = load_instance("tsp", path)
    assert np.array_equal(again.dist, inst.dist)


def test_tsp_size_guard():
    inst = instgen.tiny_tsp(np.random.default_rng(7), n=15)
    with pytest.raises(SizeGuardError):
        brute_force_tsp(inst)


# ---------------------------------------------------------------- set cover


def test_setcover_identity_matrix_keeps_all_columns():
    inst = SetCoverInstance(np.eye(5, dtype=int))
    decoder = SetCoverDecoder(inst)
    fit, cover = decoder.decode(np.full(5, 0.9))
    assert fit.objective == 5.0
    assert cover == (0, 1, 2, 3, 4)


def test_setcover_all_low_keys_uses_pure_greedy():
    inst = instgen.tiny_setcover(np.random.default_rng(8), m=6, n=9)
    decoder = SetCoverDecoder(inst)
    fit, cover = decoder.decode(np.full(9, 0.1))
    assert fit.feasible
    assert fit.objective <= 9.0
    covered = inst.a[:, list(cover)].any(axis=1)
    assert covered.all()


def test_setcover_greedy_upper_bounds_brute_force():
    rng = np.random.default_rng(9)
    key_rng = RngStream(10, 0)
    for _ in range(10):
        inst = instgen.tiny_setcover(rng, m=8, n=12)
        decoder = SetCoverDecoder(inst)
        optimum, cover = brute_force_setcover(inst)
        assert inst.a[:, list(cover)].any(axis=1).all()
        for _ in range(50):
            fit, _ = decoder.decode(random_vector(12, key_rng))
            assert fit.objective >= optimum - 1e-9


def test_setcover_minimal_cover_is_reachable():
    inst = instgen.tiny_setcover(np.random.default_rng(11), m=8, n=12)
    decoder = SetCoverDecoder(inst)
    optimum, cover = brute_force_setcover(inst)
    keys = np.full(12, 0.1)
    keys[list(cover)] = 0.9
    fit, decoded = decoder.decode(keys)
    assert fit.objective == optimum


def test_setcover_uncoverable_penalty():
    matrix = np.array([[1, 0], [0, 0]])  # second row uncoverable
    inst = SetCoverInstance(matrix)
    assert not inst.coverable
    decoder = SetCoverDecoder(inst)
    fit, _ = decoder.decode(np.array([0.9, 0.9]))
    assert not fit.feasible
    assert fit.penalty == 1 * 2  # one uncovered row times n columns


def test_setcover_superfluous_removal_scans_ascending():
    # Removal always drops the smallest removable index: here column 0 is
    # itself redundant (columns 1 and 2 still cover every row), so it goes
    # first even though keeping it would have allowed a smaller cover.
    matrix = np.array([[1, 1, 0], [1, 0, 1], [1, 1, 1]])
    decoder = SetCoverDecoder(SetCoverInstance(matrix))
    fit, cover = decoder.decode(np.array([0.9, 0.9, 0.9]))
    assert cover == (1, 2)
    assert fit.objective == 2.0

    # With a row only column 0 covers, the redundant tail columns go instead.
    matrix = np.array([[1, 0, 0], [1, 1, 0], [1, 0, 1]])
    decoder = SetCoverDecoder(SetCoverInstance(matrix))
    fit, cover = decoder.decode(np.array([0.9, 0.9, 0.9]))
    assert cover == (0,)
    assert fit.objective == 1.0


def test_setcover_roundtrip(tmp_path):
    inst = instgen.tiny_setcover(np.random.default_rng(12), m=5, n=7)
    path = tmp_path / "cover.txt"
    write_setcover(inst, path)
    again = parse_setcover(path)
    assert np.array_equal(again.a, inst.a)


# ---------------------------------------------------------------- p-median


def test_pmedian_example_keys_open_expected_facilities():
    inst = instgen.tiny_pmedian(np.random.default_rng(13), n=10, p=3, alpha=1)
    decoder = PMedianDecoder(inst)
    _, opened = decoder.decode(np.array([0.45, 0.74, 0.12]))
    assert [v + 1 for v in opened] == [5, 8, 1]


def test_pmedian_zero_keys_open_first_facilities():
    inst = instgen.tiny_pmedian(np.random.default_rng(14), n=10, p=3, alpha=1)
    decoder = PMedianDecoder(inst)
    _, opened = decoder.decode(np.zeros(3))
    assert list(opened) == [0, 1, 2]


def test_pmedian_objective_matches_plain_recomputation():
    inst = instgen.tiny_pmedian(np.random.default_rng(15), n=9, p=3, alpha=2)
    decoder = PMedianDecoder(inst)
    rng = RngStream(16, 0)
    for _ in range(200):
        fit, opened = decoder.decode(random_vector(3, rng))
        expected = 0.0
        for v in range(9):
            nearest = sorted(inst.dist[v][j] for j in opened)
            expected += nearest[0] + nearest[1]
        assert fit.objective == pytest.approx(expected)


def test_pmedian_alpha_monotonicity():
    inst = instgen.tiny_pmedian(np.random.default_rng(17), n=8, p=3, alpha=1)
    rng = RngStream(18, 0)
    for _ in range(100):
        keys = random_vector(3, rng)
        opened = PMedianDecoder(inst).decode(keys)[1]
        one = assignment_cost(inst.dist, opened, alpha=1)
        two = assignment_cost(inst.dist, opened, alpha=2)
        assert one <= two + 1e-12


def test_pmedian_brute_force_degenerate_all_facilities():
    inst = instgen.tiny_pmedian(np.random.default_rng(19), n=5, p=5, alpha=1)
    optimum, _ = brute_force_pmedian(inst)
    assert optimum == 0.0


def test_pmedian_brute_force_dominates_decodes():
    inst = instgen.tiny_pmedian(np.random.default_rng(20), n=9, p=3, alpha=2)
    decoder = PMedianDecoder(inst)
    optimum, _ = brute_force_pmedian(inst)
    rng = RngStream(21, 0)
    for _ in range(500):
        fit, _ = decoder.decode(random_vector(3, rng))
        assert fit.objective >= optimum - 1e-9


def test_parse_pmed_triangle(tmp_path):
    path = tmp_path / "triangle.pmed"
    path.write_text("3 3 1\n1 2 1\n2 3 1\n1 3 1\n")
    inst = parse_orlib_pmed(path)
    expected = np.ones((3, 3)) - np.eye(3)
    assert np.array_equal(inst.dist, expected)
    assert inst.connected


def test_parse_pmed_path_graph_shortest_paths(tmp_path):
    path = tmp_path / "path.pmed"
    path.write_text("3 2 1\n1 2 1\n2 3 2\n")
    inst = parse_orlib_pmed(path)
    assert inst.dist[0, 2] == 3.0
    assert inst.dist[2, 0] == 3.0


def test_parse_pmed_symmetry_and_diagonal(tmp_path):
    rng = np.random.default_rng(22)
    for trial in range(5):
        edges = instgen.connected_graph_edges(rng, 8)
        path = tmp_path / f"rand{trial}.pmed"
        write_orlib_pmed(8, edges, 3, path)
        inst = parse_orlib_pmed(path, alpha=2)
        assert np.array_equal(inst.dist, inst.dist.T)
        assert np.all(np.diag(inst.dist) == 0)
        assert inst.p == 3 and inst.alpha == 2


def test_parse_pmed_disconnected_flagged(tmp_path):
    path = tmp_path / "disc.pmed"
    path.write_text("4 2 1\n1 2 1\n3 4 1\n")
    inst = parse_orlib_pmed(path)
    assert not inst.connected
    assert inst.dist[0, 2] == pytest.approx(1e9)


def test_parse_pmed_errors_carry_line_numbers(tmp_path):
    bad_header = tmp_path / "bad1.pmed"
    bad_header.write_text("3 1\n1 2 1\n")
    with pytest.raises(ParseError, match="line 1"):
        parse_orlib_pmed(bad_header)
    bad_edge = tmp_path / "bad2.pmed"
    bad_edge.write_text("3 2 1\n1 2 1\n1 x 1\n")
    with pytest.raises(ParseError, match="line 3"):
        parse_orlib_pmed(bad_edge)


# ---------------------------------------------------------------- partition


def test_partition_worked_example():
    decoder = PartitionDecoder(fig7_partition_instance())
    keys = np.array([0.95, 0.10, 0.55, 0.20, 0.30, 0.70, 0.7])
    fit, assignment = decoder.decode(keys)
    groups = {0: [], 1: []}
    for station, ctrl in enumerate(assignment):
        groups[ctrl].append(station + 1)
    assert sorted(groups[0]) == [1, 2, 3]
    assert sorted(groups[1]) == [4, 5, 6]
    assert fit.objective == 129.0  # the two cross-partition entries


def test_partition_single_controller_zero_cut():
    rng = np.random.default_rng(23)
    inst = instgen.tiny_partition(rng, b=6, r=1, slack=(3.0, 4.0))
    decoder = PartitionDecoder(inst)
    fit, assignment = decoder.decode(random_vector(7, RngStream(24, 0)))
    assert fit.objective == 0.0
    assert set(assignment) == {0}


def test_partition_cut_matches_independent_recomputation():
    rng = np.random.default_rng(25)
    inst = instgen.tiny_partition(rng, b=8, r=3)
    decoder = PartitionDecoder(inst)
    key_rng = RngStream(26, 0)
    for _ in range(200):
        fit, assignment = decoder.decode(random_vector(9, key_rng))
        if not fit.feasible:
            continue
        expected = 0.0
        for i in range(8):
            for j in range(8):
                if i != j and assignment[i] != assignment[j]:
                    expected += inst.handovers[i, j]
        assert fit.objective == pytest.approx(expected)


def test_partition_penalty_dominates_any_cut():
    inst = fig7_partition_instance()
    assert inst.penalty_unit == inst.handovers.sum()


def test_partition_parse_fig7_file(tmp_path):
    inst = fig7_partition_instance()
    path = tmp_path / "fig7.txt"
    write_partition(inst, path)
    again = parse_partition(path)
    assert again.handovers[3][4] == 191.0  # 1-based stations 4 and 5
    assert np.array_equal(again.traffic, inst.traffic)
    assert np.array_equal(again.capacity, inst.capacity)
    assert np.array_equal(again.handovers, inst.handovers)


def test_partition_parse_validation(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("2 1\n1 -2\n5\n0 1\n1 0\n")
    with pytest.raises(ParseError):
        parse_partition(bad)
    nonzero_diag = tmp_path / "diag.txt"
    nonzero_diag.write_text("2 1\n1 1\n5\n3 1\n1 0\n")
    with pytest.raises(ParseError):
        parse_partition(nonzero_diag)


def test_partition_brute_force_single_controller_is_zero():
    inst = instgen.tiny_partition(np.random.default_rng(27), b=5, r=1, slack=(3.0, 4.0))
    optimum, assignment = brute_force_partition(inst)
    assert optimum == 0.0
    assert set(assignment) == {0}


def test_partition_brute_force_dominates_decodes():
    inst = instgen.tiny_partition(np.random.default_rng(28), b=7, r=2)
    decoder = PartitionDecoder(inst)
    optimum, _ = brute_force_partition(inst)
    rng = RngStream(29, 0)
    for _ in range(300):
        fit, _ = decoder.decode(random_vector(8, rng))
        assert fit.objective >= optimum - 1e-9


# ---------------------------------------------------------------- hub tree


def test_hubtree_all_hubs_zero_discount_costs_nothing():
    rng = np.random.default_rng(30)
    cost = instgen.metric_distances(rng, 4)
    demand = rng.integers(1, 10, size=(4, 4)).astype(float)
    np.fill_diagonal(demand, 0.0)
    inst = HubTreeInstance(cost=cost, demand=demand, hubs=4, discount=0.0)
    decoder = HubTreeDecoder(inst)
    fit, (hubs, hub_of, tree) = decoder.decode(random_vector(inst.dimension, RngStream(31, 0)))
    assert fit.objective == 0.0
    assert sorted(hubs) == [0, 1, 2, 3]
    assert len(tree) == 3


def test_hubtree_ascending_arc_keys_build_lexicographic_kruskal():
    rng = np.random.default_rng(32)
    inst = instgen.tiny_hubtree(rng, n=6, p=3)
    decoder = HubTreeDecoder(inst)
    keys = random_vector(inst.dimension, RngStream(33, 0))
    keys[6 + 3 :] = np.linspace(0.1, 0.9, 3)  # arcs (0,1), (0,2), (1,2)
    _, (hubs, _, tree) = decoder.decode(keys)
    assert tree == ((hubs[0], hubs[1]), (hubs[0], hubs[2]))


def test_hubtree_cost_matches_plain_recomputation():
    rng = np.random.default_rng(34)
    inst = instgen.tiny_hubtree(rng, n=6, p=3)
    decoder = HubTreeDecoder(inst)
    key_rng = RngStream(35, 0)
    for _ in range(200):
        fit, (hubs, hub_of, tree) = decoder.decode(random_vector(inst.dimension, key_rng))
        pos = {node: i for i, node in enumerate(hubs)}
        plain_tree = tuple((pos[a], pos[b]) for a, b in tree)
        expected = plain_routing_cost(inst, list(hubs), list(hub_of), plain_tree)
        assert fit.objective == pytest.approx(expected)


def test_hubtree_tree_always_spans_hubs():
    rng = np.random.default_rng(36)
    inst = instgen.tiny_hubtree(rng, n=7, p=3)
    decoder = HubTreeDecoder(inst)
    key_rng = RngStream(37, 0)
    for _ in range(300):
        _, (hubs, hub_of, tree) = decoder.decode(random_vector(inst.dimension, key_rng))
        assert len(tree) == 2
        touched = {v for edge in tree for v in edge}
        assert touched <= set(hubs)
        adj = {h: set() for h in hubs}
        for a, b in tree:
            adj[a].add(b)
            adj[b].add(a)
        seen = {hubs[0]}
        stack = [hubs[0]]
        while stack:
            for nxt in adj[stack.pop()]:
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        assert seen == set(hubs)
        assert all(hub_of[h] == h for h in hubs)


def test_hubtree_brute_force_dominates_decodes():
    inst = instgen.tiny_hubtree(np.random.default_rng(38), n=5, p=3)
    decoder = HubTreeDecoder(inst)
    optimum, _ = brute_force_hubtree(inst)
    rng = RngStream(39, 0)
    for _ in range(300):
        fit, _ = decoder.decode(random_vector(inst.dimension, rng))
        assert fit.objective >= optimum - 1e-6 * max(1.0, optimum)


def test_hubtree_roundtrip(tmp_path):
    inst = instgen.tiny_hubtree(np.random.default_rng(40), n=5, p=3, discount=0.35)
    path = tmp_path / "hub.txt"
    write_hubtree(inst, path)
    again = parse_hubtree(path)
    assert np.array_equal(again.cost, inst.cost)
    assert np.array_equal(again.demand, inst.demand)
    assert again.hubs == inst.hubs
    assert again.discount == inst.discount


def test_hubtree_single_node_rejected(tmp_path):
    path = tmp_path / "one.txt"
    path.write_text("1 1 0.5\n0\n0\n")
    with pytest.raises(ParseError):
        parse_hubtree(path)


# ---------------------------------------------------------------- totality


def test_decoder_totality_fuzz(tiny_decoders):
    rng = RngStream(41, 0)
    for decoder in tiny_decoders.values():
        for _ in range(2000):
            fit, _ = decoder.decode(random_vector(decoder.dimension, rng))
            assert math.isfinite(fit.objective)


def test_brute_force_dispatch(tiny_decoders):
    inst = instgen.tiny_pmedian(np.random.default_rng(42), n=6, p=2)
    direct = brute_force_pmedian(inst)
    routed = brute_force("pmedian", inst)
    assert routed == direct
