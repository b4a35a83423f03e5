import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from paramctl.oracles import kruskal_reference
from paramctl.problems import (GraphInstance, Jump, LeadingOnes, LOInstance, MinimumSpanningTree,
                               Negated, OneMax, Plateau, RValuedOneMax, epsilon_separated_weights,
                               eval_jump, eval_leadingones, eval_linear, eval_mst, eval_onemax,
                               eval_plateau, eval_rvalued_onemax, format_graph, gen_connected_triangles,
                               gen_random_linear_weights, gen_random_lo_instance, parse_graph,
                               read_graph, write_graph)
from paramctl.rng import RandomSource

B = lambda s: np.array([int(c) for c in s], np.uint8)   # noqa: E731


def test_onemax_hand_cases():
    assert eval_onemax(B("1111"), B("1111")) == 4
    assert eval_onemax(B("0101"), B("1111")) == 2
    assert eval_onemax(B("0101")) == 2


def test_onemax_vs_popcount():
    g = np.random.default_rng(0)
    for _ in range(10 ** 4):
        x, z = g.integers(0, 2, 10), g.integers(0, 2, 10)
        assert eval_onemax(x, z) == sum(int(a == b) for a, b in zip(x, z))


def test_leadingones_hand_cases():
    inst = LOInstance.standard(4)
    assert eval_leadingones(B("1111"), inst) == 4
    assert eval_leadingones(B("1011"), inst) == 1
    z = B("0110")
    assert eval_leadingones(z, LOInstance(z, [3, 1, 0, 2])) == 4


def test_leadingones_vs_naive_loop():
    rng = RandomSource(1)
    for _ in range(10 ** 4):
        inst = gen_random_lo_instance(12, rng)
        x = rng.bits(12)
        naive = 0
        while naive < 12 and x[inst.sigma[naive]] == inst.z[inst.sigma[naive]]:
            naive += 1
        assert eval_leadingones(x, inst) == naive


def test_lo_instance_rejects_non_permutation():
    with pytest.raises(ValueError):
        LOInstance(B("01"), [0, 0])


def test_random_lo_instance_uniform_first_index():
    rng = RandomSource(2)
    assert gen_random_lo_instance(1, rng).sigma.tolist() == [0]
    draws = 10 ** 4
    counts = np.bincount([gen_random_lo_instance(10, rng).sigma[0] for _ in range(draws)], minlength=10)
    sd = math.sqrt(draws * 0.1 * 0.9)
    assert np.all(np.abs(counts - draws / 10) <= 3 * sd)


def test_jump_values():
    assert eval_jump(np.ones(6, np.uint8), 2) == 8
    assert eval_jump(B("111110"), 2) == 1
    assert eval_jump(B("111100"), 2) == 6
    assert Jump(6, 2).optimum_value == 8


def test_plateau_values():
    assert eval_plateau(np.ones(10, np.uint8), 3) == 10
    assert eval_plateau(B("1111111110"), 3) == 7
    assert eval_plateau(B("1111110000"), 3) == 6


@given(st.integers(4, 30).flatmap(lambda n: st.tuples(st.just(n), st.integers(2, n),
                                                    st.lists(st.integers(0, 1), min_size=n, max_size=n))))
def test_plateau_below_onemax(case):
    n, k, x = case
    x = np.array(x, np.uint8)
    om = eval_onemax(x)
    pv = eval_plateau(x, k)
    assert pv <= om
    if om <= n - k or om == n:
        assert pv == om


def test_linear_values():
    w = np.array([1.5, 2.0, 3.25])
    assert eval_linear(np.zeros(3, np.uint8), w) == 0
    assert eval_linear(np.ones(3, np.uint8), w) == w.sum()
    g = np.random.default_rng(3)
    for _ in range(10 ** 4):
        x = g.integers(0, 2, 3)
        assert eval_linear(x, w) == sum(wi for wi, xi in zip(w, x) if xi)


def test_random_linear_weights_mean():
    rng = RandomSource(4)
    w = gen_random_linear_weights(10 ** 5, 1.0, 2.0, rng)
    assert w.min() >= 1 and w.max() <= 2
    assert abs(w.mean() - 1.5) <= 3 * math.sqrt(1 / 12 / 10 ** 5)


def test_rvalued_onemax_modes():
    assert all(eval_rvalued_onemax([3, 4], [3, 4], m, 10) == 0 for m in (1, 2, 3))
    assert eval_rvalued_onemax([9], [0], 2, 10) == 9
    assert eval_rvalued_onemax([9], [0], 3, 10) == 1
    assert eval_rvalued_onemax([9], [0], 1, 10) == 1


def test_rvalued_onemax_vs_naive():
    g = np.random.default_rng(5)
    for _ in range(10 ** 4):
        x, z = g.integers(0, 16, 8), g.integers(0, 16, 8)
        d = [abs(int(a) - int(b)) for a, b in zip(x, z)]
        assert eval_rvalued_onemax(x, z, 1, 16) == sum(v > 0 for v in d)
        assert eval_rvalued_onemax(x, z, 2, 16) == sum(d)
        ring = sum(min(v, 16 - v) for v in d)
        assert eval_rvalued_onemax(x, z, 3, 16) == ring <= sum(d)


def test_mst_penalty_formula():
    k3 = GraphInstance(3, [(0, 1, 1), (1, 2, 1), (0, 2, 2)])
    assert eval_mst(np.zeros(3, np.uint8), k3) == 18 ** 2 * 2 + 18 * (0 - 2) + 0 == 612
    assert eval_mst(np.ones(3, np.uint8), k3) == 18 * 1 + 4 == 22
    assert eval_mst(np.array([1, 1, 0], np.uint8), k3) == 2 == kruskal_reference(k3).value


def _spanning_trees(g):
    for combo in itertools.combinations(range(g.m), g.n_vertices - 1):
        x = np.zeros(g.m, np.uint8)
        x[list(combo)] = 1
        if g.components(x) == 1:
            yield x


def test_mst_trees_beat_disconnected_selections():
    g = gen_connected_triangles(2, (1, 2, 3))
    trees = list(_spanning_trees(g))
    tree_vals = [eval_mst(x, g) for x in trees]
    assert all(g.n_vertices - 1 <= v <= (g.n_vertices - 1) * g.w_max for v in tree_vals)
    for bits in itertools.product((0, 1), repeat=g.m):
        x = np.array(bits, np.uint8)
        if g.components(x) > 1:
            assert eval_mst(x, g) > max(tree_vals)


def test_connected_triangles_shape_and_optimum():
    g1 = gen_connected_triangles(1)
    assert (g1.n_vertices, g1.m) == (3, 3)
    g5 = gen_connected_triangles(5)
    assert (g5.n_vertices, g5.m) == (11, 15)
    assert g5.components(np.ones(15, np.uint8)) == 1
    for t in (1, 3, 7):
        weights = [(1 + i, 2 + i, 5 + 2 * i) for i in range(t)]
        g = gen_connected_triangles(t, weights)
        assert kruskal_reference(g).value == sum(a + b for a, b, _ in weights)


def test_shuffled_triangles_same_optimum():
    g = gen_connected_triangles(4, (1, 1, 2), RandomSource(6), shuffle=True)
    assert kruskal_reference(g).value == 8


def test_epsilon_separated_weights():
    w = epsilon_separated_weights(3, 1.0)
    flat = sorted({v for t in w for v in t})
    assert all(b >= 2 * a for a, b in zip(flat, flat[1:]))


def test_graph_text_round_trip(tmp_path):
    g = gen_connected_triangles(3, (2, 3, 7))
    text = format_graph(g)
    assert text.splitlines()[0] == "7 9 7"
    assert text.splitlines()[1] == "1 2 2"
    g2 = parse_graph(text)
    assert np.array_equal(g.edges, g2.edges)
    path = tmp_path / "g.txt"
    write_graph(g, path)
    assert np.array_equal(read_graph(path).edges, g.edges)
    with pytest.raises(ValueError):
        parse_graph("3 2 1\n1 2 1\n")
    with pytest.raises(ValueError):
        GraphInstance(4, [(0, 1, 1), (2, 3, 1)])


def test_problem_counts_evaluations_and_knows_optimum():
    for p in (OneMax(12), LeadingOnes(12), Jump(12, 3), Plateau(12, 3)):
        assert p.evaluate(p.optimizer()) == p.optimum_value
        p.evaluate(np.zeros(12, np.uint8))
        assert p.evaluations == 2
    q = RValuedOneMax([1, 2, 3], 8, 2)
    assert q.evaluate(q.optimizer()) == 0 and q.evaluations == 1
    neg = Negated(q)
    assert neg.value(np.array([0, 0, 0])) == -6 and neg.maximize
    neg.evaluations += 3
    assert q.evaluations == 4
    m = MinimumSpanningTree(gen_connected_triangles(2))
    assert m.optimum_value == 4


@settings(max_examples=100)
@given(st.integers(1, 40).flatmap(lambda n: st.tuples(st.lists(st.integers(0, 1), min_size=n, max_size=n),
                                                     st.lists(st.integers(0, 1), min_size=n, max_size=n),
                                                     st.permutations(list(range(n))))))
def test_agreement_round_trip(case):
    x, z, sigma = (np.array(v) for v in case)
    for p in (OneMax(len(x), z), LeadingOnes(len(x), z, sigma)):
        a = p.agreement(x)
        assert np.array_equal(p.from_agreement(a), x)
