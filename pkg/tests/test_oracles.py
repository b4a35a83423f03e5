import itertools
import math

import numpy as np
import pytest

from paramctl import oracles as orc
from paramctl.algorithms import FixedStrength, StaticRate, run_one_plus_one, run_rls
from paramctl.problems import GraphInstance, LeadingOnes, OneMax, gen_connected_triangles
from paramctl.rng import RandomSource


def mc_mean(values):
    values = np.asarray(values, float)
    return values.mean(), values.std(ddof=1) / math.sqrt(values.size)


# -- LeadingOnes closed form ---------------------------------------------------------------

def test_lo_expected_time_small_cases():
    assert orc.lo_expected_time(1, 0.5).value == pytest.approx(1.0)
    assert orc.lo_expected_time(5, 0.2).value == pytest.approx(20.517578125, rel=1e-12)
    with pytest.raises(ValueError):
        orc.lo_expected_time(5, 0.0)


def test_lo_expected_time_vs_simulation():
    rng = RandomSource(1)
    gens = [run_one_plus_one(LeadingOnes(5), StaticRate(0.2), 10 ** 6, rng).generations
            for _ in range(10 ** 5)]
    mean, _ = mc_mean(gens)
    assert mean == pytest.approx(orc.lo_expected_time(5, 0.2).value, rel=0.01)


def test_lo_expected_time_best_static_rate_constant():
    n = 2000
    assert orc.lo_expected_time(n, 1.59 / n).value / n ** 2 == pytest.approx(0.77, abs=0.005)
    rates = np.linspace(1.3, 1.9, 61) / n
    best = min(rates, key=lambda p: orc.lo_expected_time(n, p).value)
    assert best * n == pytest.approx(1.59, abs=0.02)


def test_lo_expected_time_matches_exact_chain():
    for n, p in ((3, 0.3), (6, 1 / 6)):
        vals = orc.problem_values(LeadingOnes(n))
        chain = orc.brute_force_hitting_time(vals, orc.elitist_kernel(vals, orc.mutation_matrix_standard(n, p)))
        assert chain.value == pytest.approx(orc.lo_expected_time(n, p).value, rel=1e-10)


# -- LeadingOnes level DP ------------------------------------------------------------------

def test_level_dp_one_bit_total_is_half_n_squared():
    for n in (1, 2, 10, 100, 1000, 5000):
        assert orc.lo_fixed_target_dp(n, (1,)).total() == pytest.approx(n * n / 2, rel=1e-12)


def test_level_dp_visit_probabilities():
    dp = orc.lo_fixed_target_dp(50, (1,))
    assert np.allclose(dp.visit[:50], 0.5)
    assert dp.visit[50] == 1.0


def test_level_dp_one_bit_matches_exact_chain():
    n = 6
    vals = orc.problem_values(LeadingOnes(n))
    chain = orc.brute_force_hitting_time(vals, orc.elitist_kernel(vals, orc.mutation_matrix_strengths(n, {1: 1.0})))
    assert chain.value == pytest.approx(orc.lo_fixed_target_dp(n, (1,)).total(), rel=1e-10)


def test_level_dp_vs_simulation_fixed_target():
    n, runs = 100, 10 ** 4
    dp = orc.lo_fixed_target_dp(n, (1, 2, 3))
    rng = RandomSource(2)
    for k in (1, 3):
        hits = [run_rls(LeadingOnes(n), FixedStrength(k), 10 ** 7, rng, target=n // 2).first_hit(n // 2) - 1
                for _ in range(runs)]
        mean, se = mc_mean(hits)
        assert mean == pytest.approx(dp.times[k][n // 2], rel=0.02)
        assert abs(mean - dp.times[k][n // 2]) <= 4 * se


def test_best_of_set_ratio_and_table():
    n = 1000
    dp = orc.lo_fixed_target_dp(n, (1, 2, 3))
    assert dp.total() / dp.total(1) == pytest.approx(0.8104, abs=5e-4)
    assert dp.best_strength[0] == 3
    assert np.all(dp.best_strength[n // 2:] == 1)
    assert np.all(np.diff(dp.best_strength) <= 0)


def test_best_of_set_matches_per_state_minimization():
    # n=4: for each level the strength with the smallest expected waiting time
    n = 4
    dp = orc.lo_fixed_target_dp(n, (1, 2, 3))
    for i in range(n):
        waits = {}
        for k in (1, 2, 3):
            good = sum(1 for flips in itertools.combinations(range(n), k)
                       if i in flips and all(j > i for j in flips if j != i))
            waits[k] = math.comb(n, k) / good if good else math.inf
        assert dp.best_strength[i] == min(waits, key=lambda k: (waits[k], k))


def test_level_sum_upper_bound():
    # summing every level's waiting time ignores skipped levels, so it bounds the exact value
    for n in (5, 20, 200):
        bound = orc.fitness_level_bound([1 / n] * n).value
        assert bound >= orc.lo_fixed_target_dp(n, (1,)).total()


# -- OneMax drift ---------------------------------------------------------------------------

def test_onemax_drift_examples():
    for n, f in ((10, 0), (10, 7), (50, 49)):
        assert orc.onemax_drift(n, f, 1).value == pytest.approx((n - f) / n)
    assert orc.onemax_drift(3, 1, 3).value == pytest.approx(1.0)
    assert orc.onemax_drift(10, 5, 2).value == pytest.approx(20 / 45)
    with pytest.raises(ValueError):
        orc.onemax_drift(10, 11, 1)


def test_onemax_drift_vs_enumeration():
    for n in range(1, 11):
        z = np.ones(n, np.uint8)
        for f in range(n + 1):
            x = np.array([1] * f + [0] * (n - f), np.uint8)
            for ell in range(1, n + 1):
                gains = [max(0, int(np.sum((x ^ _mask(n, c)) == z)) - f)
                         for c in itertools.combinations(range(n), ell)]
                exact = sum(gains) / len(gains)
                assert orc.onemax_drift(n, f, ell).value == pytest.approx(exact, abs=1e-12)
                assert orc.onemax_drift_fast(n, f, ell) == pytest.approx(exact, abs=1e-12)


def _mask(n, flips):
    m = np.zeros(n, np.uint8)
    m[list(flips)] = 1
    return m


def test_drift_max_strength_examples():
    assert orc.drift_max_strength(300, 220) == 1
    assert orc.drift_max_strength(300, 0) == 300
    assert orc.drift_max_strength(12, 0) == 12
    for n in (12, 50, 200):
        for f in range(n):
            ell = orc.drift_max_strength(n, f)
            best = max(orc.onemax_drift(n, f, j).value for j in range(1, n + 1))
            assert orc.onemax_drift(n, f, ell).value == pytest.approx(best, rel=1e-9)
            # an even argmax only occurs as 'flip everything' below half fitness
            assert ell % 2 == 1 or (ell == n and f < n / 2)


def test_drift_max_table_is_shared():
    a, b = orc.DriftMaxTable(77), orc.DriftMaxTable(77)
    assert a[70] == orc.drift_max_strength(77, 70)
    assert b.table[70] == a[70]


# -- 1/2-bit mixtures ----------------------------------------------------------------------------

def test_mixed_probabilities():
    assert orc.mixed_pd(10, 1, 1.0) == pytest.approx(0.1)
    assert orc.mixed_pd(10, 1, 0.0) == 0.0
    assert orc.mixed_pd(10, 2, 0.0) == pytest.approx(2 / 90)
    assert orc.mixed_hd(10, 2, 0.0) == pytest.approx(4 / 90)
    up, _ = orc.mixed_bounds(10, 0.0)
    assert up.value == math.inf


def test_mixed_bounds_bracket_simulation():
    from paramctl.algorithms import MixedStrengths
    n, p = 100, 0.5
    up, low = orc.mixed_bounds(n, p)
    rng = RandomSource(3)
    gens = [run_rls(OneMax(n), MixedStrengths((1, 2), (p, 1 - p)), 10 ** 7, rng).generations
            for _ in range(1000)]
    mean, _ = mc_mean(gens)
    assert low.value <= mean <= up.value


# -- spanning trees -------------------------------------------------------------------------------

def test_kruskal_small_graphs():
    assert orc.kruskal_reference(GraphInstance(3, [(0, 1, 1), (1, 2, 1), (0, 2, 2)])).value == 2
    path = GraphInstance(5, [(i, i + 1, i + 1) for i in range(4)])
    assert orc.kruskal_reference(path).value == 10


def test_kruskal_vs_exhaustive():
    rng = RandomSource(4)
    for _ in range(30):
        nv = 3 + rng.integer(6)
        edges = {(i, i + 1) for i in range(nv - 1)}
        while len(edges) < min(nv + 3, nv * (nv - 1) // 2):
            u, v = sorted(rng.sample_distinct(nv, 2))
            edges.add((u, v))
        g = GraphInstance(nv, [(u, v, 1 + rng.integer(9)) for u, v in sorted(edges)])
        best = math.inf
        for combo in itertools.combinations(range(g.m), nv - 1):
            x = np.zeros(g.m, np.uint8)
            x[list(combo)] = 1
            if g.components(x) == 1:
                best = min(best, int(g.edges[list(combo), 2].sum()))
        assert orc.kruskal_reference(g).value == best


def test_kruskal_triangles():
    assert orc.kruskal_reference(gen_connected_triangles(10, (1, 1, 2))).value == 20


# -- fitness levels and bounds ------------------------------------------------------------------

def test_fitness_level_bound():
    assert orc.fitness_level_bound([0.5, 0.25]).value == 6
    assert orc.fitness_level_bound([0.5, 0.0]).value == math.inf
    with pytest.raises(ValueError):
        orc.fitness_level_bound([1.5])


def test_doubling_bound_upper_estimate():
    for n in (10, 100, 1000):
        b = orc.doubling_parallel_bound(n).value
        assert 0 < b <= 2 * n * math.log(2 * math.e ** 2)


# -- exact chains --------------------------------------------------------------------------------

def test_chain_trivial_and_validation():
    vals = orc.problem_values(OneMax(1))
    k = orc.elitist_kernel(vals, orc.mutation_matrix_standard(1, 0.5))
    assert orc.brute_force_hitting_time(vals, k).value == pytest.approx(1.0)
    with pytest.raises(ValueError):
        orc.brute_force_hitting_time(vals, np.eye(2) * 0.5)


def test_chain_onemax_one_bit_coupon_collector():
    n = 8
    vals = orc.problem_values(OneMax(n))
    chain = orc.brute_force_hitting_time(vals, orc.elitist_kernel(vals, orc.mutation_matrix_strengths(n, {1: 1.0})))
    exact = sum(math.comb(n, f) / 2 ** n * sum(n / (n - j) for j in range(f, n)) for f in range(n + 1))
    assert chain.value == pytest.approx(exact, rel=1e-10)


def test_chain_detects_non_absorbing_parity():
    vals = orc.problem_values(OneMax(6))
    k = orc.elitist_kernel(vals, orc.mutation_matrix_strengths(6, {2: 1.0}))
    res = orc.brute_force_hitting_time(vals, k)
    assert res.value == math.inf and res.note == "non-absorbing"


def test_chain_minimization_orientation():
    vals = -orc.problem_values(OneMax(5))
    m = orc.mutation_matrix_standard(5, 0.2)
    a = orc.brute_force_hitting_time(vals, orc.elitist_kernel(vals, m, maximize=False), maximize=False)
    b = orc.brute_force_hitting_time(-vals, orc.elitist_kernel(-vals, m))
    assert a.value == pytest.approx(b.value, rel=1e-12)


def test_with_replacement_matrix_is_stochastic():
    m = orc.mutation_matrix_strengths(5, {1: 0.3, 2: 0.7}, replacement=True)
    assert np.allclose(m.sum(axis=1), 1.0)
