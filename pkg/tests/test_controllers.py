import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from paramctl import controllers as ctl
from paramctl.rng import RandomSource


class FixedCoin:
    """Stand-in random source returning preset doubles and integers."""

    def __init__(self, doubles=(), ints=()):
        self.doubles, self.ints = list(doubles), list(ints)

    def random(self):
        return self.doubles.pop(0)

    def integer(self, n):
        return self.ints.pop(0) % n

    def permutation(self, n):
        return np.arange(n)


# -- one-fifth rule -------------------------------------------------------------------------

def test_one_fifth_examples():
    s = ctl.OneFifthState(4.0, 1.5, 1.0, 100.0)
    assert ctl.ga_lambda_update(s, ctl.IMPROVED) == pytest.approx(8 / 3)
    s = ctl.OneFifthState(1.0, 1.5, 1.0, 100.0)
    assert ctl.ga_lambda_update(s, ctl.IMPROVED) == 1.0
    s = ctl.OneFifthState(100.0, 1.5, 1.0, 100.0)
    assert ctl.ga_lambda_update(s, ctl.WORSE) == 100.0
    with pytest.raises(ValueError):
        ctl.OneFifthState(2.0, 1.0)


def test_one_fifth_neutrality():
    s = ctl.OneFifthState(10.0, 1.5, 1.0, math.inf)
    ctl.ga_lambda_update(s, ctl.IMPROVED)
    for _ in range(4):
        ctl.ga_lambda_update(s, ctl.EQUAL)
    assert s.value == pytest.approx(10.0, rel=1e-12)


@given(st.lists(st.sampled_from([ctl.IMPROVED, ctl.EQUAL, ctl.WORSE]), max_size=300),
       st.floats(1.01, 4))
def test_one_fifth_stays_in_caps(outcomes, F):
    s = ctl.OneFifthState(1.0, F, 1.0, 50.0)
    for o in outcomes:
        v = ctl.ga_lambda_update(s, o)
        assert 1.0 <= v <= 50.0


# -- doubling schemes --------------------------------------------------------------------------

def test_doubling_examples():
    for scheme in ctl.DOUBLING_SCHEMES:
        assert ctl.offspring_doubling_update(8, 0, scheme) == 16
    assert ctl.offspring_doubling_update(8, 3, "jansen") == 2
    assert ctl.offspring_doubling_update(1, 5, "halve") == 1
    assert ctl.offspring_doubling_update(8, 2, "reset") == 1
    with pytest.raises(ValueError):
        ctl.offspring_doubling_update(8, 2, "triple")


# -- two-rate ------------------------------------------------------------------------------------

def test_two_rate_branches():
    s = ctl.TwoRateState(2.0, 64)
    assert ctl.two_rate_update(s, True, FixedCoin([0.1])) == 2.0
    s = ctl.TwoRateState(16.0, 64)
    assert ctl.two_rate_update(s, False, FixedCoin([0.3])) == 16.0
    s = ctl.TwoRateState(8.0, 64)
    assert ctl.two_rate_update(s, True, FixedCoin([0.9])) == 16.0
    with pytest.raises(ValueError):
        ctl.TwoRateState(1.0, 64)


def test_two_rate_branch_frequencies():
    rng = RandomSource(1)
    trials = 2 * 10 ** 5
    halve = double = 0
    for _ in range(trials):
        s = ctl.TwoRateState(8.0, 1024)
        r = ctl.two_rate_update(s, False, rng)   # inherit branch halves too
        double += r == 16.0
        halve += r == 4.0
    sd = math.sqrt(trials * 0.25 * 0.75)
    assert abs(double - trials / 4) <= 3 * sd
    assert abs(halve - 3 * trials / 4) <= 3 * sd


@given(st.integers(0, 2 ** 32), st.integers(8, 4096))
def test_two_rate_fuzz_caps(seed, n):
    rng = RandomSource(seed)
    s = ctl.TwoRateState(2.0, n)
    for _ in range(200):
        r = ctl.two_rate_update(s, rng.random() < 0.5, rng)
        assert 2 <= r <= n / 4


# -- rank, time and fitness dependent rates ---------------------------------------------------------

def test_rank_based_rate():
    assert ctl.rank_based_rate(1, 5, 0.01) == 0.01
    assert ctl.rank_based_rate(5, 5, 0.1, 1.0) == pytest.approx(0.1 + 0.9 * 4 / 5)
    assert ctl.rank_based_rate(2, 2, 0.1, 1.0) == pytest.approx(0.55)


def test_time_dependent_cycle():
    assert ctl.time_dependent_cycle(16) == 3
    assert [ctl.time_dependent_rate(t, 16) for t in range(1, 8)] == [1 / 16, 2 / 16, 4 / 16, 1 / 16,
                                                                     2 / 16, 4 / 16, 1 / 16]
    for n in range(2, 300):
        k = ctl.time_dependent_cycle(n)
        assert 2 ** (k - 1) / n <= 0.5 or k == 1


def test_fitness_dependent_rates():
    assert ctl.fitness_dependent_rate_lo(0) == 1.0
    assert ctl.fitness_dependent_rate_lo(9) == 0.1
    assert ctl.fitness_dependent_rate_opl(0, math.e, 100) == pytest.approx(1 / 100)
    assert ctl.fitness_dependent_lambda_ga(99, 100) == 10
    assert ctl.fitness_dependent_lambda_ga(0, 100) == 1
    with pytest.raises(ValueError):
        ctl.fitness_dependent_lambda_ga(100, 100)


# -- bandits ------------------------------------------------------------------------------------------

def test_probability_matching_symmetry():
    s = ctl.PortfolioStats(4)
    ctl.prob_matching(s, 0, s.confidence[0])      # confidence unchanged, all equal
    assert np.allclose(s.prob, 0.25)


def test_adaptive_pursuit_converges_to_pmax():
    s = ctl.PortfolioStats(3, p_min=0.1)
    prev = s.prob[0]
    for _ in range(200):
        ctl.adaptive_pursuit(s, 0, 1.0)
        assert s.prob[0] >= prev - 1e-15
        prev = s.prob[0]
    assert s.prob[0] == pytest.approx(s.p_max, abs=1e-12)
    assert s.p_max == pytest.approx(0.8)


@given(st.lists(st.tuples(st.integers(0, 3), st.floats(0, 1)), max_size=200), st.booleans())
def test_bandit_distributions_stay_valid(plays, pursuit):
    s = ctl.PortfolioStats(4, p_min=0.05)
    for i, r in plays:
        (ctl.adaptive_pursuit if pursuit else ctl.prob_matching)(s, i, r)
        assert abs(s.prob.sum() - 1) <= 1e-12
        assert np.all(s.prob >= s.p_min - 1e-12)
        assert np.all(s.prob <= s.p_max + 1e-12)


def test_ucb_prefers_less_played_arm():
    s = ctl.PortfolioStats(2, window=None)
    for _ in range(10):
        s.record(0, 0.5)
    s.record(1, 0.5)
    left = 0.5 + math.sqrt(math.log(2 * 11 / 10))
    right = 0.5 + math.sqrt(math.log(2 * 11 / 1))
    assert right > left
    assert ctl.ucb_select(s) == 1


def test_ucb_plays_every_arm_first_and_window_forgets():
    s = ctl.PortfolioStats(3, window=2)
    assert ctl.ucb_select(s) == 0
    s.record(0, 1.0)
    assert ctl.ucb_select(s) == 1
    s.record(1, 0.0)
    s.record(1, 0.0)
    assert s.plays.tolist() == [0, 2, 0]


# -- velocities and epsilon-greedy ------------------------------------------------------------------------

def test_velocity_matches_discounted_average():
    t = ctl.VelocityTable(3, 0.2, 0.0)
    ctl.velocity_update(t, 2, 5.0)
    assert t.velocity(2) == 5.0
    ctl.velocity_update(t, 2, 1.0)
    assert t.velocity(2) == pytest.approx((0.8 * 5 + 1) / (0.8 + 1))
    full = ctl.VelocityTable(3, 1.0, 0.0)
    ctl.velocity_update(full, 1, 4.0)
    ctl.velocity_update(full, 1, 2.0)
    assert full.velocity(1) == 2.0


def test_velocity_matches_explicit_sum():
    rng = RandomSource(2)
    delta = 0.13
    t = ctl.VelocityTable(4, delta, 0.0)
    history = []
    for _ in range(60):
        r, g = 1 + rng.integer(4), rng.random()
        history.append((r, g))
        ctl.velocity_update(t, r, g)
    steps = len(history)
    for r in range(1, 5):
        w = [(1 - delta) ** (steps - 1 - s) for s, (rs, _) in enumerate(history) if rs == r]
        g = [gs for rs, gs in history if rs == r]
        assert t.velocity(r) == pytest.approx(np.dot(w, g) / sum(w), rel=1e-12)


@given(st.lists(st.tuples(st.integers(1, 5), st.floats(0, 10)), min_size=5, max_size=50),
       st.sampled_from([0.125, 0.5, 2.0, 8.0, 1024.0]))
def test_greedy_argmax_scale_invariant(obs, c):
    a, b = ctl.VelocityTable(5, 0.1, 0.0), ctl.VelocityTable(5, 0.1, 0.0)
    for r, g in obs:
        ctl.velocity_update(a, r, g)
        ctl.velocity_update(b, r, c * g)
    assert ctl.greedy_strength(a) == ctl.greedy_strength(b)


def test_eps_greedy_explores():
    t = ctl.VelocityTable(3, 0.5, 1.0)
    assert ctl.eps_greedy_select(t, FixedCoin([0.2], [1])) == 2
    t.eps = 0.0
    ctl.velocity_update(t, 1, 0.0)
    ctl.velocity_update(t, 2, 1.0)
    ctl.velocity_update(t, 3, 0.5)
    assert ctl.eps_greedy_select(t, FixedCoin([0.5])) == 2


# -- self-adaptation ------------------------------------------------------------------------------------------

def test_self_adaptive_child_rate():
    seen = {ctl.self_adaptive_child_rate(64, 32, 32, 1024, FixedCoin([u])) for u in (0.2, 0.7)}
    assert seen == {32, 1024}
    assert ctl.self_adaptive_child_rate(2, 2, 2, 64, FixedCoin([0.1])) == 2
    assert {ctl.self_adaptive_child_rate(8, 2, 2, 64, FixedCoin([u])) for u in (0.1, 0.9)} == {4, 16}


def test_self_adaptive_child_rate_is_fair():
    rng = RandomSource(3)
    trials = 10 ** 5
    down = sum(ctl.self_adaptive_child_rate(8, 2, 2, 64, rng) == 4 for _ in range(trials))
    assert abs(down - trials / 2) <= 3 * math.sqrt(trials / 4)


# -- hyper-heuristics ------------------------------------------------------------------------------------------

def test_random_gradient_repeats_after_improvement():
    h = ctl.HHState("random-gradient", 2)
    rng = FixedCoin(ints=[1, 0])
    assert ctl.hh_next_operator(h, None, rng) == 1
    assert ctl.hh_next_operator(h, ctl.IMPROVED, rng) == 1
    assert ctl.hh_next_operator(h, ctl.WORSE, rng) == 0


def test_permutation_alternates():
    h = ctl.HHState("permutation", 2)
    rng = RandomSource(4)
    seq = [ctl.hh_next_operator(h, None, rng) for _ in range(8)]
    assert seq[0::2] == [seq[0]] * 4 and seq[1::2] == [1 - seq[0]] * 4


def test_grg_phase_semantics():
    h = ctl.HHState("grg", 2, tau=5)
    rng = FixedCoin(ints=[1, 0])
    op = h.select(rng)
    for _ in range(4):
        h.observe(False, rng)
    assert h.counter == 4
    h.observe(True, rng)
    assert h.select(rng) == op and h.counter == 0
    for _ in range(5):
        h.observe(False, rng)
    assert h.select(rng) == 0 and h.counter == 0


def test_sigma_grg_needs_sigma_successes():
    h = ctl.HHState("sigma-grg", 2, tau=4, sigma=2)
    rng = FixedCoin(ints=[0, 1])
    h.select(rng)
    h.observe(True, rng)
    h.observe(False, rng)
    h.observe(False, rng)
    h.observe(False, rng)                    # only one success in the phase
    assert h.select(rng) == 1


def test_sigma_grg_tau_update():
    assert ctl.sigma_grg_tau_update(100, False) == 200
    assert ctl.sigma_grg_tau_update(3, True, sigma=3) == 3
    tau = 40.0
    for _ in range(5):
        tau = ctl.sigma_grg_tau_update(ctl.sigma_grg_tau_update(tau, True), False)
        assert tau == 40.0


def test_greedy_returns_sentinel():
    assert ctl.HHState("greedy", 3).select(RandomSource(5)) == ctl.GREEDY_ALL


# -- migration intervals --------------------------------------------------------------------------------------

def test_migration_interval_update():
    assert ctl.migration_interval_update(4, False, "2tau-1") == 8
    assert ctl.migration_interval_update(4, True, "2tau-1") == 1
    assert ctl.migration_interval_update(1, True, "2tau-half") == 1
    assert ctl.migration_interval_update(8, True, "2tau-half") == 4
    with pytest.raises(ValueError):
        ctl.migration_interval_update(4, True, "tau")
