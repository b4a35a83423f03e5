"""Parameter-update rules.

Each rule is a small function or a single-owner state object: observe the
outcome of a generation, emit the next parameter value.  The compiled kernels
re-implement the rules used inside their loops; the pure-Python loops call
these functions directly, and the backend-equivalence tests keep both in
agreement.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .rng import RandomSource

IMPROVED, EQUAL, WORSE = "improved", "equal", "worse"


def round_half_up(value: float) -> int:
    """Nearest integer; a fractional part of exactly 1/2 rounds up."""
    return int(math.floor(value + 0.5))


# -- success-based rules -----------------------------------------------------

@dataclass
class OneFifthState:
    value: float
    F: float = 1.5
    lo: float = 1.0
    hi: float = math.inf
    s: int = 5

    def __post_init__(self):
        if self.F <= 1:
            raise ValueError("update strength F must exceed 1")
        if self.s < 2:
            raise ValueError("success exponent s must be at least 2")
        if not self.lo <= self.value <= self.hi:
            raise ValueError("initial value outside its caps")


def ga_lambda_update(state: OneFifthState, outcome: str) -> float:
    """Shrink on strict improvement, grow by F^(1/(s-1)) otherwise."""
    if outcome == IMPROVED:
        state.value = max(state.value / state.F, state.lo)
    elif outcome in (EQUAL, WORSE):
        state.value = min(state.value * state.F ** (1.0 / (state.s - 1)), state.hi)
    else:
        raise ValueError(f"unknown outcome {outcome!r}")
    return state.value


DOUBLING_SCHEMES = ("reset", "halve", "jansen")


def offspring_doubling_update(lam: int, successes: int, scheme: str) -> int:
    if scheme not in DOUBLING_SCHEMES:
        raise ValueError(f"unknown doubling scheme {scheme!r}")
    if successes == 0:
        return 2 * lam
    if scheme == "reset":
        return 1
    if scheme == "halve":
        return max(1, lam // 2)
    return max(1, lam // successes)


@dataclass
class TwoRateState:
    r: float
    n: int

    @property
    def lo(self):
        return 2.0

    @property
    def hi(self):
        return self.n / 4

    def __post_init__(self):
        if self.n < 8:
            raise ValueError("two-rate control needs n >= 8")
        if not self.lo <= self.r <= self.hi:
            raise ValueError("initial r outside [2, n/4]")


def two_rate_update(state: TwoRateState, winner_high: bool, rng: RandomSource) -> float:
    """One coin decides: halve (1/4), double (1/4) or inherit the winner (1/2)."""
    u = rng.random()
    if u < 0.25:
        r = state.r / 2
    elif u < 0.5:
        r = state.r * 2
    else:
        r = state.r * 2 if winner_high else state.r / 2
    state.r = min(max(r, state.lo), state.hi)
    return state.r


# -- rates depending on time, rank or fitness ----------------------------------

def rank_based_rate(i: int, mu: int, p_min: float, p_max: float = 1.0, m: int | None = None) -> float:
    if mu < 1:
        raise ValueError("population size must be positive")
    if not 1 <= i <= mu:
        raise ValueError("rank outside [1, mu]")
    m = mu if m is None else m
    return p_min + (p_max - p_min) * (i - 1) / m


def time_dependent_cycle(n: int) -> int:
    """Number of rates in the cycle 1/n, 2/n, ... (all at most 1/2)."""
    return max(1, (n - 1).bit_length() - 1)


def time_dependent_rate(t: int, n: int) -> float:
    if t < 1:
        raise ValueError("iterations count from 1")
    return 2.0 ** ((t - 1) % time_dependent_cycle(n)) / n


def fitness_dependent_rate_lo(f) -> float:
    if f < 0:
        raise ValueError("fitness must be non-negative")
    return 1.0 / (f + 1)


def fitness_dependent_rate_opl(f, lam, n) -> float:
    if not 0 <= f < n:
        raise ValueError("fitness must lie in [0, n)")
    return max(1.0 / n, math.log(lam) / (n * math.log(math.e * n / (n - f))))


def fitness_dependent_lambda_ga(f, n) -> int:
    if not 0 <= f < n:
        raise ValueError("fitness must lie in [0, n)")
    return min(math.ceil(math.sqrt(n / (n - f))), n)


# -- learning-based operator selection -----------------------------------------

def normalized_reward(gain, n) -> float:
    return min(max(gain / n, 0.0), 1.0)


class PortfolioStats:
    """Confidences, selection probabilities and (windowed) play statistics."""

    def __init__(self, k: int, p_min: float = 0.05, p_max: float | None = None,
                 alpha: float = 0.3, beta: float = 0.3, c_ucb: float = 1.0,
                 window: int | None = 50):
        if k < 1:
            raise ValueError("empty portfolio")
        if k * p_min > 1:
            raise ValueError("k * p_min exceeds 1")
        self.k = k
        self.p_min = p_min
        self.p_max = 1 - (k - 1) * p_min if p_max is None else p_max
        self.alpha, self.beta, self.c_ucb = alpha, beta, c_ucb
        self.confidence = np.ones(k)
        self.prob = np.full(k, 1.0 / k)
        self.window = window
        self.history = deque()
        self.plays = np.zeros(k, dtype=np.int64)
        self.reward_sum = np.zeros(k)

    def record(self, i: int, reward: float):
        """Add (arm, reward) to the play statistics used by UCB."""
        self.history.append((i, reward))
        self.plays[i] += 1
        self.reward_sum[i] += reward
        if self.window is not None and len(self.history) > self.window:
            j, old = self.history.popleft()
            self.plays[j] -= 1
            self.reward_sum[j] -= old

    def empirical_reward(self) -> np.ndarray:
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(self.plays > 0, self.reward_sum / np.maximum(self.plays, 1), 0.0)

    def select(self, rng: RandomSource) -> int:
        """Roulette-wheel draw from the current probabilities."""
        u = rng.random()
        acc = 0.0
        for i, p in enumerate(self.prob):
            acc += p
            if u < acc:
                return i
        return self.k - 1


def _update_confidence(stats: PortfolioStats, i: int, reward: float):
    if not 0 <= i < stats.k:
        raise ValueError("arm index out of range")
    stats.confidence[i] = (1 - stats.alpha) * stats.confidence[i] + stats.alpha * reward
    stats.record(i, reward)


def prob_matching(stats: PortfolioStats, i: int, reward: float) -> PortfolioStats:
    _update_confidence(stats, i, reward)
    total = stats.confidence.sum()
    share = stats.confidence / total if total > 0 else np.full(stats.k, 1.0 / stats.k)
    stats.prob = stats.p_min + (1 - stats.k * stats.p_min) * share
    return stats


def adaptive_pursuit(stats: PortfolioStats, i: int, reward: float) -> PortfolioStats:
    _update_confidence(stats, i, reward)
    winner = int(np.argmax(stats.confidence))
    target = np.full(stats.k, stats.p_min)
    target[winner] = stats.p_max
    stats.prob = (1 - stats.beta) * stats.prob + stats.beta * target
    return stats


def ucb_select(stats: PortfolioStats) -> int:
    if stats.k < 1:
        raise ValueError("empty portfolio")
    unplayed = np.flatnonzero(stats.plays == 0)
    if unplayed.size:
        return int(unplayed[0])
    total = stats.plays.sum()
    score = stats.empirical_reward() + np.sqrt(stats.c_ucb * np.log(2 * total / stats.plays))
    return int(np.argmax(score))


class VelocityTable:
    """Time-discounted average progress per strength 1..k."""

    def __init__(self, k: int, delta: float, eps: float):
        if k < 1:
            raise ValueError("empty portfolio")
        if not 0 < delta <= 1:
            raise ValueError("forgetting rate must lie in (0, 1]")
        if not 0 <= eps <= 1:
            raise ValueError("exploration rate must lie in [0, 1]")
        self.k, self.delta, self.eps = k, delta, eps
        self.num = [0.0] * k
        self.den = [0.0] * k

    def velocity(self, r: int) -> float:
        d = self.den[r - 1]
        return self.num[r - 1] / d if d > 0 else math.inf

    def velocities(self) -> list[float]:
        return [self.velocity(r) for r in range(1, self.k + 1)]


def velocity_update(table: VelocityTable, r: int, g: float) -> VelocityTable:
    if not 1 <= r <= table.k:
        raise ValueError("strength outside [1, k]")
    keep = 1.0 - table.delta
    num, den = table.num, table.den
    for j in range(table.k):
        num[j] *= keep
        den[j] *= keep
    num[r - 1] += g
    den[r - 1] += 1.0
    return table


def greedy_strength(table: VelocityTable) -> int:
    best, best_v = 1, table.velocity(1)
    for r in range(2, table.k + 1):
        v = table.velocity(r)
        if v > best_v:
            best, best_v = r, v
    return best


def eps_greedy_select(table: VelocityTable, rng: RandomSource) -> int:
    if rng.random() < table.eps:
        return 1 + rng.integer(table.k)
    return greedy_strength(table)


# -- self-adaptation -------------------------------------------------------------

def self_adaptive_child_rate(r: float, factor: float, lo: float, hi: float, rng: RandomSource) -> float:
    if factor < 2:
        raise ValueError("self-adaptation factor must be at least 2")
    r = r / factor if rng.random() < 0.5 else r * factor
    return min(max(r, lo), hi)


# -- hyper-heuristics -------------------------------------------------------------

HH_MECHANISMS = ("simple-random", "random-gradient", "greedy", "permutation", "grg", "sigma-grg")
GREEDY_ALL = -1


class HHState:
    """Operator choice of a selection hyper-heuristic.

    ``select`` is called at the start of a generation and returns the index
    of the operator to apply (or GREEDY_ALL); ``observe`` reports whether
    that generation strictly improved the fitness.
    """

    def __init__(self, mechanism: str, k: int, tau: float = 1.0, sigma: int = 1,
                 adapt_tau: bool = False, tau_cap: float = math.inf):
        if mechanism not in HH_MECHANISMS:
            raise ValueError(f"unknown mechanism {mechanism!r}")
        if k < 1:
            raise ValueError("empty portfolio")
        if sigma < 1:
            raise ValueError("sigma must be at least 1")
        if mechanism in ("grg", "sigma-grg") and tau < sigma:
            raise ValueError("phase length must be at least sigma")
        self.mechanism = mechanism
        self.k = k
        self.tau = tau
        self.sigma = sigma if mechanism == "sigma-grg" else 1
        self.adapt_tau = adapt_tau and mechanism == "sigma-grg"
        self.tau_cap = tau_cap
        self.current = -1
        self.counter = 0
        self.successes = 0
        self.last_improved = False
        self.order = None
        self.pos = 0

    def select(self, rng: RandomSource) -> int:
        mech = self.mechanism
        if mech == "greedy":
            return GREEDY_ALL
        if mech == "simple-random":
            self.current = rng.integer(self.k)
        elif mech == "random-gradient":
            if not self.last_improved:
                self.current = rng.integer(self.k)
        elif mech == "permutation":
            if self.order is None:
                self.order = [int(v) for v in rng.permutation(self.k)]
            self.current = self.order[self.pos]
            self.pos = (self.pos + 1) % self.k
        elif self.current < 0:
            self.current = rng.integer(self.k)
        return self.current

    def observe(self, improved: bool, rng: RandomSource):
        mech = self.mechanism
        if mech == "random-gradient":
            self.last_improved = improved
        elif mech in ("grg", "sigma-grg"):
            self.counter += 1
            if improved:
                self.successes += 1
            if self.successes >= self.sigma:
                if self.adapt_tau:
                    self.tau = sigma_grg_tau_update(self.tau, True, self.sigma, self.tau_cap)
                self.counter = self.successes = 0
            elif self.counter >= self.tau:
                self.current = rng.integer(self.k)
                if self.adapt_tau:
                    self.tau = sigma_grg_tau_update(self.tau, False, self.sigma, self.tau_cap)
                self.counter = self.successes = 0


def hh_next_operator(state: HHState, last_outcome, rng: RandomSource) -> int:
    """Report the previous generation (None on the first call) and pick the next operator."""
    if last_outcome is not None:
        state.observe(last_outcome == IMPROVED or last_outcome is True, rng)
    return state.select(rng)


def sigma_grg_tau_update(tau: float, succeeded: bool, sigma: int = 1, cap: float = math.inf) -> float:
    if succeeded:
        return max(float(sigma), tau / 2)
    return min(2.0 * tau, cap)


# -- island model ------------------------------------------------------------------

MIGRATION_SCHEMES = ("2tau-1", "2tau-half")


def migration_interval_update(tau: int, success: bool, scheme: str) -> int:
    """success means an improvement was found or a better migrant arrived."""
    if scheme not in MIGRATION_SCHEMES:
        raise ValueError(f"unknown migration scheme {scheme!r}")
    if not success:
        return 2 * tau
    if scheme == "2tau-1":
        return 1
    return max(1, tau // 2)
