"""Exact reference values: closed forms, dynamic programs and linear solves."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .backend import kernels
from .problems import GraphInstance, _UnionFind

CLOSED_FORM = "closed-form"
DYNAMIC_PROGRAM = "dynamic-program"
LINEAR_SOLVE = "linear-solve"
EXHAUSTIVE = "exhaustive"


@dataclass(frozen=True)
class OracleValue:
    value: float
    method: str
    note: str = ""

    def __float__(self):
        return float(self.value)

    def __str__(self):
        text = f"{self.value!r} ({self.method})"
        return f"{text} [{self.note}]" if self.note else text


# -- LeadingOnes -------------------------------------------------------------------

def lo_expected_time(n: int, p: float) -> OracleValue:
    """Expected iterations of the (1+1) EA with static rate p on LeadingOnes."""
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    if n < 1:
        raise ValueError("n must be positive")
    q = 1.0 - p
    return OracleValue((q ** (1 - n) - q) / (2 * p * p), CLOSED_FORM)


@dataclass
class LOFixedTargetCurves:
    """Expected first-hitting times of the LeadingOnes levels for RLS_k.

    ``times[k][j]`` is the expected number of iterations until a value of at
    least j is reached (j = 0..n); ``best`` uses, at every level, the
    strength with the largest improvement probability.
    """
    n: int
    strengths: tuple
    visit: np.ndarray
    improve: dict
    times: dict
    best_strength: np.ndarray
    best: np.ndarray

    def total(self, k=None) -> float:
        return float((self.best if k is None else self.times[k])[self.n])


def lo_fixed_target_dp(n: int, strengths=(1, 2, 3)) -> LOFixedTargetCurves:
    strengths = tuple(sorted(set(int(k) for k in strengths)))
    if not strengths or strengths[0] < 1 or strengths[-1] > n:
        raise ValueError("strengths must lie in [1, n]")
    # probability that level i is ever occupied, uniform start and geometric jumps
    # s carries sum_{i<j} visit[i] * 2^-(j-i), the chance of jumping onto j
    visit = np.zeros(n + 1)
    s = 0.0
    for j in range(n):
        visit[j] = 0.5 ** (j + 1) + s
        s = (s + visit[j]) / 2
    visit[n] = 1.0
    improve, times = {}, {}
    for k in strengths:
        total = math.comb(n, k)
        q = np.zeros(n)
        wait = np.zeros(n)
        for i in range(n):
            ways = math.comb(n - i - 1, k - 1)
            q[i] = ways / total
            wait[i] = total / ways if ways else math.inf
        improve[k] = q
        curve = np.zeros(n + 1)
        acc = 0.0
        for i in range(n):
            acc += visit[i] * wait[i]
            curve[i + 1] = acc
        times[k] = curve
    best_k = np.zeros(n, dtype=np.int64)
    best = np.zeros(n + 1)
    acc = 0.0
    for i in range(n):
        k_star = strengths[0]
        for k in strengths[1:]:
            if improve[k][i] > improve[k_star][i]:
                k_star = k
        best_k[i] = k_star
        ways = math.comb(n - i - 1, k_star - 1)
        acc += visit[i] * (math.comb(n, k_star) / ways)
        best[i + 1] = acc
    return LOFixedTargetCurves(n, strengths, visit, improve, times, best_k, best)


# -- OneMax drift --------------------------------------------------------------------

def onemax_drift(n: int, f: int, ell: int) -> OracleValue:
    """Expected positive OneMax gain of ell distinct flips at fitness f (exact)."""
    if not 0 <= f <= n or not 1 <= ell <= n:
        raise ValueError("need 0 <= f <= n and 1 <= ell <= n")
    d = n - f
    num = 0
    for i in range((ell + 1) // 2, ell + 1):
        num += math.comb(d, i) * math.comb(f, ell - i) * (2 * i - ell)
    return OracleValue(num / math.comb(n, ell), CLOSED_FORM)


def onemax_drift_fast(n: int, f: int, ell: int) -> float:
    """Floating-point tail summation used by the search loops."""
    return float(kernels.drift_value(n, f, ell))


def drift_max_strength(n: int, f: int) -> int:
    """Smallest ell maximizing the expected OneMax gain at fitness f."""
    if not 0 <= f < n:
        raise ValueError("need 0 <= f < n")
    return int(kernels.drift_argmax(n, f))


class DriftMaxTable:
    """Lazily filled, shared table f -> drift-maximizing strength."""

    _tables: dict = {}

    def __init__(self, n: int):
        self.n = n
        table = self._tables.get(n)
        if table is None:
            table = np.full(n + 1, -1, dtype=np.int64)
            self._tables[n] = table
        self.table = table

    def fill(self, f):
        return drift_max_strength(self.n, int(f))

    def __getitem__(self, f):
        if self.table[f] < 0:
            self.table[f] = self.fill(f)
        return int(self.table[f])


# -- mixing 1- and 2-bit flips ------------------------------------------------------------

def mixed_pd(n: int, d: int, p: float) -> float:
    """Improvement probability at distance d: 1 flip w.p. p, else 2 distinct flips."""
    return p * d / n + (1 - p) * d * (d - 1) / (n * (n - 1))


def mixed_hd(n: int, d: int, p: float) -> float:
    """Expected distance decrease at distance d under the same mixture."""
    return p * d / n + 2 * (1 - p) * d * (d - 1) / (n * (n - 1))


def mixed_bounds(n: int, p: float) -> tuple[OracleValue, OracleValue]:
    """(upper fitness-level bound, lower drift bound) on the expected runtime."""
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    pds = [mixed_pd(n, d, p) for d in range(1, n + 1)]
    upper = math.inf if min(pds) == 0 else sum(1.0 / v for v in pds)
    lower = sum(1.0 / mixed_hd(n, d, p) for d in range(3, n + 1))
    return OracleValue(upper, CLOSED_FORM), OracleValue(lower, CLOSED_FORM)


# -- minimum spanning trees ------------------------------------------------------------------

def kruskal_reference(g: GraphInstance) -> OracleValue:
    uf = _UnionFind(g.n_vertices)
    total = 0
    for u, v, w in sorted(g.edges.tolist(), key=lambda e: e[2]):
        if uf.union(u, v):
            total += w
    if uf.count != 1:
        raise ValueError("graph is not connected")
    return OracleValue(float(total), EXHAUSTIVE, "kruskal")


# -- fitness levels ----------------------------------------------------------------------------

def fitness_level_bound(probs) -> OracleValue:
    probs = np.asarray(probs, dtype=float)
    if np.any(probs < 0) or np.any(probs > 1):
        raise ValueError("probabilities must lie in [0, 1]")
    if np.any(probs == 0):
        return OracleValue(math.inf, CLOSED_FORM)
    return OracleValue(float(np.sum(1.0 / probs)), CLOSED_FORM)


def doubling_parallel_bound(n: int) -> OracleValue:
    """Fitness-level bound on the generations of the (1+{2lambda,1}) EA on OneMax."""
    total = sum(math.log(2 * math.e * n / (n - i)) for i in range(1, n))
    return OracleValue(2 * total, CLOSED_FORM)


# -- absorbing Markov chains --------------------------------------------------------------------

def all_bitstrings(n: int) -> np.ndarray:
    """Row s holds the bits of s (bit i of the index is x_i)."""
    idx = np.arange(2 ** n)
    return ((idx[:, None] >> np.arange(n)) & 1).astype(np.uint8)


def _hamming_table(n):
    idx = np.arange(2 ** n)
    x = idx[:, None] ^ idx[None, :]
    h = np.zeros_like(x)
    for b in range(n):
        h += (x >> b) & 1
    return h


def mutation_matrix_standard(n: int, p: float) -> np.ndarray:
    h = _hamming_table(n)
    return p ** h * (1 - p) ** (n - h)


def mutation_matrix_strengths(n: int, probs: dict, replacement: bool = False) -> np.ndarray:
    """Offspring distribution of 'flip k bits with probability probs[k]'.

    With ``replacement`` the k positions are drawn independently (k <= 2).
    """
    h = _hamming_table(n)
    m = np.zeros(h.shape)
    for k, pk in probs.items():
        if pk == 0:
            continue
        if not replacement or k == 1:
            m += pk * (h == k) / math.comb(n, k)
        elif k == 2:
            m += pk * ((h == 0) / n + (h == 2) * 2.0 / (n * n))
        else:
            raise ValueError("with-replacement flips supported for k <= 2")
    return m


def elitist_kernel(values, mutation: np.ndarray, maximize: bool = True) -> np.ndarray:
    """Transition matrix of 'mutate, keep the offspring if not worse'."""
    v = np.asarray(values, dtype=float)
    if not maximize:
        v = -v
    ok = v[None, :] >= v[:, None]
    t = np.where(ok, mutation, 0.0)
    np.fill_diagonal(t, 0.0)
    np.fill_diagonal(t, 1.0 - t.sum(axis=1))
    return t


def brute_force_hitting_time(values, kernel: np.ndarray, maximize: bool = True) -> OracleValue:
    """Expected iterations until an optimal state, from a uniform random start."""
    v = np.asarray(values, dtype=float)
    kernel = np.asarray(kernel, dtype=float)
    size = v.size
    if size > 2 ** 12:
        raise ValueError("state space too large (n <= 12)")
    if kernel.shape != (size, size):
        raise ValueError("kernel shape does not match the state space")
    if np.any(kernel < -1e-15) or np.max(np.abs(kernel.sum(axis=1) - 1)) > 1e-12:
        raise ValueError("kernel is not row-stochastic")
    target = v.max() if maximize else v.min()
    absorbing = v == target
    transient = np.flatnonzero(~absorbing)
    if transient.size == 0:
        return OracleValue(0.0, LINEAR_SOLVE)
    # states from which an optimum can be reached at all
    reach = absorbing.copy()
    positive = kernel > 0
    while True:
        grown = reach | positive[:, reach].any(axis=1)
        if np.array_equal(grown, reach):
            break
        reach = grown
    if not reach.all():
        return OracleValue(math.inf, LINEAR_SOLVE, "non-absorbing")
    q = kernel[np.ix_(transient, transient)]
    t = np.linalg.solve(np.eye(transient.size) - q, np.ones(transient.size))
    return OracleValue(float(t.sum() / size), LINEAR_SOLVE)


def problem_values(problem) -> np.ndarray:
    """Fitness of all 2^n bit strings of a small problem (uncounted)."""
    return np.array([problem.value(x) for x in all_bitstrings(problem.n)], dtype=float)
