"""Named reproduction experiments with pass/fail verdicts.

Each experiment runs at its stated scale and tolerance; nothing is scaled
down.  ``run_criterion(name)`` returns a :class:`CriterionResult` whose
``checks`` list every individual comparison.
"""
from __future__ import annotations

import itertools
import math
import os
import tempfile
import time
from dataclasses import dataclass, field

import numpy as np

from .. import algorithms as alg
from .. import oracles as orc
from ..problems import (LeadingOnes, MinimumSpanningTree, OneMax, Plateau, RValuedOneMax,
                        gen_connected_triangles)
from ..rng import RandomSource
from .csvio import emit_csv, read_csv
from .experiment import RunRecord
from .stats import compare_to_oracle, summarize


@dataclass
class Check:
    name: str
    passed: bool
    detail: str


@dataclass
class CriterionResult:
    number: int
    name: str
    checks: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    def add(self, name, passed, detail):
        self.checks.append(Check(name, bool(passed), detail))

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"[{verdict}] #{self.number:<2d} {self.name} ({self.seconds:.1f}s)"

    def report(self) -> str:
        rows = [self.line()]
        for c in self.checks:
            rows.append(f"    {'ok ' if c.passed else 'BAD'} {c.name}: {c.detail}")
        return "\n".join(rows)


def _many(fn, runs, seed, first_stream=0):
    return [fn(RandomSource(seed, first_stream + i)) for i in range(runs)]


def _mean(outs, field="evaluations"):
    return float(np.mean([getattr(o, field) for o in outs]))


def _band(value, lo, hi):
    return lo <= value <= hi


# -- 1 ------------------------------------------------------------------------------------------

def rls_lo_baseline(res, seed):
    n, runs = 500, 200
    outs = _many(lambda r: alg.run_rls(LeadingOnes(n), alg.FixedStrength(1), 100 * n * n, r), runs, seed)
    cmp = compare_to_oracle(summarize(outs, "generations"), n * n / 2, 0.05)
    res.add("mean iterations vs n^2/2 (5%)", cmp.passed, str(cmp))
    res.add("all runs succeed", all(o.success for o in outs), f"{sum(o.success for o in outs)}/{runs}")


# -- 2 ------------------------------------------------------------------------------------------

def lo_closed_form(res, seed):
    n, runs = 100, 500
    means = {}
    for i, c in enumerate((1.0, 1.59)):
        p = c / n
        outs = _many(lambda r: alg.run_one_plus_one(LeadingOnes(n), alg.StaticRate(p), 100 * n * n, r),
                     runs, seed, i * runs)
        stats = summarize(outs, "generations")
        cmp = compare_to_oracle(stats, orc.lo_expected_time(n, p), 0.05)
        res.add(f"p={c}/n mean vs closed form (5%)", cmp.passed, str(cmp))
        means[c] = stats.mean
    ratio = means[1.59] / means[1.0]
    res.add("ratio best-static / standard in [0.85, 0.93]", _band(ratio, 0.85, 0.93), f"{ratio:.4f}")


# -- 3 ------------------------------------------------------------------------------------------

def lo_fitness_dependent(res, seed):
    n, runs = 500, 300
    outs = _many(lambda r: alg.run_one_plus_one(LeadingOnes(n), alg.LeadingOnesFitnessRate(),
                                                100 * n * n, r), runs, seed)
    v = _mean(outs) / n ** 2
    res.add("mean/n^2 in [0.63, 0.73]", _band(v, 0.63, 0.73), f"{v:.4f}")


# -- 4 ------------------------------------------------------------------------------------------

def _first_hits(rows, levels):
    """Per-run first-hit evaluations for each level, from fixed-target rows."""
    per_run = {}
    for row in rows:
        per_run.setdefault(int(row["run_id"]), []).append((float(row["fitness"]), int(row["first_hit_evaluations"])))
    hits = {}
    for rid, pts in per_run.items():
        out = []
        for lev in levels:
            out.append(next((e for f, e in pts if f >= lev), None))
        hits[rid] = out
    return hits


def adaptive_rls_lo(res, seed):
    n, runs = 1000, 200
    upper = int(0.8 * n)
    records, rid = [], 0
    groups = {}
    configs = [("rls-1", alg.FixedStrength(1), None), ("rls-2", alg.FixedStrength(2), upper),
               ("rls-3", alg.FixedStrength(3), upper),
               ("best-of-123", alg.best_of_set_strengths(n, (1, 2, 3)), None)]
    for name, pol, target in configs:
        ids = []
        for i in range(runs):
            o = alg.run_rls(LeadingOnes(n), pol, 100 * n * n, RandomSource(seed, rid), target=target)
            records.append(RunRecord(rid, n, "leadingones", name, o))
            ids.append(rid)
            rid += 1
        groups[name] = ids
    with tempfile.TemporaryDirectory() as tmp:
        path = emit_csv(records, "fixed-target", tmp)
        rows = read_csv(path)
    by_id = {r.run_id: r.outcome for r in records}
    m1 = np.mean([by_id[i].evaluations for i in groups["rls-1"]])
    mb = np.mean([by_id[i].evaluations for i in groups["best-of-123"]])
    ratio = mb / m1
    res.add("best-of-{1,2,3} / 1-bit mean in [0.75, 0.85]", _band(ratio, 0.75, 0.85), f"{ratio:.4f}")
    dp = orc.lo_fixed_target_dp(n, (1, 2, 3))
    for name, ref in (("rls-1", dp.total(1)), ("best-of-123", dp.total())):
        mean = np.mean([by_id[i].generations for i in groups[name]])
        err = abs(mean - ref) / ref
        res.add(f"{name} total vs level DP (5%)", err <= 0.05, f"mean={mean:.6g} dp={ref:.6g} rel.err={err:.4f}")
    low = [int(n * x / 100) for x in range(5, 51, 5)]
    high = [int(n * x / 100) for x in range(50, 81, 10)]
    levels = sorted(set(low + high))
    hits = _first_hits(rows, levels)
    curve = {}
    for name in ("rls-1", "rls-2", "rls-3"):
        arr = np.array([hits[i] for i in groups[name]], dtype=float)
        curve[name] = dict(zip(levels, arr.mean(axis=0)))
    bad = [lev for lev in low if min(curve, key=lambda k: curve[k][lev]) != "rls-3"]
    res.add("3-bit curve lowest at every target <= n/2", not bad,
            "violations at " + (", ".join(map(str, bad)) if bad else "none"))
    bad = []
    for a, b in zip(high, high[1:]):
        slopes = {k: curve[k][b] - curve[k][a] for k in curve}
        if min(slopes, key=slopes.get) != "rls-1":
            bad.append(f"[{a},{b}]")
    res.add("1-bit curve has the smallest slope on every window above n/2", not bad,
            "violations at " + (", ".join(bad) if bad else "none"))


# -- 5 ------------------------------------------------------------------------------------------

CLASSIC_MECHANISMS = ("simple-random", "greedy", "permutation", "random-gradient")


def hh_constants(res, seed):
    n, runs = 1000, 200
    means = {}
    for j, mech in enumerate(CLASSIC_MECHANISMS + ("grg",)):
        tau = 10 * n if mech == "grg" else None
        outs = _many(lambda r: alg.run_single_point_hh(LeadingOnes(n), mech, (1, 2), 100 * n * n, r,
                                                       tau=tau, replacement=True), runs, seed, j * runs)
        means[mech] = _mean(outs) / n ** 2
    for mech in CLASSIC_MECHANISMS:
        res.add(f"{mech} mean/n^2 in [0.52, 0.58]", _band(means[mech], 0.52, 0.58), f"{means[mech]:.4f}")
    g = means["grg"]
    res.add("grg (tau=10n) mean/n^2 in [0.41, 0.47]", _band(g, 0.41, 0.47), f"{g:.4f}")
    res.add("grg below every classic mechanism", all(g < means[m] for m in CLASSIC_MECHANISMS),
            ", ".join(f"{m}={means[m]:.4f}" for m in CLASSIC_MECHANISMS))


# -- 6 ------------------------------------------------------------------------------------------

def drift_max_om(res, seed):
    n, runs = 10000, 100
    dm = alg.drift_max_strengths(n)
    a = _many(lambda r: alg.run_rls(OneMax(n), dm, 100 * n * n, r), runs, seed)
    b = _many(lambda r: alg.run_rls(OneMax(n), alg.FixedStrength(1), 100 * n * n, r), runs, seed, runs)
    ratio = _mean(a) / _mean(b)
    res.add("drift-max / 1-bit mean <= 0.995", ratio <= 0.995, f"{ratio:.4f}")
    budget = int(0.2675 * n * 4)
    a = _many(lambda r: alg.run_rls(OneMax(n), dm, budget, r), runs, seed, 2 * runs)
    b = _many(lambda r: alg.run_rls(OneMax(n), alg.FixedStrength(1), budget, r), runs, seed, 3 * runs)
    da = np.mean([n - o.best_fitness for o in a])
    db = np.mean([n - o.best_fitness for o in b])
    res.add(f"fixed budget {budget}: distance ratio <= 0.93", da <= 0.93 * db,
            f"drift-max={da:.1f} rls={db:.1f} ratio={da / db:.4f}")


# -- 7 ------------------------------------------------------------------------------------------

def ga_linear(res, seed):
    runs = 100
    stream = 0
    for label, pol in (("one-fifth (F=1.5)", alg.OneFifthLambda(1.5)), ("fitness-dependent", alg.FitnessLambda())):
        per_n = {}
        for n in (500, 1000, 2000):
            outs = _many(lambda r: alg.run_ollga(OneMax(n), pol, 100 * n * n, r), runs, seed, stream)
            stream += runs
            per_n[n] = _mean(outs) / n
        spread = max(per_n.values()) / min(per_n.values()) - 1
        res.add(f"{label}: evaluations/n spread < 15%", spread < 0.15,
                ", ".join(f"n={k}: {v:.3f}" for k, v in per_n.items()) + f"; spread={spread:.4f}")


# -- 8 ------------------------------------------------------------------------------------------

def two_rate_caps(res, seed):
    n, lam, runs = 5000, 64, 50
    two = _many(lambda r: alg.run_one_plus_lambda(OneMax(n), alg.StaticLambda(lam), alg.TwoRate(),
                                                  100 * n * n, r, trace_stride=1), runs, seed)
    fit = _many(lambda r: alg.run_one_plus_lambda(OneMax(n), alg.StaticLambda(lam),
                                                  alg.OnePlusLambdaFitnessRate(), 100 * n * n, r),
                runs, seed, runs)
    lo = min(v for o in two for _, v in o.parameter_trace)
    hi = max(v for o in two for _, v in o.parameter_trace)
    complete = all(len(o.parameter_trace) == o.generations for o in two)
    res.add("r within [2, n/4] at every generation", complete and lo >= 2 and hi <= n / 4,
            f"min r={lo}, max r={hi}, traced every generation={complete}")
    ratio = _mean(two) / _mean(fit)
    res.add("2-rate / fitness-dependent mean within factor 2", 0.5 <= ratio <= 2, f"{ratio:.4f}")


# -- 9 ------------------------------------------------------------------------------------------

def parity_trap(res, seed):
    n, gens = 100, 10 ** 5
    x0 = np.ones(n, dtype=np.uint8)
    x0[:7] = 0                       # distance 7
    out = alg.run_rls(OneMax(n), alg.MixedStrengths((1, 2), (0.0, 1.0)), gens + 1,
                      RandomSource(seed, 0), x0=x0)
    parities = {(n - v) % 2 for v, _ in out.fixed_target_trace} | {int(n - out.final.sum()) % 2}
    res.add("distance parity constant over 1e5 generations",
            out.generations == gens and parities == {1} and not out.success,
            f"generations={out.generations}, parities seen={sorted(parities)}, success={out.success}")
    m = 8
    kernel = orc.elitist_kernel(orc.problem_values(OneMax(m)), orc.mutation_matrix_strengths(m, {2: 1.0}))
    ht = orc.brute_force_hitting_time(orc.problem_values(OneMax(m)), kernel)
    res.add("exact chain flags non-absorbing", math.isinf(ht.value) and ht.note == "non-absorbing", str(ht))


# -- 10 -----------------------------------------------------------------------------------------

def mst_mixing(res, seed):
    t, runs = 5, 50
    g = gen_connected_triangles(t, (1, 1, 2))
    opt = orc.kruskal_reference(g).value
    budget = int(10 * g.m ** 2 * math.log(g.n_vertices * g.w_max))
    outs = _many(lambda r: alg.run_rls(MinimumSpanningTree(g), alg.MixedStrengths((1, 2), (0.5, 0.5)),
                                       budget, r, target=opt), runs, seed)
    hits = sum(o.success and o.best_fitness == opt for o in outs)
    res.add(f"p=1/2 reaches weight {opt:g} within {budget} evaluations", hits == runs, f"{hits}/{runs}")
    # planted spanning tree: heavy edge plus the first light edge of every triangle
    x0 = np.zeros(g.m, dtype=np.uint8)
    for i in range(t):
        x0[3 * i] = 1
        x0[3 * i + 2] = 1
    prob = MinimumSpanningTree(g)
    start = prob.value(x0)
    out = alg.run_rls(prob, alg.MixedStrengths((1, 2), (1.0, 0.0)), 10 ** 5 + 1, RandomSource(seed, runs), x0=x0)
    res.add("p=1 from a planted non-minimal tree never improves",
            start > opt and out.generations == 10 ** 5 and len(out.fixed_target_trace) == 1,
            f"start={start}, optimum={opt:g}, best={out.best_fitness}, generations={out.generations}")


# -- 11 -----------------------------------------------------------------------------------------

def _exhaustive_drift(n, f, ell):
    total = 0
    count = 0
    for flips in itertools.combinations(range(n), ell):
        zeros = sum(1 for p in flips if p >= f)      # x = 1^f 0^(n-f)
        total += max(0, 2 * zeros - ell)
        count += 1
    return total / count


def oracle_cross(res, seed):
    n, runs = 8, 10 ** 5
    vals = orc.problem_values(OneMax(n))
    ht = orc.brute_force_hitting_time(vals, orc.elitist_kernel(vals, orc.mutation_matrix_standard(n, 1 / n)))
    mc = _mean(_many(lambda r: alg.run_one_plus_one(OneMax(n), None, 10 ** 7, r), runs, seed), "generations")
    err = abs(mc - ht.value) / ht.value
    res.add("(1+1) EA OneMax n=8: exact chain vs 1e5 runs (1%)", err <= 0.01,
            f"exact={ht.value:.6f} mc={mc:.6f} rel.err={err:.5f}")
    bad = [m for m in (10, 100, 1000, 5000) if orc.lo_fixed_target_dp(m, (1,)).total(1) != m * m / 2]
    res.add("level DP with k=1 equals n^2/2 exactly", not bad, f"mismatches: {bad or 'none'}")
    worst = 0.0
    for m in range(1, 13):
        for f in range(m + 1):
            for ell in range(1, m + 1):
                ref = _exhaustive_drift(m, f, ell)
                worst = max(worst, abs(orc.onemax_drift(m, f, ell).value - ref),
                            abs(orc.onemax_drift_fast(m, f, ell) - ref))
    res.add("drift formula vs enumeration, n <= 12 (1e-12)", worst <= 1e-12, f"max abs diff={worst:.3g}")


# -- 12 -----------------------------------------------------------------------------------------

def eps_greedy(res, seed):
    n, runs = 5000, 100
    pol = alg.EpsilonGreedy(10, n ** -0.01, n ** -0.99)
    a = _many(lambda r: alg.run_rls(OneMax(n), pol, 100 * n * n, r), runs, seed)
    b = _many(lambda r: alg.run_rls(OneMax(n), alg.drift_max_strengths(n), 100 * n * n, r), runs, seed, runs)
    ma, mb = _mean(a), _mean(b)
    err = abs(ma - mb) / mb
    res.add("eps-greedy mean within 3% of drift-max mean", err <= 0.03,
            f"eps-greedy={ma:.6g} drift-max={mb:.6g} rel.diff={err:.4f}")


# -- 13 -----------------------------------------------------------------------------------------

def om_leading_constant(res, seed):
    n, runs = 2000, 300
    outs = _many(lambda r: alg.run_one_plus_one(OneMax(n), None, 100 * n * n, r), runs, seed)
    v = _mean(outs) / (n * math.log(n))
    res.add("mean/(n ln n) in [2.3, 2.9]", _band(v, 2.3, 2.9), f"{v:.4f}")


# -- 14 -----------------------------------------------------------------------------------------

def rvalued_rls(res, seed):
    n, r, runs = 200, 64, 100
    A, b = 1.7, 0.9
    ok = 2 * A * b - b - A > 0 and A + b > 2 and A * A * b > 1
    res.add("A=1.7, b=0.9 satisfy the parameter constraints", ok, f"2Ab-b-A={2 * A * b - b - A:.3f}")
    budget = int(50 * n * (math.log(n) + math.log(r)))
    for mode in (1, 2, 3):
        outs = []
        for i in range(runs):
            rng = RandomSource(seed, (mode - 1) * runs + i)
            z = [rng.integer(r) for _ in range(n)]
            outs.append(alg.run_rls(RValuedOneMax(z, r, mode), alg.VelocityStep(A, b), budget, rng))
        wins = sum(o.success for o in outs)
        vmin = min(o.extras["velocity_min"] for o in outs)
        vmax = max(o.extras["velocity_max"] for o in outs)
        res.add(f"mode {mode}: all runs succeed within {budget}", wins == runs,
                f"{wins}/{runs}, mean evaluations={_mean(outs):.0f}")
        res.add(f"mode {mode}: velocities within [1, {r // 4}]", vmin >= 1 and vmax <= r // 4,
                f"[{vmin:.3f}, {vmax:.3f}]")


# -- 15 -----------------------------------------------------------------------------------------

def plateau_mixing(res, seed):
    n, k, runs = 60, 3, 200
    N = sum(math.comb(n, i) for i in range(1, k + 1))
    means = []
    for j, probs in enumerate(((1 / 3, 1 / 3, 1 / 3), (0.6, 0.3, 0.1))):
        outs = _many(lambda r: alg.run_rls(Plateau(n, k), alg.MixedStrengths((1, 2, 3), probs), 10 ** 8, r),
                     runs, seed, j * runs)
        m = _mean(outs)
        means.append(m)
        res.add(f"p={tuple(round(p, 3) for p in probs)} within 25% of N={N}", abs(m - N) / N <= 0.25,
                f"mean={m:.0f} ratio={m / N:.4f}")
    diff = abs(means[0] - means[1]) / min(means)
    res.add("the two means within 15% of each other", diff <= 0.15, f"{diff:.4f}")


CRITERIA = {
    "rls-lo-baseline": (1, rls_lo_baseline),
    "lo-closed-form": (2, lo_closed_form),
    "lo-fitness-dependent": (3, lo_fitness_dependent),
    "fig1-adaptive-rls": (4, adaptive_rls_lo),
    "hh-constants": (5, hh_constants),
    "drift-max-om": (6, drift_max_om),
    "ga-linear": (7, ga_linear),
    "two-rate-caps": (8, two_rate_caps),
    "parity-trap": (9, parity_trap),
    "mst-mixing": (10, mst_mixing),
    "oracle-cross": (11, oracle_cross),
    "eps-greedy": (12, eps_greedy),
    "om-leading-constant": (13, om_leading_constant),
    "rvalued-rls": (14, rvalued_rls),
    "plateau-mixing": (15, plateau_mixing),
}

ACCEPTANCE_SEED = int(os.environ.get("PARAMCTL_ACCEPTANCE_SEED", "20240"))


def run_criterion(name: str, seed: int | None = None) -> CriterionResult:
    if name not in CRITERIA:
        raise KeyError(f"unknown criterion {name!r}; valid: {', '.join(CRITERIA)}")
    number, fn = CRITERIA[name]
    res = CriterionResult(number, name)
    t0 = time.perf_counter()
    fn(res, ACCEPTANCE_SEED + number if seed is None else seed)
    res.seconds = time.perf_counter() - t0
    return res
