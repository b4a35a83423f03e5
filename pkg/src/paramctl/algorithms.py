"""Budgeted run loops for the parameter-control algorithms.

Every ``run_*`` function takes a problem, its control policy, an evaluation
budget and a :class:`RandomSource`, and returns a :class:`RunOutcome`.

Budget semantics: the budget counts evaluations including the initial one;
a generation that starts below the budget is always completed.

Elitist single-trajectory loops are dispatched to the compiled kernels when
the problem is an agreement-vector function (OneMax, LeadingOnes, Plateau,
Jump) and to the Python loops otherwise.  ``engine`` overrides the choice:
``"kernel"`` (compiled if available), ``"python"`` (Python twin of the kernel)
or ``"generic"`` (full re-evaluation through ``problem.value``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import _pykernels as pk
from . import controllers as ctl
from .backend import kernels as default_kernels
from .oracles import DriftMaxTable, lo_fixed_target_dp
from .operators import standard_bit_mutation
from .problems import (LeadingOnes, Negated, OneMax, Problem, RValuedOneMax,
                       _AgreementProblem)
from .rng import RandomSource


@dataclass
class RunOutcome:
    evaluations: int
    generations: int
    best_fitness: float
    success: bool
    fixed_target_trace: list = field(default_factory=list)
    parameter_trace: list = field(default_factory=list)
    seed: int = 0
    stream: int = 0
    parameter: str = ""
    extras: dict = field(default_factory=dict)
    final: np.ndarray | None = field(default=None, repr=False, compare=False)

    def first_hit(self, level) -> int | None:
        """Evaluations until a fitness at least as good as ``level``."""
        for value, evals in self.fixed_target_trace:
            if (value >= level) if self.extras.get("maximize", True) else (value <= level):
                return evals
        return None


# -- policies -----------------------------------------------------------------------

@dataclass(frozen=True)
class StaticRate:
    """Standard bit mutation with rate p (default c/n)."""
    p: float | None = None
    c: float = 1.0

    def rate(self, n):
        return self.c / n if self.p is None else self.p


@dataclass(frozen=True)
class TimeDependentRate:
    pass


@dataclass(frozen=True)
class LeadingOnesFitnessRate:
    pass


@dataclass(frozen=True)
class OnePlusLambdaFitnessRate:
    pass


@dataclass(frozen=True)
class TwoRate:
    r_init: float = 2.0


@dataclass(frozen=True)
class SelfAdaptiveRate:
    r_init: float = 2.0
    factor: float = 2.0
    lo: float = 2.0
    hi: float | None = None        # default n/4


@dataclass(frozen=True)
class StaticLambda:
    lam: float = 1


@dataclass(frozen=True)
class DoublingLambda:
    scheme: str = "reset"          # reset | halve | jansen
    counting: str = "strict"       # strict | weak
    lam_init: int = 1
    cap: int = 0                   # 0 = unbounded


@dataclass(frozen=True)
class FitnessLambda:
    pass


@dataclass(frozen=True)
class OneFifthLambda:
    F: float = 1.5
    lam_init: float = 1.0


@dataclass(frozen=True)
class FixedStrength:
    k: int = 1


@dataclass(frozen=True)
class StrengthTable:
    """Strength chosen by the current fitness: table[f], or fill(f) on demand."""
    table: np.ndarray | None = None
    fill: Callable | None = None
    name: str = "table"


@dataclass(frozen=True)
class MixedStrengths:
    strengths: tuple = (1, 2)
    probs: tuple = (0.5, 0.5)


@dataclass(frozen=True)
class EpsilonGreedy:
    k: int = 10
    eps: float = 0.1
    delta: float = 0.1


@dataclass(frozen=True)
class BanditStrengths:
    """Operator selection by probability matching, adaptive pursuit or UCB."""
    strengths: tuple = (1, 2, 3)
    rule: str = "pm"               # pm | ap | ucb
    p_min: float = 0.05
    alpha: float = 0.3
    beta: float = 0.3
    c_ucb: float = 1.0
    window: int | None = 50


@dataclass(frozen=True)
class VelocityStep:
    """Per-coordinate velocities for integer strings."""
    A: float = 1.7
    b: float = 0.9
    v_init: float = 1.0


@dataclass(frozen=True)
class ConstantTemperature:
    T: float


@dataclass(frozen=True)
class MultiplicativeCooling:
    T1: float
    alpha: float


@dataclass(frozen=True)
class StepwiseCooling:
    T1: float
    alpha: float
    tau: int


def best_of_set_strengths(n, strengths=(1, 2, 3)) -> StrengthTable:
    """Per-level best strength for LeadingOnes from the fixed-target DP."""
    dp = lo_fixed_target_dp(n, strengths)
    table = np.append(dp.best_strength, dp.best_strength[-1]).astype(np.int64)
    return StrengthTable(table=table, name="best-of-" + "".join(str(k) for k in dp.strengths))


def drift_max_strengths(n) -> StrengthTable:
    shared = DriftMaxTable(n)
    return StrengthTable(table=shared.table, fill=shared.fill, name="drift-max")


# -- plumbing ---------------------------------------------------------------------------

def _check_budget(budget):
    if budget is None or budget < 1:
        raise ValueError("budget must be at least 1")
    return int(budget)


def _kernels(engine):
    if engine in ("auto", "kernel"):
        return default_kernels
    if engine == "python":
        return pk
    raise ValueError(f"unknown engine {engine!r}")


class _Run:
    """Shared set-up: initial point, target, state and result assembly."""

    def __init__(self, problem: Problem, rng: RandomSource, x0, target, engine, stride):
        if engine not in ("auto", "kernel", "python", "generic"):
            raise ValueError(f"unknown engine {engine!r}")
        self.problem = problem
        self.rng = rng
        self.sign = problem.sign()
        self.x0 = problem.random_genotype(rng) if x0 is None else np.array(x0)
        if self.x0.size != problem.n:
            raise ValueError("initial genotype has the wrong length")
        native = problem.optimum_value if target is None else target
        self.target_native = native
        self.target = self.sign * native
        self.stride = int(stride or 0)
        self.engine = engine
        self.use_kernel = engine != "generic" and isinstance(problem, _AgreementProblem)
        self.kind = problem.kernel() if self.use_kernel else None

    def agreement(self):
        return np.ascontiguousarray(self.problem.agreement(self.x0), dtype=np.uint8)

    def state(self):
        if self.use_kernel:
            kind, k = self.kind
            return pk.AgreementState(kind, k, self.agreement())
        return pk.GenericState(self.problem, self.x0)

    def genotype_of(self, state):
        if isinstance(state, pk.AgreementState):
            return self.problem.from_agreement(state.array())
        return state.x.copy()

    def outcome(self, evals, gens, best, trace, ptrace, parameter, final=None, **extras):
        s = self.sign
        self.problem.evaluations += evals
        extras["maximize"] = self.problem.maximize
        return RunOutcome(
            evaluations=int(evals), generations=int(gens),
            best_fitness=_native(s * best), success=bool(best >= self.target),
            fixed_target_trace=[(_native(s * v), int(e)) for v, e in trace],
            parameter_trace=[(int(g), _native(v)) for g, v in ptrace],
            seed=self.rng.master_seed, stream=self.rng.stream_id,
            parameter=parameter, extras=extras, final=final)


def _native(v):
    if isinstance(v, (int, np.integer)):
        return int(v)
    v = float(v)
    return int(v) if v.is_integer() and abs(v) < 2 ** 53 else v


def _require_onemax(problem, what):
    if not isinstance(problem, OneMax):
        raise ValueError(f"{what} is defined for OneMax only")


# -- (1+1) and (1+lambda) EA ------------------------------------------------------------

def run_one_plus_lambda(problem: Problem, lambda_policy=None, rate_policy=None, budget=None,
                        rng: RandomSource | None = None, *, x0=None, target=None,
                        trace_stride=0, engine="auto") -> RunOutcome:
    budget = _check_budget(budget)
    lambda_policy = lambda_policy or StaticLambda(1)
    rate_policy = rate_policy or StaticRate()
    n = problem.n
    lam_ctl, counting, lam_cap = pk.LAM_STATIC, pk.COUNT_STRICT, 0
    if isinstance(lambda_policy, StaticLambda):
        lam = int(lambda_policy.lam)
        parameter = "lambda"
    elif isinstance(lambda_policy, DoublingLambda):
        lam = int(lambda_policy.lam_init)
        lam_ctl = {"reset": pk.LAM_RESET, "halve": pk.LAM_HALVE, "jansen": pk.LAM_JANSEN}.get(lambda_policy.scheme)
        if lam_ctl is None:
            raise ValueError(f"unknown doubling scheme {lambda_policy.scheme!r}")
        if lambda_policy.counting not in ("strict", "weak"):
            raise ValueError("counting must be 'strict' or 'weak'")
        counting = pk.COUNT_STRICT if lambda_policy.counting == "strict" else pk.COUNT_WEAK
        lam_cap = int(lambda_policy.cap)
    else:
        raise ValueError(f"unsupported lambda policy {lambda_policy!r}")
    if lam < 1:
        raise ValueError("lambda must be at least 1")
    p, r_init, factor, r_lo, r_hi = 0.0, 0.0, 2.0, 0.0, 0.0
    if isinstance(rate_policy, StaticRate):
        rate_ctl, p = pk.RATE_STATIC, rate_policy.rate(n)
        if not 0 <= p <= 1:
            raise ValueError("mutation rate must lie in [0, 1]")
        name = "p"
    elif isinstance(rate_policy, TimeDependentRate):
        rate_ctl, name = pk.RATE_TIME, "p"
    elif isinstance(rate_policy, LeadingOnesFitnessRate):
        if not isinstance(problem, _AgreementProblem) and not problem.maximize:
            raise ValueError("fitness-dependent rate needs a maximization problem")
        rate_ctl, name = pk.RATE_LO, "p"
    elif isinstance(rate_policy, OnePlusLambdaFitnessRate):
        _require_onemax(problem, "the fitness-dependent (1+lambda) rate")
        rate_ctl, name = pk.RATE_OPL, "p"
    elif isinstance(rate_policy, TwoRate):
        if lam < 2 or lam % 2 or lam_ctl != pk.LAM_STATIC:
            raise ValueError("two-rate control needs a static, even lambda >= 2")
        ctl.TwoRateState(float(rate_policy.r_init), n)     # validates caps
        rate_ctl, r_init, name = pk.RATE_TWO, float(rate_policy.r_init), "r"
    elif isinstance(rate_policy, SelfAdaptiveRate):
        r_hi = n / 4 if rate_policy.hi is None else float(rate_policy.hi)
        r_lo, factor, r_init = float(rate_policy.lo), float(rate_policy.factor), float(rate_policy.r_init)
        if factor < 2 or not 0 < r_lo <= r_init <= r_hi or r_hi > n:
            raise ValueError("self-adaptive rate needs factor >= 2 and lo <= r_init <= hi <= n")
        rate_ctl, name = pk.RATE_SELF, "r"
    else:
        raise ValueError(f"unsupported rate policy {rate_policy!r}")
    if lam_ctl != pk.LAM_STATIC:
        name = "lambda"
    run = _Run(problem, rng, x0, target, engine, trace_stride)
    args = (budget, run.target, lam, lam_ctl, counting, rate_ctl, p, r_init, factor,
            r_lo, r_hi, lam_cap, run.stride)
    if run.use_kernel and engine != "python":
        kind, k = run.kind
        a = run.agreement()
        res = _kernels(engine).ea_run(rng, kind, k, a, *args)
        final = problem.from_agreement(a)
    else:
        st = run.state()
        res = pk._ea_loop(st, rng, *args)
        final = run.genotype_of(st)
    return run.outcome(*res, parameter=name, final=final)


def run_one_plus_one(problem: Problem, rate_policy=None, budget=None, rng=None, **kw) -> RunOutcome:
    return run_one_plus_lambda(problem, StaticLambda(1), rate_policy, budget, rng, **kw)


# -- RLS ---------------------------------------------------------------------------------

def run_rls(problem: Problem, strength_policy=None, budget=None, rng: RandomSource | None = None,
            *, x0=None, target=None, trace_stride=0, engine="auto",
            replacement=False) -> RunOutcome:
    """Randomized local search with a strength policy.

    ``replacement`` draws multi-bit flip positions independently instead of
    distinct positions.  With ``VelocityStep`` the problem must be an
    r-valued OneMax and the per-coordinate velocity rule is used.
    """
    budget = _check_budget(budget)
    strength_policy = strength_policy or FixedStrength(1)
    if isinstance(strength_policy, VelocityStep):
        return _run_velocity_rls(problem, strength_policy, budget, rng, x0, target, trace_stride, engine)
    if isinstance(strength_policy, BanditStrengths):
        return _run_bandit_rls(problem, strength_policy, budget, rng, x0, target, trace_stride,
                               engine, replacement)
    n = problem.n
    k, strengths, cum, table, fill = 1, [1], [1.0], None, None
    eps = delta = 0.0
    if isinstance(strength_policy, FixedStrength):
        sctl, k = pk.STR_FIXED, int(strength_policy.k)
        if not 0 <= k <= n:
            raise ValueError(f"strength k={k} outside [0, {n}]")
    elif isinstance(strength_policy, StrengthTable):
        if not isinstance(problem, (OneMax, LeadingOnes)):
            raise ValueError("fitness-indexed strengths need OneMax or LeadingOnes")
        sctl = pk.STR_TABLE
        table = strength_policy.table
        if table is None:
            table = np.full(n + 1, -1, dtype=np.int64)
        if table.shape != (n + 1,) or table.dtype != np.int64:
            raise ValueError("strength table must be an int64 array of length n+1")
        fill = strength_policy.fill
        if fill is None and np.any(table[:n] < 0):
            raise ValueError("incomplete strength table without a fill function")
    elif isinstance(strength_policy, MixedStrengths):
        sctl = pk.STR_MIXTURE
        strengths = [int(s) for s in strength_policy.strengths]
        probs = np.asarray(strength_policy.probs, dtype=float)
        if len(strengths) != probs.size or not strengths:
            raise ValueError("strengths and probabilities differ in length")
        if np.any(probs < 0) or abs(probs.sum() - 1) > 1e-12:
            raise ValueError("mixture probabilities must be a distribution")
        cum = list(np.cumsum(probs))
        cum[-1] = 1.0
    elif isinstance(strength_policy, EpsilonGreedy):
        sctl, k = pk.STR_EPS, int(strength_policy.k)
        ctl.VelocityTable(k, strength_policy.delta, strength_policy.eps)   # validates
        eps, delta = float(strength_policy.eps), float(strength_policy.delta)
    else:
        raise ValueError(f"unsupported strength policy {strength_policy!r}")
    if any(s < 0 or s > n for s in strengths) or k > n:
        raise ValueError("strengths must lie in [0, n]")
    name = getattr(strength_policy, "name", "k")
    return _rls_dispatch(problem, rng, budget, x0, target, trace_stride, engine, sctl, k,
                         strengths, cum, table, fill, eps, delta, 0, 1.0, 1, False, math.inf,
                         replacement, "k" if sctl != pk.STR_TABLE else name)


def _rls_dispatch(problem, rng, budget, x0, target, stride, engine, sctl, k, strengths, cum,
                  table, fill, eps, delta, mech, tau, sigma, adapt_tau, tau_cap, replacement,
                  parameter, **extras):
    run = _Run(problem, rng, x0, target, engine, stride)
    strengths_arr = np.asarray(strengths, dtype=np.int64)
    cum_arr = np.asarray(cum, dtype=np.float64)
    args = (budget, run.target, sctl, k, strengths_arr, cum_arr, table, fill, eps, delta,
            mech, float(tau), int(sigma), bool(adapt_tau), float(tau_cap), bool(replacement),
            run.stride)
    if run.use_kernel and engine != "python":
        kind, kp = run.kind
        a = run.agreement()
        res = _kernels(engine).rls_run(rng, kind, kp, a, *args)
        final = problem.from_agreement(a)
    else:
        st = run.state()
        res = pk._rls_loop(st, rng, *args)
        final = run.genotype_of(st)
    return run.outcome(*res, parameter=parameter, final=final, **extras)


def run_best_of_set_rls(problem: LeadingOnes, strengths=(1, 2, 3), budget=None, rng=None, **kw):
    if not isinstance(problem, LeadingOnes):
        raise ValueError("best-of-set RLS uses the LeadingOnes level oracle")
    return run_rls(problem, best_of_set_strengths(problem.n, strengths), budget, rng, **kw)


def run_single_point_hh(problem: Problem, mechanism: str, strengths=(1, 2), budget=None,
                        rng=None, *, tau=None, sigma=1, adapt_tau=False, replacement=False,
                        x0=None, target=None, trace_stride=0, engine="auto") -> RunOutcome:
    """Selection hyper-heuristic over k-bit flip operators, elitist acceptance.

    ``tau`` is the phase length of the generalized random gradient variants.
    """
    budget = _check_budget(budget)
    if mechanism not in pk.HH_NAMES:
        raise ValueError(f"unknown mechanism {mechanism!r}; choose from {', '.join(pk.HH_NAMES)}")
    strengths = [int(s) for s in strengths]
    if not strengths:
        raise ValueError("empty portfolio")
    if any(not 1 <= s <= problem.n for s in strengths):
        raise ValueError("strengths must lie in [1, n]")
    mech = pk.HH_NAMES.index(mechanism)
    n = problem.n
    if tau is None:
        tau = float(n)
    ctl.HHState(mechanism, len(strengths), tau, sigma, adapt_tau)     # validates
    return _rls_dispatch(problem, rng, budget, x0, target, trace_stride, engine, pk.STR_HH, 1,
                         strengths, [1.0], None, None, 0.0, 0.0, mech, tau, sigma, adapt_tau,
                         float(n) ** 2, replacement, "k", mechanism=mechanism)


def _run_bandit_rls(problem, policy: BanditStrengths, budget, rng, x0, target, stride, engine,
                    replacement):
    if policy.rule not in ("pm", "ap", "ucb"):
        raise ValueError(f"unknown bandit rule {policy.rule!r}")
    strengths = [int(s) for s in policy.strengths]
    if any(not 1 <= s <= problem.n for s in strengths):
        raise ValueError("strengths must lie in [1, n]")
    stats = ctl.PortfolioStats(len(strengths), policy.p_min, None, policy.alpha, policy.beta,
                               policy.c_ucb, policy.window)
    run = _Run(problem, rng, x0, target, engine, stride)
    st = run.state()
    n = st.n
    f = st.fitness
    evals, gens, best = 1, 0, f
    trace, ptrace = [(best, evals)], []
    while best < run.target and evals < budget:
        gens += 1
        i = ctl.ucb_select(stats) if policy.rule == "ucb" else stats.select(rng)
        flips = pk._positions(rng, n, strengths[i], replacement)
        fo = st.toggle_eval(flips)
        evals += 1
        gain = fo - f
        if fo >= f:
            st.accept()
            f = fo
        else:
            st.revert(flips)
        reward = ctl.normalized_reward(gain, n)
        if policy.rule == "pm":
            ctl.prob_matching(stats, i, reward)
        elif policy.rule == "ap":
            ctl.adaptive_pursuit(stats, i, reward)
        else:
            stats.record(i, reward)
        if run.stride and gens % run.stride == 0:
            ptrace.append((gens, strengths[i]))
        if f > best:
            best = f
            trace.append((best, evals))
    return run.outcome(evals, gens, best, trace, ptrace, parameter="k", final=run.genotype_of(st))


def _run_velocity_rls(problem, policy: VelocityStep, budget, rng, x0, target, stride, engine):
    if not isinstance(problem, RValuedOneMax):
        raise ValueError("velocity steps need an r-valued OneMax problem")
    A, b = float(policy.A), float(policy.b)
    if A <= 1 or not 0 < b < 1:
        raise ValueError("need A > 1 and 0 < b < 1")
    x = problem.random_genotype(rng) if x0 is None else np.array(x0, dtype=np.int64)
    x = np.ascontiguousarray(x, dtype=np.int64)
    if x.size != problem.n or x.min() < 0 or x.max() >= problem.r:
        raise ValueError("initial genotype outside [0, r-1]^n")
    tgt = problem.optimum_value if target is None else target
    mod = pk if engine in ("python", "generic") else default_kernels
    v0 = min(max(float(policy.v_init), 1.0), float(max(1, problem.r // 4)))
    evals, gens, best, trace, ptrace, vmin, vmax = mod.rab_run(
        rng, x, np.ascontiguousarray(problem.z, dtype=np.int64), problem.r, problem.mode,
        budget, float(tgt), A, b, v0, int(stride or 0))
    problem.evaluations += evals
    return RunOutcome(evals, gens, int(best), bool(best <= tgt), [(int(v), int(e)) for v, e in trace],
                      [(int(g), float(v)) for g, v in ptrace], rng.master_seed, rng.stream_id,
                      "velocity", {"maximize": False, "velocity_min": vmin, "velocity_max": vmax},
                      final=x)


# -- (1+(lambda,lambda)) GA ---------------------------------------------------------------------

def run_ollga(problem: Problem, lambda_policy=None, budget=None, rng=None, *, x0=None,
              target=None, trace_stride=0, engine="auto") -> RunOutcome:
    budget = _check_budget(budget)
    lambda_policy = lambda_policy or OneFifthLambda()
    n = problem.n
    F = 1.5
    if isinstance(lambda_policy, StaticLambda):
        lam_ctl, lam0 = pk.GA_STATIC, float(lambda_policy.lam)
        if lam0 != int(lam0) or not 1 <= lam0 <= n:
            raise ValueError("static lambda must be an integer in [1, n]")
    elif isinstance(lambda_policy, FitnessLambda):
        _require_onemax(problem, "the fitness-dependent lambda")
        lam_ctl, lam0 = pk.GA_FITNESS, 1.0
    elif isinstance(lambda_policy, OneFifthLambda):
        lam_ctl, lam0, F = pk.GA_ONE_FIFTH, float(lambda_policy.lam_init), float(lambda_policy.F)
        ctl.OneFifthState(lam0, F, 1.0, float(n))       # validates
    else:
        raise ValueError(f"unsupported lambda policy {lambda_policy!r}")
    run = _Run(problem, rng, x0, target, engine, trace_stride)
    args = (budget, run.target, lam_ctl, lam0, F, run.stride)
    if run.use_kernel and engine != "python":
        kind, k = run.kind
        a = run.agreement()
        res = _kernels(engine).ga_run(rng, kind, k, a, *args)
        final = problem.from_agreement(a)
    else:
        st = run.state()
        res = pk._ga_loop(st, rng, *args)
        final = run.genotype_of(st)
    return run.outcome(*res, parameter="lambda", final=final)


# -- self-adaptive (1,lambda) EA ------------------------------------------------------------------

def run_self_adaptive_one_comma_lambda(problem: Problem, lam: int, factor: float = 2.0, budget=None,
                                       rng=None, *, lo=2.0, hi=None, r_init=None, x0=None,
                                       target=None, trace_stride=0, engine="auto") -> RunOutcome:
    """Comma selection; every offspring carries its own rate r/n.

    Ties in fitness go to the smaller rate, then to the earlier offspring.
    The recorded best fitness is the best ever seen.
    """
    budget = _check_budget(budget)
    n = problem.n
    if lam < 2:
        raise ValueError("lambda must be at least 2")
    hi = n / 4 if hi is None else float(hi)
    r_init = float(lo) if r_init is None else float(r_init)
    if factor < 2 or lo < 2 or hi > n / 4 or not lo <= r_init <= hi:
        raise ValueError("need factor >= 2 and 2 <= lo <= r_init <= hi <= n/4")
    run = _Run(problem, rng, x0, target, engine, trace_stride)
    args = (budget, run.target, int(lam), float(factor), float(lo), hi, r_init, run.stride)
    if run.use_kernel and engine != "python":
        kind, k = run.kind
        a = run.agreement()
        res = _kernels(engine).comma_run(rng, kind, k, a, *args)
        final = problem.from_agreement(a)
    else:
        st = run.state()
        res = pk._comma_loop(st, rng, *args)
        final = run.genotype_of(st)
    evals, gens, best, trace, ptrace, r_min, r_max = res
    return run.outcome(evals, gens, best, trace, ptrace, parameter="r", final=final,
                       rate_min=r_min, rate_max=r_max)


# -- simulated annealing -------------------------------------------------------------------------------

def run_sa(problem: Problem, schedule, budget=None, rng=None, *, x0=None, target=None,
           trace_stride=0, engine="auto") -> RunOutcome:
    """One-bit neighbour; worse moves accepted with probability exp(delta/T_t).

    The loop maximizes; minimization problems are wrapped in ``Negated``.
    """
    budget = _check_budget(budget)
    if isinstance(schedule, ConstantTemperature):
        code, T1, alpha, tau = 0, schedule.T, 1.0, 1
    elif isinstance(schedule, MultiplicativeCooling):
        code, T1, alpha, tau = 1, schedule.T1, schedule.alpha, 1
    elif isinstance(schedule, StepwiseCooling):
        code, T1, alpha, tau = 2, schedule.T1, schedule.alpha, int(schedule.tau)
    else:
        raise ValueError(f"unsupported schedule {schedule!r}")
    if not T1 > 0 or not 0 < alpha <= 1 or tau < 1:
        raise ValueError("temperatures must stay positive (T1 > 0, 0 < alpha <= 1, tau >= 1)")
    inner = problem
    view = Negated(problem) if not problem.maximize else problem
    tgt = None if target is None else (-target if view is not problem else target)
    run = _Run(view, rng, x0, tgt, engine, trace_stride)
    st = run.state()
    res = pk._sa_loop(st, rng, budget, run.target, code, float(T1), float(alpha), tau, run.stride)
    out = run.outcome(*res, parameter="T", final=run.genotype_of(st))
    if view is not inner:
        out.best_fitness = -out.best_fitness
        out.fixed_target_trace = [(-v, e) for v, e in out.fixed_target_trace]
        out.extras["maximize"] = False
    return out


# -- (mu+1) EA with rank-based rates -----------------------------------------------------------------------

def run_mu_plus_one_rank(problem: Problem, mu: int, budget=None, rng=None, *, p_min=None,
                         p_max=1.0, target=None, trace_stride=0) -> RunOutcome:
    budget = _check_budget(budget)
    if mu < 2:
        raise ValueError("mu must be at least 2")
    n = problem.n
    p_min = 1.0 / n if p_min is None else p_min
    s = problem.sign()
    tgt = s * (problem.optimum_value if target is None else target)
    pop = [problem.random_genotype(rng) for _ in range(mu)]
    score = [s * problem.value(x) for x in pop]
    evals, gens = mu, 0
    best = max(score)
    trace, ptrace = [(best, evals)], []
    while best < tgt and evals < budget:
        gens += 1
        j = rng.integer(mu)
        order = sorted(range(mu), key=lambda i: -score[i])
        rank = order.index(j) + 1
        p = ctl.rank_based_rate(rank, mu, p_min, p_max)
        y = standard_bit_mutation(pop[j], p, rng)
        fy = s * problem.value(y)
        evals += 1
        pop.append(y)
        score.append(fy)
        worst = min(score)
        losers = [i for i, v in enumerate(score) if v == worst]
        out = losers[rng.integer(len(losers))]
        del pop[out], score[out]
        if trace_stride and gens % trace_stride == 0:
            ptrace.append((gens, p))
        if fy > best:
            best = fy
            trace.append((best, evals))
    problem.evaluations += evals
    return RunOutcome(evals, gens, _native(s * best), bool(best >= tgt),
                      [(_native(s * v), e) for v, e in trace], ptrace, rng.master_seed,
                      rng.stream_id, "p", {"maximize": problem.maximize})


# -- non-elitist population with a rate portfolio ----------------------------------------------------------

SELECTIONS = ("uniform", "tournament-2", "best")


def _select(selection, score, rng):
    lam = len(score)
    if selection == "uniform":
        return rng.integer(lam)
    if selection == "tournament-2":
        a, b = rng.integer(lam), rng.integer(lam)
        return b if score[b] > score[a] else a
    return int(np.argmax(score))


def reproductive_rate(selection: str, score, rng: RandomSource, trials: int = 1000) -> float:
    """Largest expected number of times one individual is selected per generation."""
    if selection not in SELECTIONS:
        raise ValueError(f"unknown selection {selection!r}")
    lam = len(score)
    counts = np.zeros(lam)
    for _ in range(trials):
        for _ in range(lam):
            counts[_select(selection, score, rng)] += 1
    return float(counts.max() / trials)


def run_non_elitist_portfolio(problem: Problem, lam: int, rates: Sequence[float], switch_p: float,
                              selection: str = "tournament-2", budget=None, rng=None, *,
                              target=None, trace_stride=0) -> RunOutcome:
    """Population of (genotype, rate) pairs; each child may switch its rate first."""
    budget = _check_budget(budget)
    rates = [float(r) for r in rates]
    if not rates:
        raise ValueError("empty rate set")
    if any(not 0 <= r <= 1 for r in rates):
        raise ValueError("rates must lie in [0, 1]")
    if not 0 <= switch_p <= 1:
        raise ValueError("switch probability must lie in [0, 1]")
    if selection not in SELECTIONS:
        raise ValueError(f"unknown selection {selection!r}")
    if lam < 1:
        raise ValueError("population size must be positive")
    s = problem.sign()
    tgt = s * (problem.optimum_value if target is None else target)
    n, m = problem.n, len(rates)
    g = rng.generator
    rate_of = np.array(rates)
    pop = np.array([problem.random_genotype(rng) for _ in range(lam)], dtype=np.uint8)
    tags = g.integers(0, m, lam)
    score = s * problem.values(pop)
    evals, gens = lam, 0
    best = score.max()
    trace, ptrace = [(best, evals)], []
    while best < tgt and evals < budget:
        gens += 1
        # a generation of lam independent (select, switch rate, mutate) draws
        if selection == "uniform":
            parent = g.integers(0, lam, lam)
        elif selection == "tournament-2":
            a, b = g.integers(0, lam, (2, lam))
            parent = np.where(score[b] > score[a], b, a)
        else:
            parent = np.full(lam, int(np.argmax(score)))
        t = tags[parent]
        if m > 1:
            switch = g.random(lam) < switch_p
            j = g.integers(0, m - 1, lam)
            t = np.where(switch, np.where(j >= t, j + 1, j), t)
        flips = g.random((lam, n)) < rate_of[t][:, None]
        pop = pop[parent] ^ flips.astype(np.uint8)
        tags = t
        score = s * problem.values(pop)
        evals += lam
        top = score.max()
        if trace_stride and gens % trace_stride == 0:
            ptrace.append((gens, float(rate_of[tags].mean())))
        if top > best:
            best = top
            trace.append((best, evals))
    problem.evaluations += evals
    return RunOutcome(evals, gens, _native(s * best), bool(best >= tgt),
                      [(_native(s * v), e) for v, e in trace], ptrace, rng.master_seed,
                      rng.stream_id, "rate", {"maximize": problem.maximize, "tags": tags.tolist()})


# -- island model --------------------------------------------------------------------------------------------

TOPOLOGIES = ("ring", "grid", "torus", "complete")


def island_topology(count: int, topology: str) -> list[list[int]]:
    """Out-neighbours of every island; the ring is directed (i -> i+1)."""
    if topology not in TOPOLOGIES:
        raise ValueError(f"unknown topology {topology!r}; choose from {', '.join(TOPOLOGIES)}")
    if count < 2:
        raise ValueError("need at least two islands")
    if topology == "complete":
        return [[j for j in range(count) if j != i] for i in range(count)]
    if topology == "ring":
        return [[(i + 1) % count] for i in range(count)]
    rows = int(math.isqrt(count))
    while count % rows:
        rows -= 1
    cols = count // rows
    wrap = topology == "torus"
    out = []
    for i in range(count):
        r, c = divmod(i, cols)
        nb = []
        for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1)):
            rr, cc = r + dr, c + dc
            if wrap:
                rr, cc = rr % rows, cc % cols
            elif not (0 <= rr < rows and 0 <= cc < cols):
                continue
            j = rr * cols + cc
            if j != i and j not in nb:
                nb.append(j)
        out.append(nb)
    return out


@dataclass
class IslandModel:
    islands: int
    topology: str
    neighbours: list
    tau: list
    communication_effort: int = 0


def run_island_model(problem: Problem, islands: int, topology: str = "complete",
                     scheme: str = "2tau-1", budget=None, rng=None, *, p=None, target=None,
                     trace_stride=0) -> RunOutcome:
    """Synchronous island model of (1+1) EAs with adaptive migration intervals.

    Every island first sends its initial point to its neighbours.  An island
    broadcasts its current best at the end of each migration period (and,
    under "2tau-1", right after every strict improvement); a period counts
    as successful if the island's best improved, by itself or by a migrant.
    """
    budget = _check_budget(budget)
    if scheme not in ctl.MIGRATION_SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; choose from {', '.join(ctl.MIGRATION_SCHEMES)}")
    nbrs = island_topology(islands, topology)
    model = IslandModel(islands, topology, nbrs, [1] * islands)
    n = problem.n
    p = 1.0 / n if p is None else p
    s = problem.sign()
    tgt = s * (problem.optimum_value if target is None else target)
    pop = [problem.random_genotype(rng) for _ in range(islands)]
    score = [s * problem.value(x) for x in pop]
    evals, gens = islands, 0

    def deliver(senders):
        for i in senders:
            model.communication_effort += len(nbrs[i])
        snapshot = [(pop[i], score[i]) for i in senders]
        for (x, fx), i in zip(snapshot, senders):
            for j in nbrs[i]:
                if fx > score[j]:
                    pop[j], score[j] = x.copy(), fx

    deliver(list(range(islands)))
    counter = [0] * islands
    start = list(score)
    best = max(score)
    spread = 0
    trace, ptrace = [(best, evals)], []
    while best < tgt and evals < budget:
        gens += 1
        improved = [False] * islands
        for i in range(islands):
            y = standard_bit_mutation(pop[i], p, rng)
            fy = s * problem.value(y)
            if fy >= score[i]:
                improved[i] = fy > score[i]
                pop[i], score[i] = y, fy
        evals += islands
        ending, senders = [], []
        for i in range(islands):
            counter[i] += 1
            if scheme == "2tau-1" and improved[i]:
                senders.append(i)
                model.tau[i] = 1
                counter[i] = 0
            elif counter[i] >= model.tau[i]:
                senders.append(i)
                ending.append(i)
        deliver(senders)
        for i in range(islands):
            if scheme == "2tau-1" and improved[i]:
                start[i] = score[i]
        for i in ending:
            model.tau[i] = ctl.migration_interval_update(model.tau[i], score[i] > start[i], scheme)
            counter[i] = 0
            start[i] = score[i]
        spread = max(spread, max(model.tau) - min(model.tau))
        if trace_stride and gens % trace_stride == 0:
            ptrace.append((gens, float(np.mean(model.tau))))
        top = max(score)
        if top > best:
            best = top
            trace.append((best, evals))
    problem.evaluations += evals
    return RunOutcome(evals, gens, _native(s * best), bool(best >= tgt),
                      [(_native(s * v), e) for v, e in trace], ptrace, rng.master_seed,
                      rng.stream_id, "tau",
                      {"maximize": problem.maximize,
                       "communication_effort": model.communication_effort,
                       "tau": list(model.tau), "tau_spread": spread, "model": model})
