"""Replicated runs of one configured algorithm over a list of dimensions.

Run i (counted across all dimensions) draws from stream i of the master
seed; problem instances for dimension j come from the stream
``INSTANCE_STREAM + j``, so every run of one dimension sees the same
instance.  Results are returned, and optionally flushed, in run order.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .. import algorithms as alg
from ..rng import RandomSource
from .config import ConfigError, ExperimentConfig, as_bool, build_problem, number_list, scaled_number

INSTANCE_STREAM = 1 << 40


@dataclass
class RunRecord:
    run_id: int
    n: int
    problem: str
    algorithm: str
    outcome: alg.RunOutcome


def _num(params, key, n, default):
    return scaled_number(params.get(key, default), n)


def _opt(params, key, n):
    return scaled_number(params[key], n) if key in params else None


def _rate_policy(p, n):
    kind = p.get("rate", "static").strip()
    if kind == "static":
        return alg.StaticRate(_opt(p, "p", n), _num(p, "c", n, "1"))
    if kind == "time":
        return alg.TimeDependentRate()
    if kind == "lo-fitness":
        return alg.LeadingOnesFitnessRate()
    if kind == "opl-fitness":
        return alg.OnePlusLambdaFitnessRate()
    if kind == "two-rate":
        return alg.TwoRate(_num(p, "r_init", n, "2"))
    if kind == "self-adaptive":
        return alg.SelfAdaptiveRate(_num(p, "r_init", n, "2"), _num(p, "factor", n, "2"),
                                    _num(p, "r_lo", n, "2"), _opt(p, "r_hi", n))
    raise ConfigError(f"unknown rate policy {kind!r}; valid: static, time, lo-fitness, "
                      "opl-fitness, two-rate, self-adaptive")


def _lambda_policy(p, n):
    kind = p.get("lambda_control", "static").strip()
    if kind == "static":
        return alg.StaticLambda(int(_num(p, "lam", n, "1")))
    if kind in ("reset", "halve", "jansen"):
        return alg.DoublingLambda(kind, p.get("counting", "strict").strip(),
                                  int(_num(p, "lam", n, "1")), int(_num(p, "lam_cap", n, "0")))
    raise ConfigError(f"unknown lambda control {kind!r}; valid: static, reset, halve, jansen")


def _ints(p, key, default):
    return tuple(int(v) for v in number_list(p.get(key, default)))


def _strength_policy(p, n):
    kind = p.get("strength", "fixed").strip()
    if kind == "fixed":
        return alg.FixedStrength(int(_num(p, "k", n, "1")))
    if kind == "best-of-set":
        return alg.best_of_set_strengths(n, _ints(p, "strengths", "1,2,3"))
    if kind == "drift-max":
        return alg.drift_max_strengths(n)
    if kind == "mixture":
        return alg.MixedStrengths(_ints(p, "strengths", "1,2"), tuple(number_list(p.get("probs", "0.5,0.5"))))
    if kind == "eps-greedy":
        return alg.EpsilonGreedy(int(_num(p, "k", n, "10")), _num(p, "eps", n, "0.1"),
                                 _num(p, "delta", n, "0.1"))
    if kind in ("pm", "ap", "ucb"):
        w = p.get("window", "50").strip()
        return alg.BanditStrengths(_ints(p, "strengths", "1,2,3"), kind, _num(p, "p_min", n, "0.05"),
                                   _num(p, "alpha", n, "0.3"), _num(p, "beta", n, "0.3"),
                                   _num(p, "c_ucb", n, "1"), None if w == "none" else int(w))
    if kind == "velocity":
        return alg.VelocityStep(_num(p, "a", n, "1.7"), _num(p, "b", n, "0.9"), _num(p, "v_init", n, "1"))
    raise ConfigError(f"unknown strength policy {kind!r}; valid: fixed, best-of-set, drift-max, "
                      "mixture, eps-greedy, pm, ap, ucb, velocity")


def _schedule(p, n):
    kind = p.get("schedule", "constant").strip()
    if kind == "constant":
        return alg.ConstantTemperature(_num(p, "t", n, "1"))
    if kind == "multiplicative":
        return alg.MultiplicativeCooling(_num(p, "t", n, "1"), _num(p, "alpha", n, "0.999"))
    if kind == "stepwise":
        return alg.StepwiseCooling(_num(p, "t", n, "1"), _num(p, "alpha", n, "0.9"), int(_num(p, "tau", n, "n")))
    raise ConfigError(f"unknown schedule {kind!r}; valid: constant, multiplicative, stepwise")


def run_algorithm(name, params, problem, budget, rng, target=None, stride=0):
    """Dispatch one run from a configuration section."""
    n = problem.n
    p = dict(params)
    kw = {"target": target, "trace_stride": stride}
    eng = {"engine": p.get("engine", "auto").strip()}
    try:
        if name == "one-plus-one":
            return alg.run_one_plus_one(problem, _rate_policy(p, n), budget, rng, **kw, **eng)
        if name == "one-plus-lambda":
            return alg.run_one_plus_lambda(problem, _lambda_policy(p, n), _rate_policy(p, n), budget,
                                           rng, **kw, **eng)
        if name == "rls":
            return alg.run_rls(problem, _strength_policy(p, n), budget, rng,
                               replacement=as_bool(p.get("replacement", "false")), **kw, **eng)
        if name == "hh":
            tau = _opt(p, "tau", n)
            return alg.run_single_point_hh(problem, p.get("mechanism", "simple-random").strip(),
                                           _ints(p, "strengths", "1,2"), budget, rng, tau=tau,
                                           sigma=int(_num(p, "sigma", n, "1")),
                                           adapt_tau=as_bool(p.get("adapt_tau", "false")),
                                           replacement=as_bool(p.get("replacement", "false")), **kw, **eng)
        if name == "ollga":
            kind = p.get("lambda_control", "one-fifth").strip()
            if kind == "static":
                pol = alg.StaticLambda(int(_num(p, "lam", n, "1")))
            elif kind == "fitness":
                pol = alg.FitnessLambda()
            elif kind == "one-fifth":
                pol = alg.OneFifthLambda(_num(p, "f", n, "1.5"), _num(p, "lam", n, "1"))
            else:
                raise ConfigError(f"unknown lambda control {kind!r}; valid: static, fitness, one-fifth")
            return alg.run_ollga(problem, pol, budget, rng, **kw, **eng)
        if name == "comma":
            return alg.run_self_adaptive_one_comma_lambda(
                problem, int(_num(p, "lam", n, "10")), _num(p, "factor", n, "2"), budget, rng,
                lo=_num(p, "lo", n, "2"), hi=_opt(p, "hi", n), r_init=_opt(p, "r_init", n), **kw, **eng)
        if name == "sa":
            return alg.run_sa(problem, _schedule(p, n), budget, rng, **kw, **eng)
        if name == "mu-plus-one":
            return alg.run_mu_plus_one_rank(problem, int(_num(p, "mu", n, "2")), budget, rng,
                                            p_min=_opt(p, "p_min", n), p_max=_num(p, "p_max", n, "1"), **kw)
        if name == "portfolio":
            return alg.run_non_elitist_portfolio(problem, int(_num(p, "lam", n, "10")),
                                                 number_list(p.get("rates", "0.01")),
                                                 _num(p, "switch_p", n, "0.1"),
                                                 p.get("selection", "tournament-2").strip(), budget, rng, **kw)
        if name == "islands":
            return alg.run_island_model(problem, int(_num(p, "islands", n, "4")),
                                        p.get("topology", "complete").strip(),
                                        p.get("scheme", "2tau-1").strip(), budget, rng,
                                        p=_opt(p, "p", n), **kw)
    except ConfigError:
        raise
    except ValueError as e:
        raise ConfigError(f"[algorithm] {name}: {e}") from None
    raise ConfigError(f"unknown algorithm {name!r}")


def _plan(cfg: ExperimentConfig):
    jobs = []
    for j, n in enumerate(cfg.dimensions):
        for i in range(cfg.runs):
            jobs.append((len(jobs), j, n))
    return jobs


def _execute(cfg: ExperimentConfig, job) -> RunRecord:
    run_id, j, n = job
    problem = build_problem(cfg, n, RandomSource(cfg.seed, INSTANCE_STREAM + j))
    rng = RandomSource(cfg.seed, run_id)
    out = run_algorithm(cfg.algorithm, cfg.algorithm_params, problem, cfg.budget_for(n), rng,
                        cfg.target_for(n), cfg.trace_stride)
    out.extras.pop("model", None)
    return RunRecord(run_id, n, cfg.problem, cfg.algorithm, out)


def run_experiment(cfg: ExperimentConfig, workers: int | None = None, on_record=None) -> list[RunRecord]:
    """Execute every run; ``on_record`` is called in run order as results arrive."""
    cfg.validate()
    jobs = _plan(cfg)
    # fail fast on bad hyper-parameters before spawning anything
    n0 = cfg.dimensions[0]
    run_algorithm(cfg.algorithm, cfg.algorithm_params,
                  build_problem(cfg, n0, RandomSource(cfg.seed, INSTANCE_STREAM)), 1,
                  RandomSource(cfg.seed, 0))
    workers = workers or cfg.workers or os.cpu_count() or 1
    records = []
    if workers == 1 or len(jobs) == 1:
        for job in jobs:
            rec = _execute(cfg, job)
            records.append(rec)
            if on_record:
                on_record(rec)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for rec in pool.map(_execute, [cfg] * len(jobs), jobs):
                records.append(rec)
                if on_record:
                    on_record(rec)
    records.sort(key=lambda r: r.run_id)
    return records
