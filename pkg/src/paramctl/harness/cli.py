"""Command-line entry point: run, oracle, repro, list.

Exit codes: 0 success, 1 failed acceptance check, 2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import sys

from .. import oracles as orc
from ..backend import NAME as BACKEND
from .acceptance import CRITERIA, run_criterion
from .config import ALGORITHM_KEYS, PROBLEM_KEYS, ConfigError, load_config
from .csvio import CsvSink
from .experiment import run_experiment
from .stats import summarize

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

CONTROLLERS = {
    "rate": ["static", "time", "lo-fitness", "opl-fitness", "two-rate", "self-adaptive"],
    "lambda_control": ["static", "reset", "halve", "jansen", "fitness", "one-fifth"],
    "strength": ["fixed", "best-of-set", "drift-max", "mixture", "eps-greedy", "pm", "ap", "ucb", "velocity"],
    "mechanism": ["simple-random", "random-gradient", "greedy", "permutation", "grg", "sigma-grg"],
    "schedule": ["constant", "multiplicative", "stepwise"],
    "selection": ["uniform", "tournament-2", "best"],
    "topology": ["ring", "grid", "torus", "complete"],
    "scheme": ["2tau-1", "2tau-half"],
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def _oracle_lo_expected_time(a):
    return orc.lo_expected_time(a.n, a.p if a.p is not None else 1.0 / a.n)


def _oracle_lo_dp(a):
    dp = orc.lo_fixed_target_dp(a.n, tuple(a.k) if a.k else (1, 2, 3))
    return orc.OracleValue(dp.total(), orc.DYNAMIC_PROGRAM,
                           "best-of-" + ",".join(map(str, dp.strengths)))


def _oracle_drift(a):
    return orc.onemax_drift(a.n, a.f, a.ell)


def _oracle_drift_max(a):
    return orc.OracleValue(orc.drift_max_strength(a.n, a.f), orc.CLOSED_FORM, "argmax strength")


def _oracle_mixed(a):
    upper, lower = orc.mixed_bounds(a.n, a.p if a.p is not None else 0.5)
    return orc.OracleValue(upper.value, orc.CLOSED_FORM, f"lower bound {lower.value!r}")


def _oracle_om_chain(a):
    if a.n > 12:
        raise ValueError("exact chain limited to n <= 12")
    from ..problems import OneMax
    p = a.p if a.p is not None else 1.0 / a.n
    vals = orc.problem_values(OneMax(a.n))
    return orc.brute_force_hitting_time(vals, orc.elitist_kernel(vals, orc.mutation_matrix_standard(a.n, p)))


def _oracle_doubling(a):
    return orc.doubling_parallel_bound(a.n)


ORACLES = {
    "lo-expected-time": (_oracle_lo_expected_time, "(1+1) EA on LeadingOnes, static rate --p"),
    "lo-fixed-target": (_oracle_lo_dp, "best-of-set RLS on LeadingOnes, strengths --k"),
    "onemax-drift": (_oracle_drift, "expected positive OneMax gain, --f --ell"),
    "drift-max": (_oracle_drift_max, "drift-maximizing strength at fitness --f"),
    "mixed-bounds": (_oracle_mixed, "1-/2-bit mixing bounds on OneMax, --p"),
    "onemax-chain": (_oracle_om_chain, "exact (1+1) EA hitting time on OneMax, --p (n <= 12)"),
    "doubling-bound": (_oracle_doubling, "generation bound of the doubling (1+lambda) EA"),
}


def build_parser():
    ap = _Parser(prog="paramctl", description="Parameter-control experiments for evolutionary algorithms.")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)
    run = sub.add_parser("run", help="run a configured experiment")
    run.add_argument("--config", required=True)
    run.add_argument("--seed", type=int)
    run.add_argument("--out")
    run.add_argument("--workers", type=int)
    o = sub.add_parser("oracle", help="print an exact reference value")
    o.add_argument("name", choices=sorted(ORACLES))
    o.add_argument("--n", type=int, required=True)
    o.add_argument("--p", type=float)
    o.add_argument("--f", type=int, default=0)
    o.add_argument("--ell", type=int, default=1)
    o.add_argument("--k", type=int, nargs="*")
    r = sub.add_parser("repro", help="run a named acceptance experiment")
    r.add_argument("criterion", choices=list(CRITERIA) + ["all"])
    r.add_argument("--seed", type=int)
    sub.add_parser("list", help="list problems, algorithms, controllers and experiments")
    return ap


def _cmd_run(a):
    cfg = load_config(a.config)
    if a.seed is not None:
        cfg.seed = a.seed
    out = a.out or cfg.out
    with CsvSink(out) as sink:
        records = run_experiment(cfg, workers=a.workers, on_record=sink.add)
    for n in cfg.dimensions:
        recs = [r for r in records if r.n == n]
        print(f"n={n}: {summarize(recs, 'evaluations')}")
    print(f"wrote {out}/runs.csv, fixed_target.csv, parameter_trace.csv (backend: {BACKEND})")
    return EXIT_OK


def _cmd_oracle(a):
    fn, _ = ORACLES[a.name]
    try:
        print(fn(a))
    except ValueError as e:
        raise ConfigError(str(e)) from None
    return EXIT_OK


def _cmd_repro(a):
    names = list(CRITERIA) if a.criterion == "all" else [a.criterion]
    ok = True
    for name in names:
        res = run_criterion(name, a.seed)
        print(res.report(), flush=True)
        ok &= res.passed
    return EXIT_OK if ok else EXIT_FAIL


def _cmd_list(a):
    print("problems:   " + ", ".join(sorted(PROBLEM_KEYS)))
    print("algorithms: " + ", ".join(sorted(ALGORITHM_KEYS)))
    for key, values in CONTROLLERS.items():
        print(f"  {key}: {', '.join(values)}")
    print("oracles:    " + ", ".join(sorted(ORACLES)))
    print("repro:")
    for name, (number, _) in CRITERIA.items():
        print(f"  {number:2d} {name}")
    return EXIT_OK


def main(argv=None) -> int:
    ap = build_parser()
    try:
        a = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if a.command is None:
        ap.print_usage(sys.stderr)
        return EXIT_CONFIG
    try:
        return {"run": _cmd_run, "oracle": _cmd_oracle, "repro": _cmd_repro, "list": _cmd_list}[a.command](a)
    except ConfigError as e:
        print(f"paramctl: configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
