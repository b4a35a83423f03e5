"""Experiment configuration files.

Flat ``key = value`` text with three sections::

    [experiment]
    dimensions = 100, 200
    runs = 20
    seed = 1
    budget = 10n^2          # numbers may carry an 'n' factor: 3n, 0.5n, n^2, 2nlogn
    trace_stride = 0
    out = results

    [problem]
    name = leadingones

    [algorithm]
    name = rls
    strength = best-of-set
    strengths = 1, 2, 3

Keys are lower-snake-case; unknown sections or keys are errors.
"""
from __future__ import annotations

import configparser
import math
import os
import re
from dataclasses import dataclass, field

from ..problems import (Jump, LeadingOnes, Linear, MinimumSpanningTree, OneMax, Plateau,
                        RValuedOneMax, gen_connected_triangles, gen_random_lo_instance,
                        gen_random_linear_weights, read_graph)
from ..rng import RandomSource


class ConfigError(ValueError):
    pass


EXPERIMENT_KEYS = {"dimensions", "runs", "seed", "budget", "target", "trace_stride", "out",
                   "workers"}

# problem name -> accepted keys
PROBLEM_KEYS = {
    "onemax": {"z"},
    "leadingones": {"z"},
    "jump": {"k", "z"},
    "plateau": {"k", "z"},
    "linear": {"weights", "low", "high"},
    "rvalued-onemax": {"r", "mode"},
    "mst": {"triangles", "weights", "graph", "shuffle"},
}

COMMON_ALGORITHM_KEYS = {"engine"}
ALGORITHM_KEYS = {
    "one-plus-one": {"rate", "p", "c", "r_init", "factor", "r_lo", "r_hi"},
    "one-plus-lambda": {"lam", "lambda_control", "counting", "lam_cap", "rate", "p", "c",
                        "r_init", "factor", "r_lo", "r_hi"},
    "rls": {"strength", "k", "strengths", "probs", "eps", "delta", "a", "b", "v_init",
            "replacement", "p_min", "alpha", "beta", "c_ucb", "window"},
    "hh": {"mechanism", "strengths", "tau", "sigma", "adapt_tau", "replacement"},
    "ollga": {"lambda_control", "lam", "f"},
    "comma": {"lam", "factor", "lo", "hi", "r_init"},
    "sa": {"schedule", "t", "alpha", "tau"},
    "mu-plus-one": {"mu", "p_min", "p_max"},
    "portfolio": {"lam", "rates", "switch_p", "selection"},
    "islands": {"islands", "topology", "scheme", "p"},
}

_SCALED = re.compile(r"^\s*([0-9.eE+-]*)\s*\*?\s*(n\^2|n\*\*2|nlogn|n\s*log\s*n|n)\s*$")


def scaled_number(text: str, n: int) -> float:
    """Parse '12', '0.5', '3n', 'n^2', '10n^2' or '2nlogn' for dimension n."""
    text = str(text).strip()
    try:
        return float(text)
    except ValueError:
        pass
    m = _SCALED.match(text)
    if not m:
        raise ConfigError(f"cannot read number {text!r}")
    coef = float(m.group(1)) if m.group(1) not in ("", "+") else 1.0
    unit = m.group(2).replace(" ", "")
    base = {"n": n, "n^2": n * n, "n**2": n * n}.get(unit, n * math.log(n))
    return coef * base


def number_list(text: str) -> list[float]:
    try:
        return [float(v) for v in str(text).replace(";", ",").split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"expected a comma-separated list of numbers, got {text!r}") from None


def as_bool(text) -> bool:
    v = str(text).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


@dataclass
class ExperimentConfig:
    problem: str
    algorithm: str
    dimensions: list
    runs: int = 1
    seed: int = 1
    budget: str = "100n^2"
    target: str | None = None
    trace_stride: int = 0
    out: str = "results"
    workers: int | None = None
    problem_params: dict = field(default_factory=dict)
    algorithm_params: dict = field(default_factory=dict)
    source: str = ""

    def budget_for(self, n: int) -> int:
        return int(math.ceil(scaled_number(self.budget, n)))

    def target_for(self, n: int):
        return None if self.target is None else scaled_number(self.target, n)

    def validate(self):
        if self.problem not in PROBLEM_KEYS:
            raise ConfigError(f"unknown problem {self.problem!r}; valid: {', '.join(sorted(PROBLEM_KEYS))}")
        if self.algorithm not in ALGORITHM_KEYS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}; valid: {', '.join(sorted(ALGORITHM_KEYS))}")
        extra = set(self.problem_params) - PROBLEM_KEYS[self.problem]
        if extra:
            raise ConfigError(f"unknown [problem] keys for {self.problem}: {', '.join(sorted(extra))}")
        extra = set(self.algorithm_params) - ALGORITHM_KEYS[self.algorithm] - COMMON_ALGORITHM_KEYS
        if extra:
            raise ConfigError(f"unknown [algorithm] keys for {self.algorithm}: {', '.join(sorted(extra))}")
        if self.runs < 1:
            raise ConfigError("runs must be at least 1")
        if not self.dimensions or any(n < 1 for n in self.dimensions):
            raise ConfigError("dimensions must be positive integers")
        if self.trace_stride < 0:
            raise ConfigError("trace_stride must be nonnegative")
        if self.workers is not None and self.workers < 1:
            raise ConfigError("workers must be at least 1")
        for n in self.dimensions:
            if self.budget_for(n) < 1:
                raise ConfigError("budget must be at least 1")
        return self


def _int(section, key, text):
    try:
        v = float(text)
    except ValueError:
        raise ConfigError(f"[{section}] {key} must be an integer, got {text!r}") from None
    if v != int(v):
        raise ConfigError(f"[{section}] {key} must be an integer, got {text!r}")
    return int(v)


def parse_config(text: str, source: str = "<string>") -> ExperimentConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text, source=source)
    except configparser.Error as e:
        raise ConfigError(str(e)) from None
    unknown = set(cp.sections()) - {"experiment", "problem", "algorithm"}
    if unknown:
        raise ConfigError(f"unknown sections: {', '.join(sorted(unknown))}")
    for sec in ("experiment", "problem", "algorithm"):
        if not cp.has_section(sec):
            raise ConfigError(f"missing [{sec}] section")
        for key in cp[sec]:
            if key != key.lower() or not re.fullmatch(r"[a-z][a-z0-9_]*", key):
                raise ConfigError(f"[{sec}] key {key!r} is not lower_snake_case")
    exp = dict(cp["experiment"])
    bad = set(exp) - EXPERIMENT_KEYS
    if bad:
        raise ConfigError(f"unknown [experiment] keys: {', '.join(sorted(bad))}")
    prob = dict(cp["problem"])
    alg = dict(cp["algorithm"])
    if "name" not in prob or "name" not in alg:
        raise ConfigError("[problem] and [algorithm] need a name")
    if "dimensions" not in exp:
        raise ConfigError("[experiment] needs dimensions")
    cfg = ExperimentConfig(
        problem=prob.pop("name").strip(),
        algorithm=alg.pop("name").strip(),
        dimensions=[_int("experiment", "dimensions", v) for v in exp["dimensions"].split(",") if v.strip()],
        runs=_int("experiment", "runs", exp.get("runs", "1")),
        seed=_int("experiment", "seed", exp.get("seed", "1")),
        budget=exp.get("budget", "100n^2"),
        target=exp.get("target"),
        trace_stride=_int("experiment", "trace_stride", exp.get("trace_stride", "0")),
        out=exp.get("out", "results"),
        workers=_int("experiment", "workers", exp["workers"]) if "workers" in exp else None,
        problem_params=prob, algorithm_params=alg, source=source)
    env = os.environ.get("PARAMCTL_SEED")
    if env:
        cfg.seed = _int("environment", "PARAMCTL_SEED", env)
    return cfg.validate()


def load_config(path) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise ConfigError(f"cannot read config: {e}") from None
    return parse_config(text, str(path))


# -- building problems ------------------------------------------------------------------------

def _bits_or_none(text, n, rng):
    if text is None or text.strip() == "ones":
        return None
    if text.strip() == "random":
        return rng.bits(n)
    raise ConfigError("z must be 'ones' or 'random'")


def build_problem(cfg: ExperimentConfig, n: int, instance_rng: RandomSource):
    """Problem object for dimension n; random instances come from ``instance_rng``."""
    p = cfg.problem_params
    name = cfg.problem
    try:
        if name == "onemax":
            return OneMax(n, _bits_or_none(p.get("z"), n, instance_rng))
        if name == "leadingones":
            if p.get("z", "ones").strip() == "random":
                return LeadingOnes.from_instance(gen_random_lo_instance(n, instance_rng))
            return LeadingOnes(n, _bits_or_none(p.get("z"), n, instance_rng))
        if name in ("jump", "plateau"):
            k = int(scaled_number(p.get("k", "3"), n))
            cls = Jump if name == "jump" else Plateau
            return cls(n, k, _bits_or_none(p.get("z"), n, instance_rng))
        if name == "linear":
            kind = p.get("weights", "random").strip()
            if kind == "ones":
                return Linear([1.0] * n)
            if kind == "binval":
                return Linear([2.0 ** i for i in range(n)])
            if kind == "random":
                low, high = float(p.get("low", "1")), float(p.get("high", "2"))
                return Linear(gen_random_linear_weights(n, low, high, instance_rng))
            raise ConfigError("linear weights must be ones, binval or random")
        if name == "rvalued-onemax":
            r = int(scaled_number(p.get("r", "64"), n))
            mode = int(p.get("mode", "2"))
            z = [instance_rng.integer(r) for _ in range(n)]
            return RValuedOneMax(z, r, mode)
        if name == "mst":
            if "graph" in p:
                g = read_graph(p["graph"].strip())
            else:
                t = int(p.get("triangles", n))
                w = tuple(int(v) for v in number_list(p.get("weights", "1,1,2")))
                g = gen_connected_triangles(t, w, instance_rng, as_bool(p.get("shuffle", "false")))
            return MinimumSpanningTree(g)
    except ConfigError:
        raise
    except (ValueError, OSError) as e:
        raise ConfigError(f"[problem] {name}: {e}") from None
    raise ConfigError(f"unknown problem {name!r}")
