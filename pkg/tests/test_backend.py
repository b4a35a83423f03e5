import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from paramctl import _pykernels as pk
from paramctl import backend
from paramctl.algorithms import (DoublingLambda, EpsilonGreedy, FixedStrength, LeadingOnesFitnessRate,
                                 MixedStrengths, OneFifthLambda, SelfAdaptiveRate, StaticLambda, StaticRate,
                                 TimeDependentRate, TwoRate, VelocityStep, run_ollga, run_one_plus_lambda,
                                 run_rls, run_self_adaptive_one_comma_lambda, run_single_point_hh)
from paramctl.problems import Jump, LeadingOnes, OneMax, Plateau, RValuedOneMax
from paramctl.rng import RandomSource

ck = backend.compiled()
needs_compiled = pytest.mark.skipif(ck is None, reason="compiled kernels not built")

problems = st.sampled_from(["onemax", "leadingones", "jump", "plateau"])


def make(kind, n):
    return {"onemax": OneMax(n), "leadingones": LeadingOnes(n), "jump": Jump(n, 3),
            "plateau": Plateau(n, 3)}[kind]


def both(fn):
    return fn("kernel"), fn("python")


@needs_compiled
def test_default_backend_is_compiled():
    if os.environ.get("PARAMCTL_BACKEND", "") != "python":
        assert backend.NAME == "cython" and backend.kernels is ck


def test_environment_forces_python():
    code = "from paramctl import backend; print(backend.NAME)"
    env = dict(os.environ, PARAMCTL_BACKEND="python")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@needs_compiled
@settings(max_examples=40, deadline=None)
@given(problems, st.integers(8, 60), st.integers(0, 2 ** 32), st.integers(1, 6),
       st.sampled_from(["static", "time", "lo", "two", "self", "reset", "halve", "jansen-weak"]))
def test_ea_kernels_identical(kind, n, seed, lam, policy):
    lam_pol, rate = StaticLambda(lam), StaticRate()
    if policy == "time":
        rate = TimeDependentRate()
    elif policy == "lo":
        rate = LeadingOnesFitnessRate()
    elif policy == "two":
        lam_pol, rate = StaticLambda(2 * lam), TwoRate()
    elif policy == "self":
        rate = SelfAdaptiveRate(2.0, 2.0, 1.0)
    elif policy == "reset":
        lam_pol = DoublingLambda("reset")
    elif policy == "halve":
        lam_pol = DoublingLambda("halve")
    else:
        lam_pol = DoublingLambda("jansen", "weak")
    a, b = both(lambda e: run_one_plus_lambda(make(kind, n), lam_pol, rate, 3000, RandomSource(seed),
                                              engine=e, trace_stride=2))
    assert a == b
    assert np.array_equal(a.final, b.final)


@needs_compiled
@settings(max_examples=40, deadline=None)
@given(problems, st.integers(8, 60), st.integers(0, 2 ** 32),
       st.sampled_from(["fixed", "mixture", "eps", "simple-random", "random-gradient", "greedy",
                        "permutation", "grg", "sigma-grg"]), st.booleans())
def test_rls_kernels_identical(kind, n, seed, policy, replacement):
    if policy in ("fixed", "mixture", "eps"):
        sp = {"fixed": FixedStrength(2), "mixture": MixedStrengths((1, 2, 3), (0.5, 0.3, 0.2)),
              "eps": EpsilonGreedy(4, 0.3, 0.2)}[policy]
        run = lambda e: run_rls(make(kind, n), sp, 3000, RandomSource(seed), engine=e,  # noqa: E731
                                replacement=replacement, trace_stride=1)
    else:
        run = lambda e: run_single_point_hh(make(kind, n), policy, (1, 2, 3), 3000,  # noqa: E731
                                            RandomSource(seed), tau=6, sigma=2, adapt_tau=True,
                                            replacement=replacement, engine=e, trace_stride=1)
    a, b = both(run)
    assert a == b


@needs_compiled
@settings(max_examples=30, deadline=None)
@given(problems, st.integers(8, 80), st.integers(0, 2 ** 32), st.integers(1, 6))
def test_ga_and_comma_kernels_identical(kind, n, seed, lam):
    a, b = both(lambda e: run_ollga(make(kind, n), OneFifthLambda(), 3000, RandomSource(seed), engine=e,
                                    trace_stride=1))
    assert a == b
    a, b = both(lambda e: run_ollga(make(kind, n), StaticLambda(lam), 3000, RandomSource(seed), engine=e))
    assert a == b
    a, b = both(lambda e: run_self_adaptive_one_comma_lambda(make(kind, max(n, 8)), lam + 1, 2.0, 3000,
                                                              RandomSource(seed), engine=e, trace_stride=1))
    assert a == b


@needs_compiled
@settings(max_examples=30, deadline=None)
@given(st.integers(1, 20), st.integers(2, 20), st.sampled_from([1, 2, 3]), st.integers(0, 2 ** 32))
def test_velocity_kernels_identical(n, r, mode, seed):
    rng = RandomSource(seed)
    z = [rng.integer(r) for _ in range(n)]
    runs = []
    for mod in (ck, pk):
        g = RandomSource(seed, 1)
        x = np.array([g.integer(r) for _ in range(n)], dtype=np.int64)
        res = mod.rab_run(g, x, np.array(z, dtype=np.int64), r, mode, 2000, 0, 1.7, 0.9, 1.0, 3)
        runs.append((res, x.tolist(), g.raw()))
    assert runs[0] == runs[1]


@needs_compiled
def test_drift_helpers_identical():
    for n in (1, 2, 7, 50, 301):
        for f in range(n):
            assert ck.drift_argmax(n, f) == pk.drift_argmax(n, f)
            for ell in range(1, n + 1, max(1, n // 13)):
                assert ck.drift_value(n, f, ell) == pk.drift_value(n, f, ell)


def test_velocity_run_through_api_is_deterministic():
    a = run_rls(RValuedOneMax([3, 7, 1], 10, 3), VelocityStep(), 10 ** 4, RandomSource(4))
    b = run_rls(RValuedOneMax([3, 7, 1], 10, 3), VelocityStep(), 10 ** 4, RandomSource(4))
    assert a == b and a.success
