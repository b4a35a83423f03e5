"""Search loops in pure Python.

These loops are written against a small state protocol::

    state.n, state.fitness           # dimension, current (maximized) score
    state.toggle_eval(flips) -> score
    state.accept()                   # keep the last toggle_eval
    state.revert(flips)              # undo it
    state.apply(flips, score)        # redo a stored offspring

``AgreementState`` evaluates OneMax-type functions incrementally and is the
exact twin of the compiled kernels (same draws, same results);
``GenericState`` wraps any problem and re-evaluates from scratch.

The module-level ``*_run`` functions share their signatures with the
compiled module, so the backend selector can swap one for the other.
"""
from __future__ import annotations

import math

import numpy as np

from . import controllers as ctl
from .problems import KIND_JUMP, KIND_LEADINGONES, KIND_ONEMAX, KIND_PLATEAU

# rate / lambda / strength policy codes shared with _ckernels.pyx
RATE_STATIC, RATE_TIME, RATE_LO, RATE_OPL, RATE_TWO, RATE_SELF = range(6)
LAM_STATIC, LAM_RESET, LAM_HALVE, LAM_JANSEN = range(4)
COUNT_STRICT, COUNT_WEAK = range(2)
STR_FIXED, STR_TABLE, STR_MIXTURE, STR_EPS, STR_HH = range(5)
HH_SIMPLE, HH_GRADIENT, HH_GREEDY, HH_PERM, HH_GRG, HH_SIGMA = range(6)
GA_STATIC, GA_FITNESS, GA_ONE_FIFTH = range(3)

_LAM_SCHEMES = {LAM_RESET: "reset", LAM_HALVE: "halve", LAM_JANSEN: "jansen"}
HH_NAMES = ("simple-random", "random-gradient", "greedy", "permutation", "grg", "sigma-grg")


class AgreementState:
    """Incremental OneMax / LeadingOnes / Plateau / Jump evaluation."""

    def __init__(self, kind: int, k: int, a):
        self.kind, self.k = int(kind), int(k)
        self.a = bytearray(np.asarray(a, dtype=np.uint8).tobytes())
        self.n = len(self.a)
        self.om = sum(self.a)
        self.lo = self._scan(0)
        self._om, self._lo = self.om, self.lo
        self.fitness = self._score(self.om, self.lo)

    @property
    def optimum(self):
        return self.n + self.k if self.kind == KIND_JUMP else self.n

    def _scan(self, j):
        a, n = self.a, self.n
        while j < n and a[j]:
            j += 1
        return j

    def _score(self, om, lo):
        kind, n, k = self.kind, self.n, self.k
        if kind == KIND_ONEMAX:
            return om
        if kind == KIND_LEADINGONES:
            return lo
        if kind == KIND_PLATEAU:
            return om if (om <= n - k or om == n) else n - k
        return k + om if (om <= n - k or om == n) else n - om

    def toggle_eval(self, flips):
        a = self.a
        if self.kind == KIND_LEADINGONES:
            n, lo = self.n, self.lo
            for p in flips:
                a[p] ^= 1
            m = n
            for p in flips:
                if not a[p] and p < m:
                    m = p
            if m < lo:
                new = m
            elif lo >= n:
                new = n
            elif not a[lo]:
                new = lo
            else:
                new = self._scan(lo + 1)
            self._lo = new
            return new
        om = self.om
        for p in flips:
            om += -1 if a[p] else 1
            a[p] ^= 1
        self._om = om
        return self._score(om, self.lo)

    def accept(self):
        if self.kind == KIND_LEADINGONES:
            self.lo = self._lo
        else:
            self.om = self._om
        self.fitness = self._score(self.om, self.lo)

    def revert(self, flips):
        a = self.a
        for p in flips:
            a[p] ^= 1

    def apply(self, flips, score):
        self.toggle_eval(flips)
        self.accept()

    def array(self):
        return np.frombuffer(bytes(self.a), dtype=np.uint8).copy()


class GenericState:
    """Full re-evaluation of an arbitrary bit-string problem.

    ``sign`` turns minimization into maximization of the score.  Calls go
    to the uncounted ``problem.value``; the run loop does the counting.
    """

    def __init__(self, problem, x, sign=None):
        self.problem = problem
        self.x = np.array(x, dtype=np.uint8)
        self.n = self.x.size
        self.sign = problem.sign() if sign is None else sign
        self.fitness = self.sign * problem.value(self.x)
        self._pending = self.fitness

    def toggle_eval(self, flips):
        x = self.x
        for p in flips:
            x[p] ^= 1
        self._pending = self.sign * self.problem.value(x)
        return self._pending

    def accept(self):
        self.fitness = self._pending

    def revert(self, flips):
        x = self.x
        for p in flips:
            x[p] ^= 1

    def apply(self, flips, score):
        x = self.x
        for p in flips:
            x[p] ^= 1
        self.fitness = score


def _positions(rng, n, k, replacement):
    if replacement:
        return [rng.integer(n) for _ in range(k)]
    return rng.sample_distinct(n, k)


# -- (1+lambda) EA ---------------------------------------------------------------

def _ea_loop(state, rng, budget, target, lam, lam_ctl, counting, rate_ctl, p,
             r_init, factor, r_lo, r_hi, lam_cap, stride):
    n = state.n
    f = state.fitness
    evals, gens = 1, 0
    best = f
    trace, ptrace = [(best, evals)], []
    r = float(r_init)
    two = ctl.TwoRateState(r, n) if rate_ctl == RATE_TWO else None
    while best < target and evals < budget:
        gens += 1
        if rate_ctl == RATE_STATIC:
            rate = p
        elif rate_ctl == RATE_TIME:
            rate = ctl.time_dependent_rate(gens, n)
        elif rate_ctl == RATE_LO:
            rate = ctl.fitness_dependent_rate_lo(f)
        elif rate_ctl == RATE_OPL:
            rate = ctl.fitness_dependent_rate_opl(f, lam, n)
        else:
            rate = r / n
        if lam_ctl != LAM_STATIC:
            param = lam
        elif rate_ctl in (RATE_TWO, RATE_SELF):
            param = r
        else:
            param = rate
        half = lam // 2
        bo, bflips, bi, br = -math.inf, None, -1, math.inf
        strict = weak = 0
        for i in range(lam):
            ri = 0.0
            if rate_ctl == RATE_TWO:
                q = r / (2 * n) if i < half else 2 * r / n
            elif rate_ctl == RATE_SELF:
                ri = ctl.self_adaptive_child_rate(r, factor, r_lo, r_hi, rng)
                q = ri / n
            else:
                q = rate
            flips = rng.sample_distinct(n, rng.binomial(n, q))
            fo = state.toggle_eval(flips)
            evals += 1
            if fo > bo or (rate_ctl == RATE_SELF and fo == bo and ri < br):
                bo, bflips, bi, br = fo, flips, i, ri
            if fo > f:
                strict += 1
            if fo >= f:
                weak += 1
            state.revert(flips)
        if stride and gens % stride == 0:
            ptrace.append((gens, param))
        if bo >= f:
            state.apply(bflips, bo)
            f = bo
            if rate_ctl == RATE_SELF:
                r = br
            if f > best:
                best = f
                trace.append((best, evals))
        if rate_ctl == RATE_TWO:
            r = ctl.two_rate_update(two, bi >= half, rng)
        if lam_ctl != LAM_STATIC:
            s = strict if counting == COUNT_STRICT else weak
            lam = ctl.offspring_doubling_update(lam, s, _LAM_SCHEMES[lam_ctl])
            if lam_cap > 0 and lam > lam_cap:
                lam = lam_cap
    return evals, gens, best, trace, ptrace


# -- RLS with strength control ------------------------------------------------------

def _rls_loop(state, rng, budget, target, sctl, k, strengths, cum, table, fill,
              eps, delta, mech, tau, sigma, adapt_tau, tau_cap, replacement, stride):
    n = state.n
    f = state.fitness
    evals, gens = 1, 0
    best = f
    trace, ptrace = [(best, evals)], []
    strengths = [int(s) for s in strengths]
    cum = [float(c) for c in cum]
    vt = ctl.VelocityTable(k, delta, eps) if sctl == STR_EPS else None
    hh = ctl.HHState(HH_NAMES[mech], len(strengths), tau, sigma, bool(adapt_tau), tau_cap) \
        if sctl == STR_HH else None
    while best < target and evals < budget:
        gens += 1
        f_old = f
        if sctl == STR_FIXED:
            kk = k
        elif sctl == STR_TABLE:
            kk = int(table[f])
            if kk < 0:
                kk = int(fill(f))
                table[f] = kk
        elif sctl == STR_MIXTURE:
            u = rng.random()
            j = 0
            while j < len(cum) - 1 and u >= cum[j]:
                j += 1
            kk = strengths[j]
        elif sctl == STR_EPS:
            kk = ctl.eps_greedy_select(vt, rng)
        else:
            idx = hh.select(rng)
            kk = strengths[idx] if idx >= 0 else -1
        if kk >= 0:
            flips = _positions(rng, n, kk, replacement)
            fo = state.toggle_eval(flips)
            evals += 1
            if fo >= f:
                state.accept()
                f = fo
            else:
                state.revert(flips)
        else:
            bo, bflips = -math.inf, None
            for j, kj in enumerate(strengths):
                flips = _positions(rng, n, kj, replacement)
                fo = state.toggle_eval(flips)
                evals += 1
                if fo > bo:
                    bo, bflips, kk = fo, flips, kj
                state.revert(flips)
            if bo >= f:
                state.apply(bflips, bo)
                f = bo
        if vt is not None:
            ctl.velocity_update(vt, kk, f - f_old)
        elif hh is not None:
            hh.observe(f > f_old, rng)
        if stride and gens % stride == 0:
            ptrace.append((gens, kk))
        if f > best:
            best = f
            trace.append((best, evals))
    return evals, gens, best, trace, ptrace


# -- (1+(lambda,lambda)) GA -----------------------------------------------------------

def _ga_loop(state, rng, budget, target, lam_ctl, lam0, F, stride):
    n = state.n
    f = state.fitness
    evals, gens = 1, 0
    best = f
    trace, ptrace = [(best, evals)], []
    lam_real = float(lam0)
    five = ctl.OneFifthState(lam_real, F, 1.0, float(n)) if lam_ctl == GA_ONE_FIFTH else None
    while best < target and evals < budget:
        gens += 1
        if lam_ctl == GA_FITNESS:
            lam_int = ctl.fitness_dependent_lambda_ga(f, n)
            lam_real = float(lam_int)
        elif lam_ctl == GA_ONE_FIFTH:
            lam_int = ctl.round_half_up(lam_real)
        else:
            lam_int = int(lam0)
        p = lam_real / n
        c = 1.0 / lam_real
        ell = rng.binomial(n, p)
        bm, mflips = -math.inf, None
        for _ in range(lam_int):
            flips = rng.sample_distinct(n, ell)
            fo = state.toggle_eval(flips)
            evals += 1
            if fo > bm:
                bm, mflips = fo, flips
            state.revert(flips)
        bc, cflips = -math.inf, None
        for _ in range(lam_int):
            take = [pos for pos in mflips if rng.random() < c]
            fo = state.toggle_eval(take)
            evals += 1
            if fo > bc:
                bc, cflips = fo, take
            state.revert(take)
        if stride and gens % stride == 0:
            ptrace.append((gens, lam_real))
        outcome = ctl.IMPROVED if bc > f else (ctl.EQUAL if bc == f else ctl.WORSE)
        if bc >= f:
            state.apply(cflips, bc)
            f = bc
            if f > best:
                best = f
                trace.append((best, evals))
        if five is not None:
            lam_real = ctl.ga_lambda_update(five, outcome)
    return evals, gens, best, trace, ptrace


# -- self-adaptive (1,lambda) EA ------------------------------------------------------

def _comma_loop(state, rng, budget, target, lam, factor, r_lo, r_hi, r_init, stride):
    n = state.n
    f = state.fitness
    evals, gens = 1, 0
    best = f
    trace, ptrace = [(best, evals)], []
    r = float(r_init)
    r_min = r_max = r
    while best < target and evals < budget:
        gens += 1
        bo, bflips, br = -math.inf, None, math.inf
        for _ in range(lam):
            ri = ctl.self_adaptive_child_rate(r, factor, r_lo, r_hi, rng)
            flips = rng.sample_distinct(n, rng.binomial(n, ri / n))
            fo = state.toggle_eval(flips)
            evals += 1
            if fo > bo or (fo == bo and ri < br):
                bo, bflips, br = fo, flips, ri
            state.revert(flips)
        if stride and gens % stride == 0:
            ptrace.append((gens, r))
        state.apply(bflips, bo)
        f, r = bo, br
        r_min, r_max = min(r_min, r), max(r_max, r)
        if f > best:
            best = f
            trace.append((best, evals))
    return evals, gens, best, trace, ptrace, r_min, r_max


# -- simulated annealing ---------------------------------------------------------------

def temperature(schedule, t, T1, alpha, tau):
    if schedule == 0:
        return T1
    if schedule == 1:
        return T1 * alpha ** (t - 1)
    return T1 * alpha ** ((t - 1) // tau)


def _sa_loop(state, rng, budget, target, schedule, T1, alpha, tau, stride):
    n = state.n
    f = state.fitness
    evals, gens = 1, 0
    best = f
    trace, ptrace = [(best, evals)], []
    while best < target and evals < budget:
        gens += 1
        T = temperature(schedule, gens, T1, alpha, tau)
        flips = [rng.integer(n)]
        fo = state.toggle_eval(flips)
        evals += 1
        if fo >= f or rng.random() < math.exp((fo - f) / T):
            state.accept()
            f = fo
        else:
            state.revert(flips)
        if stride and gens % stride == 0:
            ptrace.append((gens, T))
        if f > best:
            best = f
            trace.append((best, evals))
    return evals, gens, best, trace, ptrace


# -- array-level entry points (same signatures as the compiled module) ---------------

def ea_run(rng, kind, kparam, a, budget, target, lam, lam_ctl, counting, rate_ctl, p,
           r_init, factor, r_lo, r_hi, lam_cap, stride):
    st = AgreementState(kind, kparam, a)
    res = _ea_loop(st, rng, budget, target, lam, lam_ctl, counting, rate_ctl, p,
                   r_init, factor, r_lo, r_hi, lam_cap, stride)
    a[:] = st.array()
    return res


def rls_run(rng, kind, kparam, a, budget, target, sctl, k, strengths, cum, table, fill,
            eps, delta, mech, tau, sigma, adapt_tau, tau_cap, replacement, stride):
    st = AgreementState(kind, kparam, a)
    res = _rls_loop(st, rng, budget, target, sctl, k, strengths, cum, table, fill,
                    eps, delta, mech, tau, sigma, adapt_tau, tau_cap, replacement, stride)
    a[:] = st.array()
    return res


def ga_run(rng, kind, kparam, a, budget, target, lam_ctl, lam0, F, stride):
    st = AgreementState(kind, kparam, a)
    res = _ga_loop(st, rng, budget, target, lam_ctl, lam0, F, stride)
    a[:] = st.array()
    return res


def comma_run(rng, kind, kparam, a, budget, target, lam, factor, r_lo, r_hi, r_init, stride):
    st = AgreementState(kind, kparam, a)
    res = _comma_loop(st, rng, budget, target, lam, factor, r_lo, r_hi, r_init, stride)
    a[:] = st.array()
    return res


def _distance(x, z, r, mode):
    d = x - z if x >= z else z - x
    if mode == 1:
        return 1 if d else 0
    if mode == 3 and r - d < d:
        return r - d
    return d


def rab_run(rng, x, z, r, mode, budget, target, A, b, v0, stride):
    """RLS with per-coordinate velocities on an integer string (minimization).

    Returns the usual tuple plus the smallest and largest velocity seen.
    """
    n = len(x)
    xs = [int(v) for v in x]
    zs = [int(v) for v in z]
    cap = float(max(1, r // 4))
    vel = [float(v0)] * n
    f = sum(_distance(xs[i], zs[i], r, mode) for i in range(n))
    evals, gens = 1, 0
    best = f
    trace, ptrace = [(best, evals)], []
    v_min = v_max = float(v0)
    while best > target and evals < budget:
        gens += 1
        i = rng.integer(n)
        step = int(vel[i])
        if rng.random() < 0.5:
            step = -step
        cand = xs[i] + step
        if mode == 3:
            cand %= r
        elif cand < 0:
            cand = 0
        elif cand > r - 1:
            cand = r - 1
        fo = f - _distance(xs[i], zs[i], r, mode) + _distance(cand, zs[i], r, mode)
        evals += 1
        if fo < f:
            vel[i] = min(A * vel[i], cap)
        else:
            vel[i] = max(b * vel[i], 1.0)
        if fo <= f:
            xs[i] = cand
            f = fo
        v_min, v_max = min(v_min, vel[i]), max(v_max, vel[i])
        if stride and gens % stride == 0:
            ptrace.append((gens, vel[i]))
        if f < best:
            best = f
            trace.append((best, evals))
    x[:] = xs
    return evals, gens, best, trace, ptrace, v_min, v_max


# -- OneMax drift ---------------------------------------------------------------------------

_LOGFACT: dict[int, list[float]] = {}


def log_factorials(n):
    """log(i!) for i = 0..n, summed left to right (shared with C)."""
    table = _LOGFACT.get(n)
    if table is None:
        table = [0.0] * (n + 1)
        acc = 0.0
        for i in range(2, n + 1):
            acc += math.log(i)
            table[i] = acc
        _LOGFACT[n] = table
    return table


def drift_value(n, f, ell):
    """E[max(OM(y) - OM(x), 0)] for ell distinct flips at OneMax value f.

    Sums the hypergeometric tail on the far side of the mode only, starting
    from a log-domain term and continuing with pmf ratios.
    """
    d = n - f                      # wrong bits
    lo_i = max(0, ell - f)
    hi_i = min(ell, d)
    h = ell // 2 + 1               # smallest count with positive gain
    if h > hi_i:
        return 0.0
    mode = ((ell + 1) * (d + 1)) // (n + 2)
    lf = log_factorials(n)
    lognorm = lf[n] - lf[ell] - lf[n - ell]
    if mode < h:
        i = max(h, lo_i)
        pmf = math.exp((lf[d] - lf[i] - lf[d - i]) + (lf[f] - lf[ell - i] - lf[f - ell + i]) - lognorm)
        acc = 0.0
        while True:
            acc += pmf * (2 * i - ell)
            if i >= hi_i:
                break
            pmf *= (d - i) * (ell - i) / ((i + 1) * (f - ell + i + 1))
            i += 1
            if pmf * ell * ell < 1e-17 * acc:
                break
        return acc
    mean = ell * (2.0 * d / n - 1.0)
    i = min(h - 1, hi_i)
    if i < lo_i:
        return mean
    pmf = math.exp((lf[d] - lf[i] - lf[d - i]) + (lf[f] - lf[ell - i] - lf[f - ell + i]) - lognorm)
    acc = 0.0
    while True:
        acc += pmf * (ell - 2 * i)
        if i <= lo_i:
            break
        pmf *= i * (f - ell + i) / ((d - i + 1) * (ell - i + 1))
        i -= 1
        if pmf * ell * ell < 1e-17 * (mean + acc):
            break
    return mean + acc


def drift_argmax(n, f):
    """Smallest ell in [1..n] maximizing drift_value(n, f, ell)."""
    d = n - f
    mu = 1.0 - 2.0 * d / n
    best_ell, best = 1, drift_value(n, f, 1)
    for ell in range(2, n + 1):
        v = drift_value(n, f, ell)
        if v > best * (1.0 + 1e-12):
            best_ell, best = ell, v
        elif mu > 0 and mu * mu * ell >= 1.0:
            s = mu * math.sqrt(ell)
            bound = math.sqrt(2 * math.pi * ell) * 0.5 * math.erfc(s / math.sqrt(2.0))
            if bound < best * (1.0 - 1e-9):
                break
    return best_ell
