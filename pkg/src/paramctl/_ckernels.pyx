# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled search loops.

Line-by-line twins of the loops in ``_pykernels``: same draws from the same
PCG64 stream (read through the bit generator capsule), same arithmetic,
same results.  Only agreement-vector problems are handled here.
"""
from libc.stdint cimport uint64_t, int64_t, uint8_t
from libc.stdlib cimport malloc, free
from libc.string cimport memset, memcpy
from libc.math cimport log, sqrt, exp, floor, ceil, erfc, ldexp, INFINITY, M_PI, M_E
from cpython.pycapsule cimport PyCapsule_GetPointer
from numpy.random cimport bitgen_t
from numpy.random.c_distributions cimport random_binomial, binomial_t

import numpy as np

cdef extern from *:
    """
    #include <stdint.h>
    static inline uint64_t pc_mulhi(uint64_t x, uint64_t n, uint64_t *lo) {
        __uint128_t m = (__uint128_t)x * (__uint128_t)n;
        *lo = (uint64_t)m;
        return (uint64_t)(m >> 64);
    }
    """
    uint64_t pc_mulhi(uint64_t x, uint64_t n, uint64_t *lo) nogil


cdef enum:
    K_ONEMAX = 0
    K_LEADINGONES = 1
    K_PLATEAU = 2
    K_JUMP = 3
    RATE_STATIC = 0
    RATE_TIME = 1
    RATE_LO = 2
    RATE_OPL = 3
    RATE_TWO = 4
    RATE_SELF = 5
    LAM_STATIC = 0
    LAM_RESET = 1
    LAM_HALVE = 2
    LAM_JANSEN = 3
    COUNT_STRICT = 0
    STR_FIXED = 0
    STR_TABLE = 1
    STR_MIXTURE = 2
    STR_EPS = 3
    STR_HH = 4
    HH_SIMPLE = 0
    HH_GRADIENT = 1
    HH_GREEDY = 2
    HH_PERM = 3
    HH_GRG = 4
    HH_SIGMA = 5
    GA_STATIC = 0
    GA_FITNESS = 1
    GA_ONE_FIFTH = 2

BACKEND = "cython"


# -- random primitives ---------------------------------------------------------

cdef inline bitgen_t* _bitgen(rng) except NULL:
    return <bitgen_t*> PyCapsule_GetPointer(rng.generator.bit_generator.capsule, "BitGenerator")


cdef inline double rnd_double(bitgen_t* bg) noexcept nogil:
    return bg.next_double(bg.state)


cdef inline int64_t rnd_int(bitgen_t* bg, uint64_t n) noexcept nogil:
    cdef uint64_t lo, hi, t
    hi = pc_mulhi(bg.next_uint64(bg.state), n, &lo)
    if lo < n:
        t = (0 - n) % n
        while lo < t:
            hi = pc_mulhi(bg.next_uint64(bg.state), n, &lo)
    return <int64_t> hi


cdef struct Sampler:
    int64_t* stamp
    int64_t epoch
    int64_t n


cdef int sampler_init(Sampler* s, int64_t n) except -1:
    s.stamp = <int64_t*> malloc((n + 1) * sizeof(int64_t))
    if s.stamp == NULL:
        raise MemoryError()
    memset(s.stamp, 0, (n + 1) * sizeof(int64_t))
    s.epoch = 0
    s.n = n
    return 0


cdef inline void sample_distinct(Sampler* s, bitgen_t* bg, int64_t k, int64_t* out) noexcept nogil:
    # Floyd's algorithm, same order of output as RandomSource.sample_distinct
    cdef int64_t j, t, c = 0
    s.epoch += 1
    for j in range(s.n - k, s.n):
        t = rnd_int(bg, j + 1)
        if s.stamp[t] == s.epoch:
            t = j
        s.stamp[t] = s.epoch
        out[c] = t
        c += 1


cdef inline void sample_positions(Sampler* s, bitgen_t* bg, int64_t k, bint replacement, int64_t* out) noexcept nogil:
    cdef int64_t j
    if replacement:
        for j in range(k):
            out[j] = rnd_int(bg, s.n)
    else:
        sample_distinct(s, bg, k, out)


# -- agreement state ----------------------------------------------------------------

cdef struct AState:
    int kind
    int64_t k
    int64_t n
    uint8_t* a
    int64_t om
    int64_t lo
    int64_t p_om
    int64_t p_lo
    int64_t fitness


cdef inline int64_t a_scan(AState* s, int64_t j) noexcept nogil:
    while j < s.n and s.a[j]:
        j += 1
    return j


cdef inline int64_t a_score(AState* s, int64_t om, int64_t lo) noexcept nogil:
    if s.kind == K_ONEMAX:
        return om
    if s.kind == K_LEADINGONES:
        return lo
    if s.kind == K_PLATEAU:
        if om <= s.n - s.k or om == s.n:
            return om
        return s.n - s.k
    if om <= s.n - s.k or om == s.n:
        return s.k + om
    return s.n - om


cdef void a_init(AState* s, int kind, int64_t k, uint8_t* a, int64_t n) noexcept nogil:
    cdef int64_t i
    s.kind = kind
    s.k = k
    s.n = n
    s.a = a
    s.om = 0
    for i in range(n):
        s.om += a[i]
    s.lo = a_scan(s, 0)
    s.p_om = s.om
    s.p_lo = s.lo
    s.fitness = a_score(s, s.om, s.lo)


cdef inline int64_t a_toggle_eval(AState* s, int64_t* flips, int64_t nf) noexcept nogil:
    cdef int64_t j, p, m, new, lo, om
    cdef uint8_t* a = s.a
    if s.kind == K_LEADINGONES:
        lo = s.lo
        for j in range(nf):
            a[flips[j]] ^= 1
        m = s.n
        for j in range(nf):
            p = flips[j]
            if not a[p] and p < m:
                m = p
        if m < lo:
            new = m
        elif lo >= s.n:
            new = s.n
        elif not a[lo]:
            new = lo
        else:
            new = a_scan(s, lo + 1)
        s.p_lo = new
        return new
    om = s.om
    for j in range(nf):
        p = flips[j]
        if a[p]:
            om -= 1
        else:
            om += 1
        a[p] ^= 1
    s.p_om = om
    return a_score(s, om, s.lo)


cdef inline void a_accept(AState* s) noexcept nogil:
    if s.kind == K_LEADINGONES:
        s.lo = s.p_lo
    else:
        s.om = s.p_om
    s.fitness = a_score(s, s.om, s.lo)


cdef inline void a_revert(AState* s, int64_t* flips, int64_t nf) noexcept nogil:
    cdef int64_t j
    for j in range(nf):
        s.a[flips[j]] ^= 1


cdef inline void a_apply(AState* s, int64_t* flips, int64_t nf) noexcept nogil:
    a_toggle_eval(s, flips, nf)
    a_accept(s)


cdef int64_t* _alloc(int64_t count) except NULL:
    cdef int64_t* p = <int64_t*> malloc((count + 1) * sizeof(int64_t))
    if p == NULL:
        raise MemoryError()
    return p


# -- controller rules (twins of paramctl.controllers) -------------------------------

cdef inline double sa_child_rate(bitgen_t* bg, double r, double factor, double lo, double hi) noexcept nogil:
    if rnd_double(bg) < 0.5:
        r = r / factor
    else:
        r = r * factor
    return min(max(r, lo), hi)


cdef inline int64_t bitlen(int64_t v) noexcept nogil:
    cdef int64_t b = 0
    while v > 0:
        v >>= 1
        b += 1
    return b


cdef inline int64_t doubling(int64_t lam, int64_t s, int scheme) noexcept nogil:
    if s == 0:
        return 2 * lam
    if scheme == LAM_RESET:
        return 1
    if scheme == LAM_HALVE:
        return max(1, lam // 2)
    return max(1, lam // s)


# -- (1+lambda) EA ---------------------------------------------------------------------

def ea_run(rng, int kind, int64_t kparam, uint8_t[::1] a, int64_t budget, double target,
           int64_t lam, int lam_ctl, int counting, int rate_ctl, double p,
           double r_init, double factor, double r_lo, double r_hi, int64_t lam_cap, int64_t stride):
    cdef bitgen_t* bg = _bitgen(rng)
    cdef binomial_t bt
    memset(&bt, 0, sizeof(binomial_t))
    cdef AState st
    cdef int64_t n = a.shape[0]
    a_init(&st, kind, kparam, &a[0], n)
    cdef Sampler smp
    sampler_init(&smp, n)
    cdef int64_t* buf = _alloc(n)
    cdef int64_t* bbuf = _alloc(n)
    cdef int64_t f = st.fitness, best = f, evals = 1, gens = 0
    cdef int64_t i, kk, nb = 0, bi, strict, weak, half, s, cycle
    cdef double r = r_init, rate = 0.0, q, ri, br, param, u
    cdef double bo, fo
    trace = [(best, evals)]
    ptrace = []
    cycle = max(1, bitlen(n - 1) - 1)
    try:
        while best < target and evals < budget:
            gens += 1
            if rate_ctl == RATE_STATIC:
                rate = p
            elif rate_ctl == RATE_TIME:
                rate = ldexp(1.0, <int>((gens - 1) % cycle)) / n
            elif rate_ctl == RATE_LO:
                rate = 1.0 / (f + 1)
            elif rate_ctl == RATE_OPL:
                rate = max(1.0 / n, log(<double>lam) / (n * log(M_E * n / (n - f))))
            else:
                rate = r / n
            if lam_ctl != LAM_STATIC:
                param = <double>lam
            elif rate_ctl == RATE_TWO or rate_ctl == RATE_SELF:
                param = r
            else:
                param = rate
            half = lam // 2
            bo = -INFINITY
            bi = -1
            br = INFINITY
            strict = 0
            weak = 0
            for i in range(lam):
                ri = 0.0
                if rate_ctl == RATE_TWO:
                    if i < half:
                        q = r / (2 * n)
                    else:
                        q = 2 * r / n
                elif rate_ctl == RATE_SELF:
                    ri = sa_child_rate(bg, r, factor, r_lo, r_hi)
                    q = ri / n
                else:
                    q = rate
                kk = random_binomial(bg, q, n, &bt)
                sample_distinct(&smp, bg, kk, buf)
                fo = a_toggle_eval(&st, buf, kk)
                evals += 1
                if fo > bo or (rate_ctl == RATE_SELF and fo == bo and ri < br):
                    bo = fo
                    bi = i
                    br = ri
                    nb = kk
                    memcpy(bbuf, buf, kk * sizeof(int64_t))
                if fo > f:
                    strict += 1
                if fo >= f:
                    weak += 1
                a_revert(&st, buf, kk)
            if stride and gens % stride == 0:
                ptrace.append((gens, lam if lam_ctl != LAM_STATIC else param))
            if bo >= f:
                a_apply(&st, bbuf, nb)
                f = st.fitness
                if rate_ctl == RATE_SELF:
                    r = br
                if f > best:
                    best = f
                    trace.append((best, evals))
            if rate_ctl == RATE_TWO:
                u = rnd_double(bg)
                if u < 0.25:
                    r = r / 2
                elif u < 0.5:
                    r = r * 2
                elif bi >= half:
                    r = r * 2
                else:
                    r = r / 2
                r = min(max(r, 2.0), n / 4.0)
            if lam_ctl != LAM_STATIC:
                s = strict if counting == COUNT_STRICT else weak
                lam = doubling(lam, s, lam_ctl)
                if lam_cap > 0 and lam > lam_cap:
                    lam = lam_cap
    finally:
        free(buf)
        free(bbuf)
        free(smp.stamp)
    return evals, gens, best, trace, ptrace


# -- RLS with strength control ----------------------------------------------------------

def rls_run(rng, int kind, int64_t kparam, uint8_t[::1] a, int64_t budget, double target,
            int sctl, int64_t k, strengths, cum, table, fill,
            double eps, double delta, int mech, double tau, int64_t sigma, bint adapt_tau,
            double tau_cap, bint replacement, int64_t stride):
    cdef bitgen_t* bg = _bitgen(rng)
    cdef AState st
    cdef int64_t n = a.shape[0]
    a_init(&st, kind, kparam, &a[0], n)
    cdef Sampler smp
    sampler_init(&smp, n)
    cdef int64_t[::1] strv = np.ascontiguousarray(strengths, dtype=np.int64)
    cdef double[::1] cumv = np.ascontiguousarray(cum, dtype=np.float64)
    cdef int64_t[::1] tab
    if sctl == STR_TABLE:
        tab = table
    cdef int64_t ns = strv.shape[0], nc = cumv.shape[0]
    cdef int64_t cap = n
    cdef int64_t j
    for j in range(ns):
        cap = max(cap, strv[j])
    cap = max(cap, k)
    cdef int64_t* buf = _alloc(cap)
    cdef int64_t* bbuf = _alloc(cap)
    cdef double* num = NULL
    cdef double* den = NULL
    cdef int64_t* order = NULL
    cdef int64_t f = st.fitness, best = f, evals = 1, gens = 0, f_old, fo, bo
    cdef int64_t kk, nb = 0, idx, cur = -1, counter = 0, succ = 0, pos = 0, t
    cdef bint last_improved = False, improved
    cdef double u, keep, v, bv
    trace = [(best, evals)]
    ptrace = []
    try:
        if sctl == STR_EPS:
            num = <double*> malloc(k * sizeof(double))
            den = <double*> malloc(k * sizeof(double))
            if num == NULL or den == NULL:
                raise MemoryError()
            for j in range(k):
                num[j] = 0.0
                den[j] = 0.0
        if sctl == STR_HH:
            order = _alloc(ns)
            if mech != HH_SIGMA:
                sigma = 1
                adapt_tau = False
        keep = 1.0 - delta
        while best < target and evals < budget:
            gens += 1
            f_old = f
            if sctl == STR_FIXED:
                kk = k
            elif sctl == STR_TABLE:
                kk = tab[f]
                if kk < 0:
                    kk = fill(f)
                    tab[f] = kk
            elif sctl == STR_MIXTURE:
                u = rnd_double(bg)
                j = 0
                while j < nc - 1 and u >= cumv[j]:
                    j += 1
                kk = strv[j]
            elif sctl == STR_EPS:
                if rnd_double(bg) < eps:
                    kk = 1 + rnd_int(bg, k)
                else:
                    kk = 1
                    bv = num[0] / den[0] if den[0] > 0 else INFINITY
                    for j in range(1, k):
                        v = num[j] / den[j] if den[j] > 0 else INFINITY
                        if v > bv:
                            kk = j + 1
                            bv = v
            else:
                if mech == HH_GREEDY:
                    idx = -1
                elif mech == HH_SIMPLE:
                    cur = rnd_int(bg, ns)
                    idx = cur
                elif mech == HH_GRADIENT:
                    if not last_improved:
                        cur = rnd_int(bg, ns)
                    idx = cur
                elif mech == HH_PERM:
                    if pos == 0 and cur < 0:
                        # lazy Fisher-Yates shuffle, as RandomSource.permutation
                        for j in range(ns):
                            order[j] = j
                        for j in range(ns - 1, 0, -1):
                            t = rnd_int(bg, j + 1)
                            order[j], order[t] = order[t], order[j]
                    cur = order[pos]
                    pos = (pos + 1) % ns
                    idx = cur
                else:
                    if cur < 0:
                        cur = rnd_int(bg, ns)
                    idx = cur
                kk = strv[idx] if idx >= 0 else -1
            if kk >= 0:
                sample_positions(&smp, bg, kk, replacement, buf)
                fo = a_toggle_eval(&st, buf, kk)
                evals += 1
                if fo >= f:
                    a_accept(&st)
                    f = fo
                else:
                    a_revert(&st, buf, kk)
            else:
                bo = -1
                for j in range(ns):
                    sample_positions(&smp, bg, strv[j], replacement, buf)
                    fo = a_toggle_eval(&st, buf, strv[j])
                    evals += 1
                    if j == 0 or fo > bo:
                        bo = fo
                        nb = strv[j]
                        kk = strv[j]
                        memcpy(bbuf, buf, nb * sizeof(int64_t))
                    a_revert(&st, buf, strv[j])
                if bo >= f:
                    a_apply(&st, bbuf, nb)
                    f = bo
            improved = f > f_old
            if sctl == STR_EPS:
                for j in range(k):
                    num[j] *= keep
                    den[j] *= keep
                num[kk - 1] += <double>(f - f_old)
                den[kk - 1] += 1.0
            elif sctl == STR_HH:
                if mech == HH_GRADIENT:
                    last_improved = improved
                elif mech == HH_GRG or mech == HH_SIGMA:
                    counter += 1
                    if improved:
                        succ += 1
                    if succ >= sigma:
                        if adapt_tau:
                            tau = max(<double>sigma, tau / 2)
                        counter = 0
                        succ = 0
                    elif counter >= tau:
                        cur = rnd_int(bg, ns)
                        if adapt_tau:
                            tau = min(2.0 * tau, tau_cap)
                        counter = 0
                        succ = 0
            if stride and gens % stride == 0:
                ptrace.append((gens, kk))
            if f > best:
                best = f
                trace.append((best, evals))
    finally:
        free(buf)
        free(bbuf)
        free(smp.stamp)
        if num != NULL:
            free(num)
        if den != NULL:
            free(den)
        if order != NULL:
            free(order)
    return evals, gens, best, trace, ptrace


# -- (1+(lambda,lambda)) GA -------------------------------------------------------------

def ga_run(rng, int kind, int64_t kparam, uint8_t[::1] a, int64_t budget, double target,
           int lam_ctl, double lam0, double F, int64_t stride):
    cdef bitgen_t* bg = _bitgen(rng)
    cdef binomial_t bt
    memset(&bt, 0, sizeof(binomial_t))
    cdef AState st
    cdef int64_t n = a.shape[0]
    a_init(&st, kind, kparam, &a[0], n)
    cdef Sampler smp
    sampler_init(&smp, n)
    cdef int64_t* buf = _alloc(n)
    cdef int64_t* mbuf = _alloc(n)
    cdef int64_t* cbuf = _alloc(n)
    cdef int64_t f = st.fitness, best = f, evals = 1, gens = 0
    cdef int64_t lam_int, ell, i, j, nm = 0, nc = 0, nt
    cdef double lam_real = lam0, p, c, bm, bc, fo
    cdef double grow = F ** (1.0 / 4)
    trace = [(best, evals)]
    ptrace = []
    try:
        while best < target and evals < budget:
            gens += 1
            if lam_ctl == GA_FITNESS:
                lam_int = min(<int64_t>ceil(sqrt(<double>n / (n - f))), n)
                lam_real = <double>lam_int
            elif lam_ctl == GA_ONE_FIFTH:
                lam_int = <int64_t>floor(lam_real + 0.5)
            else:
                lam_int = <int64_t>lam0
            p = lam_real / n
            c = 1.0 / lam_real
            ell = random_binomial(bg, p, n, &bt)
            bm = -INFINITY
            for i in range(lam_int):
                sample_distinct(&smp, bg, ell, buf)
                fo = a_toggle_eval(&st, buf, ell)
                evals += 1
                if fo > bm:
                    bm = fo
                    nm = ell
                    memcpy(mbuf, buf, ell * sizeof(int64_t))
                a_revert(&st, buf, ell)
            bc = -INFINITY
            for i in range(lam_int):
                nt = 0
                for j in range(nm):
                    if rnd_double(bg) < c:
                        buf[nt] = mbuf[j]
                        nt += 1
                fo = a_toggle_eval(&st, buf, nt)
                evals += 1
                if fo > bc:
                    bc = fo
                    nc = nt
                    memcpy(cbuf, buf, nt * sizeof(int64_t))
                a_revert(&st, buf, nt)
            if stride and gens % stride == 0:
                ptrace.append((gens, lam_real))
            if lam_ctl == GA_ONE_FIFTH:
                if bc > f:
                    lam_real = max(lam_real / F, 1.0)
                else:
                    lam_real = min(lam_real * grow, <double>n)
            if bc >= f:
                a_apply(&st, cbuf, nc)
                f = st.fitness
                if f > best:
                    best = f
                    trace.append((best, evals))
    finally:
        free(buf)
        free(mbuf)
        free(cbuf)
        free(smp.stamp)
    return evals, gens, best, trace, ptrace


# -- self-adaptive (1,lambda) EA -------------------------------------------------------------

def comma_run(rng, int kind, int64_t kparam, uint8_t[::1] a, int64_t budget, double target,
              int64_t lam, double factor, double r_lo, double r_hi, double r_init, int64_t stride):
    cdef bitgen_t* bg = _bitgen(rng)
    cdef binomial_t bt
    memset(&bt, 0, sizeof(binomial_t))
    cdef AState st
    cdef int64_t n = a.shape[0]
    a_init(&st, kind, kparam, &a[0], n)
    cdef Sampler smp
    sampler_init(&smp, n)
    cdef int64_t* buf = _alloc(n)
    cdef int64_t* bbuf = _alloc(n)
    cdef int64_t f = st.fitness, best = f, evals = 1, gens = 0, i, kk, nb = 0
    cdef double r = r_init, r_min = r_init, r_max = r_init, ri, br, bo, fo
    trace = [(best, evals)]
    ptrace = []
    try:
        while best < target and evals < budget:
            gens += 1
            bo = -INFINITY
            br = INFINITY
            for i in range(lam):
                ri = sa_child_rate(bg, r, factor, r_lo, r_hi)
                kk = random_binomial(bg, ri / n, n, &bt)
                sample_distinct(&smp, bg, kk, buf)
                fo = a_toggle_eval(&st, buf, kk)
                evals += 1
                if fo > bo or (fo == bo and ri < br):
                    bo = fo
                    br = ri
                    nb = kk
                    memcpy(bbuf, buf, kk * sizeof(int64_t))
                a_revert(&st, buf, kk)
            if stride and gens % stride == 0:
                ptrace.append((gens, r))
            a_apply(&st, bbuf, nb)
            f = st.fitness
            r = br
            r_min = min(r_min, r)
            r_max = max(r_max, r)
            if f > best:
                best = f
                trace.append((best, evals))
    finally:
        free(buf)
        free(bbuf)
        free(smp.stamp)
    return evals, gens, best, trace, ptrace, r_min, r_max


# -- RLS with per-coordinate velocities on integer strings --------------------------------

cdef inline int64_t _dist(int64_t x, int64_t z, int64_t r, int mode) noexcept nogil:
    cdef int64_t d = x - z if x >= z else z - x
    if mode == 1:
        return 1 if d else 0
    if mode == 3 and r - d < d:
        return r - d
    return d


def rab_run(rng, int64_t[::1] x, int64_t[::1] z, int64_t r, int mode, int64_t budget,
            double target, double A, double b, double v0, int64_t stride):
    cdef bitgen_t* bg = _bitgen(rng)
    cdef int64_t n = x.shape[0], i, step, cand, f = 0, fo, best, evals = 1, gens = 0
    cdef double cap = <double>max(<int64_t>1, r // 4)
    cdef double v_min = v0, v_max = v0
    cdef double* vel = <double*> malloc(n * sizeof(double))
    if vel == NULL:
        raise MemoryError()
    for i in range(n):
        vel[i] = v0
        f += _dist(x[i], z[i], r, mode)
    best = f
    trace = [(best, evals)]
    ptrace = []
    try:
        while best > target and evals < budget:
            gens += 1
            i = rnd_int(bg, n)
            step = <int64_t>vel[i]
            if rnd_double(bg) < 0.5:
                step = -step
            cand = x[i] + step
            if mode == 3:
                cand = cand % r
                if cand < 0:
                    cand += r
            elif cand < 0:
                cand = 0
            elif cand > r - 1:
                cand = r - 1
            fo = f - _dist(x[i], z[i], r, mode) + _dist(cand, z[i], r, mode)
            evals += 1
            if fo < f:
                vel[i] = min(A * vel[i], cap)
            else:
                vel[i] = max(b * vel[i], 1.0)
            if fo <= f:
                x[i] = cand
                f = fo
            v_min = min(v_min, vel[i])
            v_max = max(v_max, vel[i])
            if stride and gens % stride == 0:
                ptrace.append((gens, vel[i]))
            if f < best:
                best = f
                trace.append((best, evals))
    finally:
        free(vel)
    return evals, gens, best, trace, ptrace, v_min, v_max


# -- OneMax drift ---------------------------------------------------------------------------

_LOGFACT = {}


cdef double[::1] _log_factorials(int64_t n):
    cdef double[::1] t
    cdef double acc = 0.0
    cdef int64_t i
    arr = _LOGFACT.get(n)
    if arr is None:
        arr = np.zeros(n + 1)
        t = arr
        for i in range(2, n + 1):
            acc += log(<double>i)
            t[i] = acc
        _LOGFACT[n] = arr
    return arr


cdef double _drift(int64_t n, int64_t f, int64_t ell, double[::1] lf) noexcept:
    cdef int64_t d = n - f
    cdef int64_t lo_i = max(<int64_t>0, ell - f)
    cdef int64_t hi_i = min(ell, d)
    cdef int64_t h = ell // 2 + 1
    cdef int64_t mode, i
    cdef double lognorm, pmf, acc, mean
    if h > hi_i:
        return 0.0
    mode = ((ell + 1) * (d + 1)) // (n + 2)
    lognorm = lf[n] - lf[ell] - lf[n - ell]
    if mode < h:
        i = max(h, lo_i)
        pmf = exp((lf[d] - lf[i] - lf[d - i]) + (lf[f] - lf[ell - i] - lf[f - ell + i]) - lognorm)
        acc = 0.0
        while True:
            acc += pmf * (2 * i - ell)
            if i >= hi_i:
                break
            pmf *= <double>((d - i) * (ell - i)) / <double>((i + 1) * (f - ell + i + 1))
            i += 1
            if pmf * ell * ell < 1e-17 * acc:
                break
        return acc
    mean = ell * (2.0 * d / n - 1.0)
    i = min(h - 1, hi_i)
    if i < lo_i:
        return mean
    pmf = exp((lf[d] - lf[i] - lf[d - i]) + (lf[f] - lf[ell - i] - lf[f - ell + i]) - lognorm)
    acc = 0.0
    while True:
        acc += pmf * (ell - 2 * i)
        if i <= lo_i:
            break
        pmf *= <double>(i * (f - ell + i)) / <double>((d - i + 1) * (ell - i + 1))
        i -= 1
        if pmf * ell * ell < 1e-17 * (mean + acc):
            break
    return mean + acc


def drift_value(int64_t n, int64_t f, int64_t ell):
    return _drift(n, f, ell, _log_factorials(n))


def drift_argmax(int64_t n, int64_t f):
    cdef double[::1] lf = _log_factorials(n)
    cdef int64_t d = n - f, ell, best_ell = 1
    cdef double mu = 1.0 - 2.0 * d / n
    cdef double best = _drift(n, f, 1, lf), v, s, bound
    for ell in range(2, n + 1):
        v = _drift(n, f, ell, lf)
        if v > best * (1.0 + 1e-12):
            best_ell = ell
            best = v
        elif mu > 0 and mu * mu * ell >= 1.0:
            s = mu * sqrt(<double>ell)
            bound = sqrt(2 * M_PI * ell) * 0.5 * erfc(s / sqrt(2.0))
            if bound < best * (1.0 - 1e-9):
                break
    return best_ell
