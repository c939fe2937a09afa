"""Vectorized pure-numpy twin of the numba kernels.

Same SplitMix64 counter source, same ``(state, ...) -> (new_state, result)``
surface.  Uniform draws are bit-identical to the numba backend; samplers
built on rejection loops consume uniforms in a different (batched) order,
so their variates differ between backends while the law is identical.
"""

import math

import numpy as np
from scipy.special import gammaln

NAME = "numpy"

MASK = (1 << 64) - 1
GOLDEN_INT = 0x9E3779B97F4A7C15
GOLDEN = np.uint64(GOLDEN_INT)
MIX_A = np.uint64(0xBF58476D1CE4E5B9)
MIX_B = np.uint64(0x94D049BB133111EB)
S30 = np.uint64(30)
S27 = np.uint64(27)
S31 = np.uint64(31)
S11 = np.uint64(11)
TWO53INV = 1.0 / 9007199254740992.0
TWO_PI = 2.0 * math.pi


def _mix64(z):
    z = (z ^ (z >> S30)) * MIX_A
    z = (z ^ (z >> S27)) * MIX_B
    return z ^ (z >> S31)


def _advance(state, n):
    return np.uint64((int(state) + int(n) * GOLDEN_INT) & MASK)


def uniform_fill(state, n):
    idx = np.arange(1, n + 1, dtype=np.uint64) * GOLDEN
    z = _mix64(np.uint64(state) + idx)
    return _advance(state, n), (z >> S11) * TWO53INV


def exponential_fill(state, rate, n):
    state, u = uniform_fill(state, n)
    return state, -np.log1p(-u) / rate


def normal_fill(state, n):
    state, blk = uniform_fill(state, 2 * n)
    r = np.sqrt(-2.0 * np.log1p(-blk[0::2]))
    return state, r * np.cos(TWO_PI * blk[1::2])


def gamma_fill(state, shape, rate, n):
    if shape < 1.0:
        state, g = gamma_fill(state, shape + 1.0, 1.0, n)
        state, u = uniform_fill(state, n)
        return state, g * u ** (1.0 / shape) / rate
    out = np.empty(n)
    d = shape - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    pend = np.arange(n)
    while pend.size:
        m = pend.size
        state, x = normal_fill(state, m)
        state, u = uniform_fill(state, m)
        v = 1.0 + c * x
        v = v * v * v
        xx = x * x
        with np.errstate(divide="ignore", invalid="ignore"):
            acc = (v > 0.0) & (
                (u < 1.0 - 0.0331 * xx * xx)
                | (np.log(u) < 0.5 * xx + d * (1.0 - v + np.log(v)))
            )
        out[pend[acc]] = d * v[acc] / rate
        pend = pend[~acc]
    return state, out


def _gamma_fill_varying(state, shapes, rate):
    # Marsaglia-Tsang with per-element integer shapes >= 1.
    n = shapes.shape[0]
    out = np.empty(n)
    d_all = shapes - 1.0 / 3.0
    c_all = 1.0 / np.sqrt(9.0 * d_all)
    pend = np.arange(n)
    while pend.size:
        m = pend.size
        d = d_all[pend]
        c = c_all[pend]
        state, x = normal_fill(state, m)
        state, u = uniform_fill(state, m)
        v = 1.0 + c * x
        v = v * v * v
        xx = x * x
        with np.errstate(divide="ignore", invalid="ignore"):
            acc = (v > 0.0) & (
                (u < 1.0 - 0.0331 * xx * xx)
                | (np.log(u) < 0.5 * xx + d * (1.0 - v + np.log(v)))
            )
        out[pend[acc]] = d[acc] * v[acc] / rate
        pend = pend[~acc]
    return state, out


def erlang_fill(state, shape_int, rate, n):
    if shape_int == 0:
        return state, np.zeros(n)
    return gamma_fill(state, float(shape_int), rate, n)


def _poisson_knuth(state, mean, n):
    hi = math.exp(-mean)
    out = np.full(n, -1, np.int64)
    p = np.ones(n)
    active = np.arange(n)
    while active.size:
        state, u = uniform_fill(state, active.size)
        p[active] *= u
        out[active] += 1
        active = active[p[active] > hi]
    return state, out


def _poisson_ptrs(state, mean, n):
    # Hormann's PTRS, batched; mean may be a scalar or per-element array.
    mean = np.broadcast_to(np.asarray(mean, dtype=float), (n,))
    b = 0.931 + 2.53 * np.sqrt(mean)
    a = -0.059 + 0.02483 * b
    inv_alpha = 1.1239 + 1.1328 / (b - 3.4)
    v_r = 0.9277 - 3.6224 / (b - 2.0)
    log_mean = np.log(mean)
    out = np.zeros(n, np.int64)
    pend = np.arange(n)
    while pend.size:
        m = pend.size
        state, u = uniform_fill(state, m)
        u -= 0.5
        state, v = uniform_fill(state, m)
        us = 0.5 - np.abs(u)
        bp = b[pend]
        ap = a[pend]
        k = np.floor((2.0 * ap / us + bp) * u + mean[pend] + 0.43)
        acc = (us >= 0.07) & (v <= v_r[pend])
        rej = (k < 0.0) | ((us < 0.013) & (v > us))
        with np.errstate(divide="ignore", invalid="ignore"):
            lhs = np.log(v * inv_alpha[pend] / (ap / (us * us) + bp))
            acc |= ~rej & (
                lhs <= k * log_mean[pend] - mean[pend] - gammaln(k + 1.0)
            )
        out[pend[acc]] = k[acc].astype(np.int64)
        pend = pend[~acc]
    return state, out


def poisson_fill(state, mean, n):
    if mean <= 0.0:
        return state, np.zeros(n, np.int64)
    if mean < 10.0:
        return _poisson_knuth(state, mean, n)
    return _poisson_ptrs(state, mean, n)


def _poisson_fill_varying(state, means):
    n = means.shape[0]
    out = np.zeros(n, np.int64)
    small = means < 10.0
    idx = np.nonzero(small & (means > 0.0))[0]
    if idx.size:
        # batched Knuth with per-element threshold
        hi = np.exp(-means[idx])
        p = np.ones(idx.size)
        cnt = np.full(idx.size, -1, np.int64)
        active = np.arange(idx.size)
        while active.size:
            state, u = uniform_fill(state, active.size)
            p[active] *= u
            cnt[active] += 1
            active = active[p[active] > hi[active]]
        out[idx] = cnt
    idx = np.nonzero(~small)[0]
    if idx.size:
        state, big = _poisson_ptrs(state, means[idx], idx.size)
        out[idx] = big
    return state, out


def binomial_fill(state, ntrials, p, n):
    if ntrials == 0:
        return state, np.zeros(n, np.int64)
    state, u = uniform_fill(state, n * ntrials)
    return state, (u.reshape(n, ntrials) < p).sum(axis=1)


def polya_fill(state, alpha, p, n):
    state, g = gamma_fill(state, alpha, (1.0 - p) / p, n)
    return _poisson_fill_varying(state, g)


def double_exponential_fill(state, beta1, beta2, p, n):
    state, blk = uniform_fill(state, 2 * n)
    us = blk[0::2]
    mag = np.log1p(-blk[1::2])
    return state, np.where(us < p, -mag / beta1, mag / beta2)


# ----------------------------------------------------------------------
# Remainder-law draws
# ----------------------------------------------------------------------

def _polya_cdf_table(alpha, p):
    # cdf of Polya(alpha, p) out to negligible tail mass
    w = (1.0 - p) ** alpha
    cum = [w]
    k = 0
    while cum[-1] < 1.0 - 1e-16 and k < 100_000:
        w *= (alpha + k) * p / (k + 1.0)
        cum.append(cum[-1] + w)
        k += 1
    return np.asarray(cum)


def _polya_indices(state, alpha, p, n):
    # inversion from a precomputed cdf when cheap, gamma-Poisson otherwise
    if alpha * p / (1.0 - p) <= 32.0:
        cdf = _polya_cdf_table(alpha, p)
        state, u = uniform_fill(state, n)
        return state, np.searchsorted(cdf, u, side="right")
    return polya_fill(state, alpha, p, n)


def remainder_polya_fill(state, a, alpha, beta, n):
    state, b = _polya_indices(state, alpha, 1.0 - a, n)
    out = np.zeros(n)
    pos = np.nonzero(b > 0)[0]
    if pos.size:
        state, g = _gamma_fill_varying(state, b[pos].astype(float), beta / a)
        out[pos] = g
    return state, out


def remainder_binomial_fill(state, a, nshape, beta, n):
    state, b = binomial_fill(state, nshape, 1.0 - a, n)
    out = np.zeros(n)
    pos = np.nonzero(b > 0)[0]
    if pos.size:
        state, g = _gamma_fill_varying(state, b[pos].astype(float), beta)
        out[pos] = g
    return state, out


def _polyval(coef, z):
    acc = np.full_like(z, coef[-1])
    for j in range(coef.shape[0] - 2, -1, -1):
        acc = acc * z + coef[j]
    return acc


def remainder_ar_fill(state, prob_cdf, coef_signed, coef_plus, beta, n):
    out = np.zeros(n)
    pend = np.arange(n)
    while pend.size:
        m = pend.size
        state, u = uniform_fill(state, m)
        s = np.searchsorted(prob_cdf[:-1], u, side="right")
        hit_atom = s == 0
        out[pend[hit_atom]] = 0.0
        live = pend[~hit_atom]
        s = s[~hit_atom]
        if live.size == 0:
            pend = live
            continue
        state, z = _gamma_fill_varying(state, s.astype(float), 1.0)
        num = _polyval(coef_signed, z)
        den = _polyval(coef_plus, z)
        state, u2 = uniform_fill(state, live.size)
        acc = (den > 0.0) & (u2 * den <= num)
        out[live[acc]] = z[acc] / beta
        pend = live[~acc]
    return state, out


def remainder_sym_fill(state, a, alpha, beta, n):
    a2 = a * a
    state, b = _polya_indices(state, alpha, 1.0 - a2, n)
    out = np.zeros(n)
    pos = np.nonzero(b > 0)[0]
    if pos.size:
        shapes = b[pos].astype(float)
        state, gu = _gamma_fill_varying(state, shapes, beta / a)
        state, gd = _gamma_fill_varying(state, shapes, beta / a)
        out[pos] = gu - gd
    return state, out


def remainder_ar_sym_fill(state, prob_cdf, coef_signed, coef_plus, beta, n):
    out = np.zeros(n)
    pend = np.arange(n)
    while pend.size:
        m = pend.size
        state, u = uniform_fill(state, m)
        s = np.searchsorted(prob_cdf[:-1], u, side="right")
        hit_atom = s == 0
        out[pend[hit_atom]] = 0.0
        live = pend[~hit_atom]
        s = s[~hit_atom]
        if live.size == 0:
            pend = live
            continue
        shapes = s.astype(float)
        state, zu = _gamma_fill_varying(state, shapes, 1.0)
        state, zd = _gamma_fill_varying(state, shapes, 1.0)
        z = zu - zd
        az = np.abs(z)
        num = _polyval(coef_signed, az)
        den = _polyval(coef_plus, az)
        state, u2 = uniform_fill(state, live.size)
        acc = (den > 0.0) & (u2 * den <= num)
        out[live[acc]] = z[acc] / beta
        pend = live[~acc]
    return state, out


# ----------------------------------------------------------------------
# Compound-Poisson one-step increments
# ----------------------------------------------------------------------

def lawrence_step_fill(state, k_dt, lam_dt, beta, n):
    state, cnt = poisson_fill(state, lam_dt, n)
    tot = int(cnt.sum())
    if tot == 0:
        return state, np.zeros(n)
    state, u = uniform_fill(state, tot)
    state, jumps = exponential_fill(state, beta, tot)
    # the per-path sum is invariant under jump-time ordering, so the
    # sort of the uniforms is skipped here
    owner = np.repeat(np.arange(n), cnt)
    w = np.exp(-k_dt * (1.0 - u)) * jumps
    return state, np.bincount(owner, weights=w, minlength=n)


def qu_step_fill(state, k_dt, lam_dt, beta, n):
    state, cnt = poisson_fill(state, lam_dt, n)
    tot = int(cnt.sum())
    if tot == 0:
        return state, np.zeros(n)
    state, u = uniform_fill(state, tot)
    rates = beta * np.exp(k_dt * u)
    state, e = uniform_fill(state, tot)
    jumps = -np.log1p(-e) / rates
    owner = np.repeat(np.arange(n), cnt)
    return state, np.bincount(owner, weights=jumps, minlength=n)


def lawrence_sym_step_fill(state, k_dt, lam_dt, beta, n):
    state, cnt = poisson_fill(state, lam_dt, n)
    tot = int(cnt.sum())
    if tot == 0:
        return state, np.zeros(n)
    state, u = uniform_fill(state, tot)
    state, eu = exponential_fill(state, beta, tot)
    state, ed = exponential_fill(state, beta, tot)
    owner = np.repeat(np.arange(n), cnt)
    w = np.exp(-k_dt * (1.0 - u)) * (eu - ed)
    return state, np.bincount(owner, weights=w, minlength=n)


def qu_sym_step_fill(state, k_dt, lam_dt, beta, n):
    state, cnt = poisson_fill(state, lam_dt, n)
    tot = int(cnt.sum())
    if tot == 0:
        return state, np.zeros(n)
    state, u = uniform_fill(state, tot)
    rates = beta * np.exp(k_dt * u)
    state, eu = uniform_fill(state, tot)
    state, ed = uniform_fill(state, tot)
    jumps = (-np.log1p(-eu) + np.log1p(-ed)) / rates
    owner = np.repeat(np.arange(n), cnt)
    return state, np.bincount(owner, weights=jumps, minlength=n)
