"""Numba-compiled sampling kernels.

All randomness comes from a SplitMix64 counter sequence: the stream state is
a single uint64 advanced by a fixed odd increment per draw, and each output
is a bijective mix of the state.  Distinct states never collide within a
stream, and the numpy twin module reproduces the identical uniform sequence.

Every kernel takes the current state and returns ``(new_state, result)``.
"""

import math

import numpy as np
from numba import njit

NAME = "numba"

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
MIX_A = np.uint64(0xBF58476D1CE4E5B9)
MIX_B = np.uint64(0x94D049BB133111EB)
S30 = np.uint64(30)
S27 = np.uint64(27)
S31 = np.uint64(31)
S11 = np.uint64(11)
TWO53INV = 1.0 / 9007199254740992.0
TWO_PI = 2.0 * math.pi


@njit(inline="always", nogil=True, cache=True)
def _mix64(z):
    z = (z ^ (z >> S30)) * MIX_A
    z = (z ^ (z >> S27)) * MIX_B
    return z ^ (z >> S31)


@njit(inline="always", nogil=True, cache=True)
def _next_u(state):
    state = state + GOLDEN
    return state, (_mix64(state) >> S11) * TWO53INV


@njit(inline="always", nogil=True, cache=True)
def _draw_exponential(state, rate):
    state, u = _next_u(state)
    return state, -math.log1p(-u) / rate


@njit(inline="always", nogil=True, cache=True)
def _draw_normal(state):
    # Box-Muller, cosine branch only (2 uniforms per normal).
    state, u1 = _next_u(state)
    state, u2 = _next_u(state)
    r = math.sqrt(-2.0 * math.log1p(-u1))
    return state, r * math.cos(TWO_PI * u2)


@njit(nogil=True, cache=True)
def _draw_gamma(state, shape, rate):
    # Marsaglia-Tsang squeeze/rejection; shape < 1 handled by the
    # boost Gamma(shape) = Gamma(shape+1) * U^(1/shape).
    boost = 1.0
    if shape < 1.0:
        state, u = _next_u(state)
        boost = u ** (1.0 / shape)
        shape = shape + 1.0
    d = shape - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    while True:
        state, x = _draw_normal(state)
        v = 1.0 + c * x
        if v <= 0.0:
            continue
        v = v * v * v
        state, u = _next_u(state)
        xx = x * x
        if u < 1.0 - 0.0331 * xx * xx:
            break
        if math.log(u) < 0.5 * xx + d * (1.0 - v + math.log(v)):
            break
    return state, boost * d * v / rate


@njit(nogil=True, cache=True)
def _draw_poisson_large(state, mean):
    # Hormann's PTRS transformed rejection, exact for mean >= 10.
    b = 0.931 + 2.53 * math.sqrt(mean)
    a = -0.059 + 0.02483 * b
    inv_alpha = 1.1239 + 1.1328 / (b - 3.4)
    v_r = 0.9277 - 3.6224 / (b - 2.0)
    log_mean = math.log(mean)
    while True:
        state, u = _next_u(state)
        u -= 0.5
        state, v = _next_u(state)
        us = 0.5 - abs(u)
        k = math.floor((2.0 * a / us + b) * u + mean + 0.43)
        if us >= 0.07 and v <= v_r:
            return state, int(k)
        if k < 0.0 or (us < 0.013 and v > us):
            continue
        lhs = math.log(v * inv_alpha / (a / (us * us) + b))
        if lhs <= k * log_mean - mean - math.lgamma(k + 1.0):
            return state, int(k)


@njit(nogil=True, cache=True)
def _draw_poisson(state, mean):
    if mean <= 0.0:
        return state, 0
    if mean >= 10.0:
        return _draw_poisson_large(state, mean)
    hi = math.exp(-mean)
    if hi >= 1.0:
        # mean below float resolution of exp; the count is 0 a.s.
        return state, 0
    k = -1
    p = 1.0
    while p > hi:
        state, u = _next_u(state)
        p *= u
        k += 1
    return state, k


@njit(inline="always", nogil=True, cache=True)
def _draw_polya_inv(state, alpha, one_minus_a, w0):
    # Inversion of the Polya(alpha, 1-a) pmf via the weight recursion
    # w_{k+1} = w_k (alpha+k)(1-a)/(k+1); expected walk length 1 + mean.
    state, u = _next_u(state)
    k = 0
    w = w0
    cum = w0
    while u >= cum:
        w *= (alpha + k) * one_minus_a / (k + 1.0)
        cum += w
        k += 1
        if k > 100_000_000:
            break
    return state, k


@njit(nogil=True, cache=True)
def _draw_polya_gp(state, alpha, p):
    # Gamma-Poisson mixture: G ~ Gamma(alpha, scale p/(1-p)), S ~ Poisson(G).
    state, g = _draw_gamma(state, alpha, (1.0 - p) / p)
    return _draw_poisson(state, g)


@njit(inline="always", nogil=True, cache=True)
def _horner(coef, z):
    acc = coef[coef.shape[0] - 1]
    for j in range(coef.shape[0] - 2, -1, -1):
        acc = acc * z + coef[j]
    return acc


# ----------------------------------------------------------------------
# Block fills (public surface, mirrored by the numpy twin)
# ----------------------------------------------------------------------

@njit(nogil=True, cache=True)
def uniform_fill(state, n):
    out = np.empty(n)
    for i in range(n):
        state, out[i] = _next_u(state)
    return state, out


@njit(nogil=True, cache=True)
def exponential_fill(state, rate, n):
    out = np.empty(n)
    for i in range(n):
        state, out[i] = _draw_exponential(state, rate)
    return state, out


@njit(nogil=True, cache=True)
def normal_fill(state, n):
    out = np.empty(n)
    for i in range(n):
        state, out[i] = _draw_normal(state)
    return state, out


@njit(nogil=True, cache=True)
def gamma_fill(state, shape, rate, n):
    out = np.empty(n)
    for i in range(n):
        state, out[i] = _draw_gamma(state, shape, rate)
    return state, out


@njit(nogil=True, cache=True)
def erlang_fill(state, shape_int, rate, n):
    out = np.zeros(n)
    if shape_int == 0:
        return state, out
    for i in range(n):
        state, out[i] = _draw_gamma(state, float(shape_int), rate)
    return state, out


@njit(nogil=True, cache=True)
def poisson_fill(state, mean, n):
    out = np.zeros(n, np.int64)
    if mean <= 0.0:
        return state, out
    if mean >= 10.0:
        for i in range(n):
            state, out[i] = _draw_poisson_large(state, mean)
        return state, out
    hi = math.exp(-mean)
    if hi >= 1.0:
        return state, out
    for i in range(n):
        k = -1
        p = 1.0
        while p > hi:
            state, u = _next_u(state)
            p *= u
            k += 1
        out[i] = k
    return state, out


@njit(nogil=True, cache=True)
def binomial_fill(state, ntrials, p, n):
    out = np.zeros(n, np.int64)
    for i in range(n):
        cnt = 0
        for _ in range(ntrials):
            state, u = _next_u(state)
            if u < p:
                cnt += 1
        out[i] = cnt
    return state, out


@njit(nogil=True, cache=True)
def polya_fill(state, alpha, p, n):
    out = np.empty(n, np.int64)
    for i in range(n):
        state, out[i] = _draw_polya_gp(state, alpha, p)
    return state, out


@njit(nogil=True, cache=True)
def double_exponential_fill(state, beta1, beta2, p, n):
    out = np.empty(n)
    for i in range(n):
        state, u = _next_u(state)
        state, e = _next_u(state)
        if u < p:
            out[i] = -math.log1p(-e) / beta1
        else:
            out[i] = math.log1p(-e) / beta2
    return state, out


# ----------------------------------------------------------------------
# Remainder-law draws (one OU step each)
# ----------------------------------------------------------------------

@njit(nogil=True, cache=True)
def remainder_polya_fill(state, a, alpha, beta, n):
    out = np.zeros(n)
    w0 = a ** alpha
    one_minus_a = 1.0 - a
    rate = beta / a
    # pmf inversion is O(1 + mean); hand off to gamma-Poisson when the
    # expected index is large (very coarse grids).
    use_inv = alpha * one_minus_a / a <= 32.0
    for i in range(n):
        if use_inv:
            state, b = _draw_polya_inv(state, alpha, one_minus_a, w0)
        else:
            state, b = _draw_polya_gp(state, alpha, one_minus_a)
        if b > 0:
            state, out[i] = _draw_gamma(state, float(b), rate)
    return state, out


@njit(nogil=True, cache=True)
def remainder_binomial_fill(state, a, nshape, beta, n):
    out = np.zeros(n)
    p = 1.0 - a
    for i in range(n):
        cnt = 0
        for _ in range(nshape):
            state, u = _next_u(state)
            if u < p:
                cnt += 1
        if cnt > 0:
            state, out[i] = _draw_gamma(state, float(cnt), beta)
    return state, out


@njit(nogil=True, cache=True)
def remainder_ar_fill(state, prob_cdf, coef_signed, coef_plus, beta, n):
    # Bignami-de Matteis acceptance-rejection on the signed Erlang
    # pseudo-mixture.  prob_cdf is the cdf of the envelope index law;
    # coef_* are the z-polynomial coefficients of the k>=1 mixture parts
    # on the standardized (rate 1) scale, shared e^{-z} factor cancelled.
    out = np.zeros(n)
    top = prob_cdf.shape[0] - 1
    for i in range(n):
        while True:
            state, u = _next_u(state)
            s = 0
            while s < top and u >= prob_cdf[s]:
                s += 1
            if s == 0:
                out[i] = 0.0
                break
            state, z = _draw_gamma(state, float(s), 1.0)
            num = _horner(coef_signed, z)
            den = _horner(coef_plus, z)
            state, u2 = _next_u(state)
            if den > 0.0 and u2 * den <= num:
                out[i] = z / beta
                break
    return state, out


@njit(nogil=True, cache=True)
def remainder_sym_fill(state, a, alpha, beta, n):
    # Symmetric bilateral remainder: one Polya(alpha, 1-a^2) index, then
    # the difference of two independent Erlangs with rate beta/a.
    out = np.zeros(n)
    a2 = a * a
    w0 = a2 ** alpha
    one_minus_a2 = 1.0 - a2
    rate = beta / a
    use_inv = alpha * one_minus_a2 / a2 <= 32.0
    for i in range(n):
        if use_inv:
            state, b = _draw_polya_inv(state, alpha, one_minus_a2, w0)
        else:
            state, b = _draw_polya_gp(state, alpha, one_minus_a2)
        if b > 0:
            state, zu = _draw_gamma(state, float(b), rate)
            state, zd = _draw_gamma(state, float(b), rate)
            out[i] = zu - zd
    return state, out


@njit(nogil=True, cache=True)
def remainder_ar_sym_fill(state, prob_cdf, coef_signed, coef_plus, beta, n):
    # As remainder_ar_fill but with bilateral-Erlang proposals and the
    # acceptance polynomials evaluated in |z|.
    out = np.zeros(n)
    top = prob_cdf.shape[0] - 1
    for i in range(n):
        while True:
            state, u = _next_u(state)
            s = 0
            while s < top and u >= prob_cdf[s]:
                s += 1
            if s == 0:
                out[i] = 0.0
                break
            state, zu = _draw_gamma(state, float(s), 1.0)
            state, zd = _draw_gamma(state, float(s), 1.0)
            z = zu - zd
            az = abs(z)
            num = _horner(coef_signed, az)
            den = _horner(coef_plus, az)
            state, u2 = _next_u(state)
            if den > 0.0 and u2 * den <= num:
                out[i] = z / beta
                break
    return state, out


# ----------------------------------------------------------------------
# Compound-Poisson one-step increments (literature baselines)
# ----------------------------------------------------------------------

@njit(nogil=True, cache=True)
def lawrence_step_fill(state, k_dt, lam_dt, beta, n):
    # Sum of exponential jumps decayed from sorted uniform jump times.
    out = np.zeros(n)
    small_mean = lam_dt < 10.0
    hi = math.exp(-lam_dt) if small_mean else 0.0
    buf = np.empty(32)
    for i in range(n):
        if small_mean:
            cnt = -1
            p = 1.0
            while p > hi:
                state, u = _next_u(state)
                p *= u
                cnt += 1
            if cnt < 0:
                cnt = 0
        else:
            state, cnt = _draw_poisson_large(state, lam_dt)
        if cnt == 0:
            continue
        if cnt > buf.shape[0]:
            buf = np.empty(cnt)
        for j in range(cnt):
            state, buf[j] = _next_u(state)
        # insertion sort of the jump-time uniforms
        for j in range(1, cnt):
            key = buf[j]
            m = j - 1
            while m >= 0 and buf[m] > key:
                buf[m + 1] = buf[m]
                m -= 1
            buf[m + 1] = key
        tot = 0.0
        for j in range(cnt):
            state, e = _draw_exponential(state, beta)
            tot += math.exp(-k_dt * (1.0 - buf[j])) * e
        out[i] = tot
    return state, out


@njit(nogil=True, cache=True)
def qu_step_fill(state, k_dt, lam_dt, beta, n):
    # Jumps are exponentials with uniform-randomized rate beta*e^{k dt U}.
    out = np.zeros(n)
    small_mean = lam_dt < 10.0
    hi = math.exp(-lam_dt) if small_mean else 0.0
    for i in range(n):
        if small_mean:
            cnt = -1
            p = 1.0
            while p > hi:
                state, u = _next_u(state)
                p *= u
                cnt += 1
            if cnt < 0:
                cnt = 0
        else:
            state, cnt = _draw_poisson_large(state, lam_dt)
        tot = 0.0
        for j in range(cnt):
            state, u = _next_u(state)
            bi = beta * math.exp(k_dt * u)
            state, e = _draw_exponential(state, bi)
            tot += e
        out[i] = tot
    return state, out


@njit(nogil=True, cache=True)
def lawrence_sym_step_fill(state, k_dt, lam_dt, beta, n):
    # Symmetric variant: each jump is the difference of two independent
    # exponentials with rate beta, decayed from its (sorted) jump time.
    out = np.zeros(n)
    small_mean = lam_dt < 10.0
    hi = math.exp(-lam_dt) if small_mean else 0.0
    buf = np.empty(32)
    for i in range(n):
        if small_mean:
            cnt = -1
            p = 1.0
            while p > hi:
                state, u = _next_u(state)
                p *= u
                cnt += 1
            if cnt < 0:
                cnt = 0
        else:
            state, cnt = _draw_poisson_large(state, lam_dt)
        if cnt == 0:
            continue
        if cnt > buf.shape[0]:
            buf = np.empty(cnt)
        for j in range(cnt):
            state, buf[j] = _next_u(state)
        for j in range(1, cnt):
            key = buf[j]
            m = j - 1
            while m >= 0 and buf[m] > key:
                buf[m + 1] = buf[m]
                m -= 1
            buf[m + 1] = key
        tot = 0.0
        for j in range(cnt):
            state, eu = _draw_exponential(state, beta)
            state, ed = _draw_exponential(state, beta)
            tot += math.exp(-k_dt * (1.0 - buf[j])) * (eu - ed)
        out[i] = tot
    return state, out


@njit(nogil=True, cache=True)
def qu_sym_step_fill(state, k_dt, lam_dt, beta, n):
    # Symmetric variant: centered Laplace jumps with randomized rate,
    # both exponentials of a jump sharing the same uniform.
    out = np.zeros(n)
    small_mean = lam_dt < 10.0
    hi = math.exp(-lam_dt) if small_mean else 0.0
    for i in range(n):
        if small_mean:
            cnt = -1
            p = 1.0
            while p > hi:
                state, u = _next_u(state)
                p *= u
                cnt += 1
            if cnt < 0:
                cnt = 0
        else:
            state, cnt = _draw_poisson_large(state, lam_dt)
        tot = 0.0
        for j in range(cnt):
            state, u = _next_u(state)
            bi = beta * math.exp(k_dt * u)
            state, eu = _draw_exponential(state, bi)
            state, ed = _draw_exponential(state, bi)
            tot += eu - ed
        out[i] = tot
    return state, out
