"""Bilateral Gamma-OU process operations.

The process is driven by the difference of two independent compound
Poisson processes (equivalently, one compound Poisson with
double-exponential jumps), so every one-step law is the difference of two
gamma remainders sharing the decay factor.  Exposed here: the conditional
CF, remainder cumulants, the Erlang-difference density, the mixed
transition density and five exact path samplers:

* ``sd_diff``:      difference of two one-sided remainder draws (any
  parameters);
* ``sd_sym``:       symmetric shortcut: one Polya(alpha, 1-a^2) index,
  bilateral Erlang draw;
* ``ar_sym``:       symmetric acceptance-rejection on the signed
  pseudo-mixture in a^2, needs e^(-k dt) >= 1/sqrt(2);
* ``lawrence_ext``: jump-time construction; for symmetric parameters a
  single Poisson stream with two-sided exponential jumps, otherwise the
  superposition of two one-sided runs;
* ``qu_sym``:       symmetric randomized-rate construction with centered
  Laplace jumps.
"""

import math
from functools import lru_cache

import numpy as np
from scipy.special import logsumexp, xlogy

from gammaou.params import (
    BgouParams,
    BilateralRemainderParams,
    ConfigurationError,
    Moments,
    ParameterError,
    PathSkeleton,
    check_grid,
)
from gammaou.rng import RngStream
from gammaou.weights import (
    ar_sym_tables,
    bilateral_pdf_log_coefs,
    polya_weight_array,
    symmetric_remainder_weights,
)

__all__ = [
    "BGOU_ALGORITHMS", "chf_bgou_conditional", "chf_bilateral_remainder",
    "bgou_cumulants", "bgou_moments", "erlang_difference_pdf",
    "transition_density_bgou", "bgou_density_tail_mass",
    "symmetric_remainder_weights", "simulate_paths_bgou",
    "simulate_path_bgou", "simulate_terminal_bgou",
]

BGOU_ALGORITHMS = ("sd_diff", "sd_sym", "ar_sym", "lawrence_ext", "qu_sym")

DEFAULT_TRUNCATION = 40
SYMMETRIC_ONLY = ("sd_sym", "ar_sym", "qu_sym")


# ----------------------------------------------------------------------
# Characteristic functions and moments
# ----------------------------------------------------------------------

def chf_bilateral_remainder(u, r: BilateralRemainderParams):
    """CF of the bilateral remainder: product of the two one-sided
    remainder CFs with opposite signs of u."""
    u = np.asarray(u, dtype=complex)
    up = ((r.beta1 - 1j * r.a * u) / (r.beta1 - 1j * u)) ** r.alpha1
    dn = ((r.beta2 + 1j * r.a * u) / (r.beta2 + 1j * u)) ** r.alpha2
    out = up * dn
    return out[()] if out.ndim == 0 else out


def chf_bgou_conditional(u, t: float, xs: float, p: BgouParams):
    """Conditional CF of X(s+t) given X(s) = xs."""
    if not t > 0:
        raise ParameterError(f"t must be positive, got {t}")
    u = np.asarray(u, dtype=complex)
    a = p.decay(t)
    out = np.exp(1j * u * xs * a) * chf_bilateral_remainder(u, p.remainder(t))
    return out[()] if out.ndim == 0 else out


def _bilateral_cumulant(n: int, r: BilateralRemainderParams) -> float:
    g = math.gamma(n)
    sign = -1.0 if n % 2 else 1.0
    return (1.0 - r.a ** n) * g * (
        r.alpha1 / r.beta1 ** n + sign * r.alpha2 / r.beta2 ** n
    )


def bgou_cumulants(r: BilateralRemainderParams) -> Moments:
    """Mean, variance, skewness, non-excess kurtosis of the bilateral
    remainder, assembled from kappa_n = (1-a^n)(kappa_n(up) + (-1)^n
    kappa_n(down))."""
    k1, k2, k3, k4 = (_bilateral_cumulant(n, r) for n in (1, 2, 3, 4))
    return Moments(k1, k2, k3 / k2 ** 1.5, k4 / k2 ** 2 + 3.0)


def bgou_moments(p: BgouParams, t: float) -> Moments:
    """Moments of X(t) given X(0) = x0."""
    m = bgou_cumulants(p.remainder(t))
    return Moments(p.decay(t) * p.x0 + m.mean, m.variance, m.skewness, m.kurtosis)


# ----------------------------------------------------------------------
# Densities
# ----------------------------------------------------------------------

def erlang_difference_pdf(x, n: int, m: int, beta1: float, beta2: float):
    """Density of Erlang(n, beta1) - Erlang(m, beta2) at ``x``.

    Evaluated in log-space from the convolution expansion; the x < 0
    branch is the exact reflection (m, n, beta2, beta1) at -x, so the
    reflection symmetry holds identically.
    """
    if n < 1 or m < 1:
        raise ParameterError(f"Erlang shapes must be >= 1, got ({n}, {m})")
    if not (beta1 > 0 and beta2 > 0):
        raise ParameterError(
            f"rates must be positive, got ({beta1}, {beta2})"
        )
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    xv = np.atleast_1d(x)
    out = np.empty_like(xv)
    pos = xv >= 0
    if pos.any():
        out[pos] = _edp_branch(xv[pos], int(n), int(m), beta1, beta2)
    if (~pos).any():
        out[~pos] = _edp_branch(-xv[~pos], int(m), int(n), beta2, beta1)
    return out[0] if scalar else out


def _edp_branch(xa: np.ndarray, n: int, m: int, b1: float, b2: float):
    logc = bilateral_pdf_log_coefs(
        n, m, math.log(b1), math.log(b2), math.log(b1 + b2)
    )
    j = np.arange(n)
    terms = logc[None, :] + xlogy(j[None, :], xa[:, None])
    return np.exp(logsumexp(terms, axis=1) - b1 * xa)


@lru_cache(maxsize=64)
def _remainder_log_coefs(a: float, alpha1: float, beta1: float,
                         alpha2: float, beta2: float, trunc: int):
    """Cached positive/negative-branch coefficient tables for the density
    of the bilateral remainder (grids and quadrature hit this repeatedly)."""
    bu = polya_weight_array(alpha1, 1.0 - a, trunc)
    bd = polya_weight_array(alpha2, 1.0 - a, trunc)
    r1 = beta1 / a
    r2 = beta2 / a
    return (
        _density_log_coefs(bu, bd, r1, r2, trunc),
        _density_log_coefs(bd, bu, r2, r1, trunc),
        r1, r2,
    )


def _density_log_coefs(bu, bd, r1, r2, trunc):
    """Log polynomial coefficients of the x > 0 branch of the remainder
    density, the shared e^(-r1 x) factored out: single-sided Erlang terms
    (n >= 1, m = 0) plus the double Erlang-difference series."""
    n_idx = np.arange(1, trunc + 1)
    logs = [np.full(trunc, -np.inf)]
    # one-sided terms: coefficient of x^(n-1) is b_n b_0 r1^n / (n-1)!
    with np.errstate(divide="ignore"):
        one_sided = np.full(trunc, -np.inf)
        one_sided[n_idx - 1] = (
            np.log(bu[1:]) + np.log(bd[0])
            + n_idx * math.log(r1) - np.array([math.lgamma(n) for n in n_idx])
        )
    logs.append(one_sided)
    log_r1, log_r2, log_rs = math.log(r1), math.log(r2), math.log(r1 + r2)
    with np.errstate(divide="ignore"):
        log_bu = np.log(bu)
        log_bd = np.log(bd)
    for n in range(1, trunc + 1):
        row = np.full(trunc, -np.inf)
        for m in range(1, trunc + 1):
            c = bilateral_pdf_log_coefs(n, m, log_r1, log_r2, log_rs)
            c = c + log_bu[n] + log_bd[m]
            row[: n] = np.logaddexp(row[: n], c)
        logs.append(row)
    return logsumexp(np.vstack(logs), axis=0)


def transition_density_bgou(x, t: float, y: float, p: BgouParams,
                            trunc: int = 60):
    """Mixed transition law of the bilateral process.

    Returns ``(atom_prob, density)``: point mass a^(alpha1+alpha2) at
    x = a*y plus the continuous part, a double Polya-weighted series of
    Erlang-difference densities with rates beta1/a and beta2/a truncated
    at ``trunc`` in each index.
    """
    if not t > 0:
        raise ParameterError(f"t must be positive, got {t}")
    if trunc < 1:
        raise ParameterError(f"truncation must be >= 1, got {trunc}")
    a = p.decay(t)
    coef_pos, coef_neg, r1, r2 = _remainder_log_coefs(
        a, p.alpha1, p.beta1, p.alpha2, p.beta2, trunc
    )

    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    z = np.atleast_1d(x) - a * y
    dens = np.empty_like(z)
    j = np.arange(trunc)
    pos = z >= 0
    if pos.any():
        zz = z[pos][:, None]
        terms = coef_pos[None, :] + xlogy(j[None, :], zz)
        dens[pos] = np.exp(logsumexp(terms, axis=1) - r1 * z[pos])
    if (~pos).any():
        zz = -z[~pos][:, None]
        terms = coef_neg[None, :] + xlogy(j[None, :], zz)
        dens[~pos] = np.exp(logsumexp(terms, axis=1) - r2 * (-z[~pos]))
    atom_prob = a ** (p.alpha1 + p.alpha2)
    return atom_prob, (dens[0] if scalar else dens)


def bgou_density_tail_mass(t: float, p: BgouParams, trunc: int = 60) -> float:
    """Mass outside the truncation window: 1 - (sum b_up)(sum b_down)."""
    a = p.decay(t)
    su = polya_weight_array(p.alpha1, 1.0 - a, trunc).sum()
    sd = polya_weight_array(p.alpha2, 1.0 - a, trunc).sum()
    return float(1.0 - su * sd)


# ----------------------------------------------------------------------
# Path simulation
# ----------------------------------------------------------------------

def _require_symmetric(p: BgouParams, algorithm: str):
    if not p.symmetric():
        raise ConfigurationError(
            f"{algorithm} requires symmetric parameters "
            f"(lam1 == lam2 and beta1 == beta2)"
        )


def _check_ar_sym_grid(p: BgouParams, dts):
    limit = 0.5 * math.log(2.0)
    for m, dt in enumerate(dts):
        if p.k * dt > limit:
            raise ConfigurationError(
                f"ar_sym requires e^(-k*dt) >= 1/sqrt(2) at every step; "
                f"step {m + 1} has dt = {dt} so e^(-k*dt) = {p.decay(dt):.4f}"
            )


def _simulate_core(stream, p, times, algorithm, n_paths, trunc, skeleton):
    times = check_grid(times)
    algorithm = str(algorithm).lower()
    if algorithm not in BGOU_ALGORITHMS:
        raise ConfigurationError(
            f"unknown BGOU algorithm {algorithm!r}; choose from {BGOU_ALGORITHMS}"
        )
    if n_paths < 1:
        raise ConfigurationError(f"n_paths must be >= 1, got {n_paths}")
    if algorithm in SYMMETRIC_ONLY:
        _require_symmetric(p, algorithm)
    dts = np.diff(times)
    if algorithm == "ar_sym":
        _check_ar_sym_grid(p, dts)
    # symmetric shortcut samplers draw one index for the total intensity
    alpha_sym = p.lam_total / (2.0 * p.k)

    n_paths = int(n_paths)
    out = None
    if skeleton:
        out = np.empty((n_paths, times.shape[0]))
        out[:, 0] = p.x0
    level = np.full(n_paths, float(p.x0))
    ar_cache: dict[float, tuple] = {}
    for m, dt in enumerate(dts):
        a = p.decay(dt)
        if algorithm == "sd_diff":
            z = stream._fill(
                "remainder_polya_fill", a, p.alpha1, p.beta1, size=n_paths
            )
            z -= stream._fill(
                "remainder_polya_fill", a, p.alpha2, p.beta2, size=n_paths
            )
        elif algorithm == "sd_sym":
            z = stream._fill(
                "remainder_sym_fill", a, alpha_sym, p.beta1, size=n_paths
            )
        elif algorithm == "ar_sym":
            tables = ar_cache.get(dt)
            if tables is None:
                tables = ar_cache[dt] = ar_sym_tables(alpha_sym, a, trunc)
            z = stream._fill(
                "remainder_ar_sym_fill", *tables, p.beta1, size=n_paths
            )
        elif algorithm == "lawrence_ext":
            if p.symmetric():
                z = stream._fill(
                    "lawrence_sym_step_fill",
                    p.k * dt, p.lam_total * dt, p.beta1, size=n_paths,
                )
            else:
                z = stream._fill(
                    "lawrence_step_fill",
                    p.k * dt, p.lam1 * dt, p.beta1, size=n_paths,
                )
                z -= stream._fill(
                    "lawrence_step_fill",
                    p.k * dt, p.lam2 * dt, p.beta2, size=n_paths,
                )
        else:  # qu_sym
            z = stream._fill(
                "qu_sym_step_fill",
                p.k * dt, p.lam_total * dt, p.beta1, size=n_paths,
            )
        level *= a
        level += z
        if skeleton:
            out[:, m + 1] = level
    return out if skeleton else level


def simulate_paths_bgou(stream: RngStream, p: BgouParams, times,
                        algorithm: str, n_paths: int,
                        trunc: int = DEFAULT_TRUNCATION) -> np.ndarray:
    """Simulate ``n_paths`` bilateral skeletons on ``times``."""
    return _simulate_core(stream, p, times, algorithm, n_paths, trunc,
                          skeleton=True)


def simulate_terminal_bgou(stream: RngStream, p: BgouParams, times,
                           algorithm: str, n_paths: int,
                           trunc: int = DEFAULT_TRUNCATION) -> np.ndarray:
    """Terminal values only (no skeleton storage); what benchmarks time."""
    return _simulate_core(stream, p, times, algorithm, n_paths, trunc,
                          skeleton=False)


def simulate_path_bgou(stream: RngStream, p: BgouParams, times,
                       algorithm: str,
                       trunc: int = DEFAULT_TRUNCATION) -> PathSkeleton:
    """Single-path variant of :func:`simulate_paths_bgou`."""
    values = simulate_paths_bgou(
        stream, p, times, algorithm, n_paths=1, trunc=trunc
    )
    return PathSkeleton(times=np.asarray(times, dtype=float), values=values[0])
