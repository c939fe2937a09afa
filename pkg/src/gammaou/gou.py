"""Gamma-OU process operations.

Closed-form conditional characteristic functions, the gamma-remainder law
(cumulants, moments, mixed transition density) and five exact one-step
path samplers:

* ``sd_polya``:    Polya-indexed Erlang remainder draw (any parameters);
* ``sd_binomial``: binomial-indexed variant, exact when lam/k is integer;
* ``ar_pseudo``:   acceptance-rejection on the signed Erlang
  pseudo-mixture, valid when e^(-k dt) >= 1/2 at every step;
* ``lawrence``:    classic jump-time construction of the compound
  Poisson driver (Poisson count, sorted uniform jump times, decayed
  exponential jumps);
* ``qu``:          jump sizes drawn as exponentials with uniform-randomized
  rate beta*e^(k dt U), skipping the jump times.

All samplers are exact in law; they differ only in cost.
"""

import math
from functools import lru_cache

import numpy as np
from scipy.special import gammaln, xlogy
from scipy.special import logsumexp

from gammaou.params import (
    ConfigurationError,
    GouParams,
    Moments,
    ParameterError,
    PathSkeleton,
    RemainderParams,
    check_grid,
)
from gammaou.rng import RngStream
from gammaou.weights import (
    ar_tables,
    binomial_mixture_weights,
    polya_weight_array,
)

GOU_ALGORITHMS = ("sd_polya", "sd_binomial", "ar_pseudo", "lawrence", "qu")

DEFAULT_TRUNCATION = 40

_INTEGER_RTOL = 1e-9


def integer_shape(alpha: float) -> int | None:
    """Return round(alpha) when alpha is integer to relative tol 1e-9."""
    n = round(alpha)
    if n >= 1 and abs(alpha - n) <= _INTEGER_RTOL * max(1.0, abs(alpha)):
        return int(n)
    return None


# ----------------------------------------------------------------------
# Characteristic functions and moments
# ----------------------------------------------------------------------

def chf_gou_conditional(u, t: float, xs: float, p: GouParams):
    """Conditional CF of X(s+t) given X(s) = xs."""
    if not t > 0:
        raise ParameterError(f"t must be positive, got {t}")
    u = np.asarray(u, dtype=complex)
    a = p.decay(t)
    base = (p.beta - 1j * u * a) / (p.beta - 1j * u)
    out = np.exp(1j * u * xs * a) * base ** (p.lam / p.k)
    return out[()] if out.ndim == 0 else out


def chf_remainder(u, r: RemainderParams):
    """CF of the gamma a-remainder: ((beta - i a u)/(beta - i u))^alpha."""
    u = np.asarray(u, dtype=complex)
    out = ((r.beta - 1j * r.a * u) / (r.beta - 1j * u)) ** r.alpha
    return out[()] if out.ndim == 0 else out


def remainder_cumulant(n: int, r: RemainderParams) -> float:
    """n-th cumulant: (1 - a^n) times the parent gamma cumulant."""
    if n < 1 or int(n) != n:
        raise ParameterError(f"cumulant order must be a positive integer, got {n}")
    n = int(n)
    return (1.0 - r.a ** n) * r.alpha * math.gamma(n) / r.beta ** n


def remainder_moments(r: RemainderParams) -> Moments:
    """Mean, variance, skewness and non-excess kurtosis of the remainder."""
    a, alpha, beta = r.a, r.alpha, r.beta
    mean = (1.0 - a) * alpha / beta
    variance = (1.0 - a * a) * alpha / beta ** 2
    skewness = (1.0 - a ** 3) / (1.0 - a * a) ** 1.5 * 2.0 / math.sqrt(alpha)
    kurtosis = (1.0 + a * a) / (1.0 - a * a) * 6.0 / alpha + 3.0
    return Moments(mean, variance, skewness, kurtosis)


def gou_moments(p: GouParams, t: float) -> Moments:
    """Moments of X(t) given X(0) = x0; only the mean feels the decay term."""
    m = remainder_moments(p.remainder(t))
    return Moments(p.decay(t) * p.x0 + m.mean, m.variance, m.skewness, m.kurtosis)


# ----------------------------------------------------------------------
# Remainder sampling
# ----------------------------------------------------------------------

def sample_remainder_polya(stream: RngStream, r: RemainderParams, size=None):
    """Polya-indexed Erlang draw: B ~ Polya(alpha, 1-a), then Erl(B, beta/a)."""
    n = 1 if size is None else int(size)
    out = stream._fill("remainder_polya_fill", r.a, r.alpha, r.beta, size=n)
    return out[0].item() if size is None else out


def sample_remainder_binomial(stream: RngStream, nshape: int, a: float,
                              beta: float, size=None):
    """Binomial-indexed draw for integer shape: B ~ Bin(n, 1-a), then
    Erl(B, beta); note the rate is beta, not beta/a."""
    if nshape < 1 or int(nshape) != nshape:
        raise ParameterError(f"shape must be a positive integer, got {nshape}")
    if not (0.0 < a < 1.0):
        raise ParameterError(f"a must lie in (0, 1), got {a}")
    if not beta > 0:
        raise ParameterError(f"beta must be positive, got {beta}")
    n = 1 if size is None else int(size)
    out = stream._fill("remainder_binomial_fill", a, int(nshape), beta, size=n)
    return out[0].item() if size is None else out


def sample_remainder_ar(stream: RngStream, r: RemainderParams,
                        trunc: int = DEFAULT_TRUNCATION, size=None):
    """Acceptance-rejection draw from the signed pseudo-mixture (a >= 1/2)."""
    prob_cdf, coef_signed, coef_plus = ar_tables(r.alpha, r.a, trunc)
    n = 1 if size is None else int(size)
    out = stream._fill(
        "remainder_ar_fill", prob_cdf, coef_signed, coef_plus, r.beta, size=n
    )
    return out[0].item() if size is None else out


# ----------------------------------------------------------------------
# Transition density
# ----------------------------------------------------------------------

@lru_cache(maxsize=256)
def _gou_density_weights(a: float, alpha: float, beta: float, trunc: int):
    n_int = integer_shape(alpha)
    if n_int is not None:
        return binomial_mixture_weights(n_int, a).weights, beta
    return polya_weight_array(alpha, 1.0 - a, trunc), beta / a


def transition_density_gou(x, t: float, y: float, p: GouParams,
                           trunc: int = 200):
    """Mixed transition law of X(s+t) given X(s) = y.

    Returns ``(atom_prob, density)``: a point mass of a^alpha at x = a*y
    plus the continuous Erlang-mixture part evaluated at ``x`` (in
    log-space, zero below the atom).  When lam/k is an integer the exact
    finite binomial mixture is used instead of the truncated Polya one.
    """
    if not t > 0:
        raise ParameterError(f"t must be positive, got {t}")
    if not p.lam > 0:
        raise ParameterError("transition density needs lam > 0")
    if trunc < 1:
        raise ParameterError(f"truncation must be >= 1, got {trunc}")
    a = p.decay(t)
    alpha = p.alpha
    w, rate = _gou_density_weights(a, alpha, p.beta, trunc)

    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    z = np.atleast_1d(x) - a * y
    dens = np.zeros_like(z)
    pos = z > 0
    if pos.any():
        k = np.arange(1, w.shape[0])
        logw = np.log(w[1:])
        zz = z[pos][:, None]
        logpdf = (
            k * math.log(rate) + xlogy(k - 1, zz) - rate * zz - gammaln(k)
        )
        dens[pos] = np.exp(logsumexp(logpdf + logw[None, :], axis=1))
    atom_prob = a ** alpha
    return atom_prob, (dens[0] if scalar else dens)


def gou_density_tail_mass(t: float, p: GouParams, trunc: int = 200) -> float:
    """Mixture mass beyond the truncation (0 for integer lam/k)."""
    a = p.decay(t)
    if integer_shape(p.alpha) is not None:
        return 0.0
    return float(1.0 - polya_weight_array(p.alpha, 1.0 - a, trunc).sum())


# ----------------------------------------------------------------------
# Path simulation
# ----------------------------------------------------------------------

def _binomial_shape(p: GouParams, round_shape: bool) -> int:
    n_int = integer_shape(p.alpha)
    if n_int is not None:
        return n_int
    if round_shape:
        n_int = round(p.alpha)
        if n_int < 1:
            raise ConfigurationError(
                f"sd_binomial with round_shape needs lam/k >= 0.5, got {p.alpha}"
            )
        return int(n_int)
    raise ConfigurationError(
        f"sd_binomial requires integer lam/k (within rel. tol {_INTEGER_RTOL}); "
        f"got lam/k = {p.alpha!r}.  Pass round_shape=True to round explicitly."
    )


def _check_ar_grid(p, dts):
    a_min_ok = math.log(2.0)
    for m, dt in enumerate(dts):
        if p.k * dt > a_min_ok:
            raise ConfigurationError(
                f"ar_pseudo requires e^(-k*dt) >= 1/2 at every step; "
                f"step {m + 1} has dt = {dt} so e^(-k*dt) = {p.decay(dt):.4f}"
            )


def _simulate_core(stream, p, times, algorithm, n_paths, trunc, round_shape,
                   skeleton):
    times = check_grid(times)
    algorithm = str(algorithm).lower()
    if algorithm not in GOU_ALGORITHMS:
        raise ConfigurationError(
            f"unknown GOU algorithm {algorithm!r}; choose from {GOU_ALGORITHMS}"
        )
    if n_paths < 1:
        raise ConfigurationError(f"n_paths must be >= 1, got {n_paths}")
    dts = np.diff(times)
    jump_free = p.lam == 0.0
    n_int = 0
    if algorithm == "sd_binomial" and not jump_free:
        n_int = _binomial_shape(p, round_shape)
    if algorithm == "ar_pseudo":
        _check_ar_grid(p, dts)

    n_paths = int(n_paths)
    out = None
    if skeleton:
        out = np.empty((n_paths, times.shape[0]))
        out[:, 0] = p.x0
    level = np.full(n_paths, float(p.x0))
    ar_cache: dict[float, tuple] = {}
    for m, dt in enumerate(dts):
        a = p.decay(dt)
        if jump_free:
            level *= a
            if skeleton:
                out[:, m + 1] = level
            continue
        if algorithm == "sd_polya":
            z = stream._fill(
                "remainder_polya_fill", a, p.alpha, p.beta, size=n_paths
            )
        elif algorithm == "sd_binomial":
            z = stream._fill(
                "remainder_binomial_fill", a, n_int, p.beta, size=n_paths
            )
        elif algorithm == "ar_pseudo":
            tables = ar_cache.get(dt)
            if tables is None:
                tables = ar_cache[dt] = ar_tables(p.alpha, a, trunc)
            z = stream._fill(
                "remainder_ar_fill", *tables, p.beta, size=n_paths
            )
        elif algorithm == "lawrence":
            z = stream._fill(
                "lawrence_step_fill", p.k * dt, p.lam * dt, p.beta, size=n_paths
            )
        else:  # qu
            z = stream._fill(
                "qu_step_fill", p.k * dt, p.lam * dt, p.beta, size=n_paths
            )
        # X(t_m) = a X(t_{m-1}) + z, in place to keep the hot loop lean
        level *= a
        level += z
        if skeleton:
            out[:, m + 1] = level
    return out if skeleton else level


def simulate_paths(stream: RngStream, p: GouParams, times, algorithm: str,
                   n_paths: int, trunc: int = DEFAULT_TRUNCATION,
                   round_shape: bool = False) -> np.ndarray:
    """Simulate ``n_paths`` skeletons on ``times``; returns an
    (n_paths, len(times)) array with column 0 equal to x0."""
    return _simulate_core(stream, p, times, algorithm, n_paths, trunc,
                          round_shape, skeleton=True)


def simulate_terminal(stream: RngStream, p: GouParams, times, algorithm: str,
                      n_paths: int, trunc: int = DEFAULT_TRUNCATION,
                      round_shape: bool = False) -> np.ndarray:
    """Terminal values only (no skeleton storage); what benchmarks time."""
    return _simulate_core(stream, p, times, algorithm, n_paths, trunc,
                          round_shape, skeleton=False)


def simulate_path(stream: RngStream, p: GouParams, times, algorithm: str,
                  trunc: int = DEFAULT_TRUNCATION,
                  round_shape: bool = False) -> PathSkeleton:
    """Single-path variant of :func:`simulate_paths`."""
    values = simulate_paths(
        stream, p, times, algorithm, n_paths=1, trunc=trunc,
        round_shape=round_shape,
    )
    return PathSkeleton(times=np.asarray(times, dtype=float), values=values[0])
