"""Mixture-weight computations for the remainder laws.

The gamma remainder is an infinite Erlang mixture with Polya weights; for
integer shape a finite binomial mixture exists, and for a >= 1/2 a signed
"pseudo-mixture" expansion drives the acceptance-rejection sampler.  All
recursions run in O(N) without evaluating binomial coefficients directly.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from gammaou.params import DomainError, ParameterError, RemainderParams

LOG2 = math.log(2.0)


@dataclass(frozen=True)
class MixtureWeights:
    """Truncated mixture weights w_0..w_N plus the derived envelope law.

    ``positive_mass`` is c = sum of positive weights; ``normalized_probs``
    is max(w, 0)/c.  For the Polya and binomial mixtures all weights are
    non-negative and c <= 1 (truncation); for the pseudo-mixture c >= 1.
    """

    weights: np.ndarray
    positive_mass: float
    normalized_probs: np.ndarray
    truncation: int
    tail_mass: float = field(default=0.0)

    @property
    def prob_cdf(self) -> np.ndarray:
        return np.cumsum(self.normalized_probs)


def _package(w: np.ndarray, trunc: int) -> MixtureWeights:
    pos = np.maximum(w, 0.0)
    c = float(pos.sum())
    return MixtureWeights(
        weights=w,
        positive_mass=c,
        normalized_probs=pos / c,
        truncation=trunc,
        tail_mass=float(1.0 - w.sum()),
    )


def polya_weight_array(alpha: float, p: float, trunc: int) -> np.ndarray:
    """Polya(alpha, p) pmf values for k = 0..trunc."""
    w = np.empty(trunc + 1)
    w[0] = (1.0 - p) ** alpha
    for k in range(trunc):
        w[k + 1] = w[k] * (alpha + k) * p / (k + 1.0)
    return w


def polya_mixture_weights(r: RemainderParams, trunc: int = 40) -> MixtureWeights:
    """Weights of the Erlang(beta/a) mixture representing the remainder law.

    w_k = C(alpha+k-1, k) a^alpha (1-a)^k; w_0 is the atom at zero.
    """
    if trunc < 1:
        raise ParameterError(f"truncation must be >= 1, got {trunc}")
    return _package(polya_weight_array(r.alpha, 1.0 - r.a, trunc), trunc)


def binomial_mixture_weights(nshape: int, a: float) -> MixtureWeights:
    """Finite Erlang(beta) mixture weights for integer shape: Bin(n, 1-a)."""
    if nshape < 1:
        raise ParameterError(f"integer shape must be >= 1, got {nshape}")
    w = np.empty(nshape + 1)
    w[0] = a ** nshape
    ratio = (1.0 - a) / a
    for k in range(nshape):
        w[k + 1] = w[k] * (nshape - k) / (k + 1.0) * ratio
    return _package(w, nshape)


def pseudo_weight_array(alpha: float, a: float, trunc: int) -> np.ndarray:
    """Signed weights w_k = C(alpha, k) a^(alpha-k) (1-a)^k, k = 0..trunc."""
    w = np.empty(trunc + 1)
    w[0] = a ** alpha
    ratio = (1.0 - a) / a
    for k in range(trunc):
        w[k + 1] = w[k] * (alpha - k) / (k + 1.0) * ratio
    return w


def pseudo_mixture_weights(r: RemainderParams, trunc: int = 40) -> MixtureWeights:
    """Signed Erlang(beta) pseudo-mixture weights; valid for a >= 1/2.

    The expansion only converges for 1/2 <= a < 1; below that the
    generalized binomial series diverges and a DomainError is raised.
    """
    if r.a < 0.5:
        raise DomainError(
            f"pseudo-mixture expansion requires a >= 1/2, got a={r.a}"
        )
    if trunc < 1:
        raise ParameterError(f"truncation must be >= 1, got {trunc}")
    return _package(pseudo_weight_array(r.alpha, r.a, trunc), trunc)


def symmetric_remainder_weights(alpha: float, a: float,
                                trunc: int = 40) -> MixtureWeights:
    """Polya(alpha, 1-a^2) weights of the bilateral-Erlang(beta/a) mixture
    representing the symmetric bilateral remainder; w_0 = a^(2 alpha)."""
    if not (0.0 < a < 1.0) or alpha <= 0:
        raise ParameterError(f"need 0 < a < 1 and alpha > 0, got ({a}, {alpha})")
    if trunc < 0:
        raise ParameterError(f"truncation must be >= 0, got {trunc}")
    return _package(polya_weight_array(alpha, 1.0 - a * a, trunc), trunc)


# ----------------------------------------------------------------------
# Acceptance-rejection tables
# ----------------------------------------------------------------------

# rejecting negative truncated density distorts the accepted law by at
# most the signed-sum deficit; refuse when it stops being negligible
MAX_TRUNCATION_DEFICIT = 1e-3


def _check_deficit(mw: MixtureWeights, what: str):
    deficit = abs(mw.tail_mass)
    if deficit > MAX_TRUNCATION_DEFICIT:
        raise DomainError(
            f"{what}: {mw.truncation}-term truncation leaves a signed-mass "
            f"deficit of {deficit:.3g}; increase the truncation (the "
            f"mixture bulk sits near k = alpha*(1-a)/a)"
        )


def ar_tables(alpha: float, a: float, trunc: int = 40):
    """Envelope cdf and acceptance polynomials for the one-sided sampler.

    On the standardized scale the k-th Erlang pdf is z^(k-1) e^(-z)/(k-1)!,
    so the k >= 1 part of the (pseudo-)mixture density is e^(-z) times a
    polynomial; the shared exponential cancels in the acceptance ratio.
    Returns (prob_cdf, coef_signed, coef_plus).
    """
    mw = pseudo_mixture_weights(RemainderParams(a, alpha, 1.0), trunc)
    _check_deficit(mw, "acceptance-rejection tables")
    w = mw.weights
    j = np.arange(trunc)
    inv_fact = np.exp(-gammaln(j + 1.0))
    coef_signed = w[1:] * inv_fact
    coef_plus = np.maximum(w[1:], 0.0) * inv_fact
    return mw.prob_cdf, coef_signed, coef_plus


def bilateral_pdf_log_coefs(n: int, m: int, log_b1: float, log_b2: float,
                            log_bsum: float) -> np.ndarray:
    """Log coefficients of x^j (j = 0..n-1) in the x >= 0 branch of the
    Erlang(n, b1) - Erlang(m, b2) density, the shared e^(-b1 x) factored out."""
    j = np.arange(n)
    return (
        n * log_b1 + m * log_b2
        + gammaln(n + m - j - 1.0) - gammaln(j + 1.0)
        - gammaln(n - j + 0.0) - gammaln(float(m))
        - (n + m - 1.0 - j) * log_bsum
    )


def ar_sym_tables(alpha: float, a: float, trunc: int = 40):
    """Tables for the symmetric bilateral sampler: weights are the signed
    pseudo-mixture in a^2, acceptance polynomials are in |z| with the
    shared e^(-|z|) factor cancelled."""
    a2 = a * a
    if a2 < 0.5:
        raise DomainError(
            f"bilateral pseudo-mixture requires a >= 1/sqrt(2), got a={a}"
        )
    mw = _package(pseudo_weight_array(alpha, a2, trunc), trunc)
    _check_deficit(mw, "bilateral acceptance-rejection tables")
    w = mw.weights
    coef_signed = np.zeros(trunc)
    coef_plus = np.zeros(trunc)
    for k in range(1, trunc + 1):
        ck = np.exp(bilateral_pdf_log_coefs(k, k, 0.0, 0.0, LOG2))
        coef_signed[: k] += w[k] * ck
        coef_plus[: k] += max(w[k], 0.0) * ck
    return mw.prob_cdf, coef_signed, coef_plus
