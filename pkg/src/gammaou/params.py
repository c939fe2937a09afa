"""Process parameter bundles and shared domain types."""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


class Moments(NamedTuple):
    """First four standardized moments; kurtosis is non-excess."""

    mean: float
    variance: float
    skewness: float
    kurtosis: float


class ParameterError(ValueError):
    """A distribution or process parameter is out of range."""


class DomainError(ValueError):
    """A method was invoked outside its domain of validity."""


class ConfigurationError(ValueError):
    """A simulation configuration violates an algorithm precondition."""


@dataclass(frozen=True)
class GouParams:
    """Gamma-OU process: mean reversion ``k``, jump intensity ``lam``,
    jump-size rate ``beta``, initial state ``x0``.

    The stationary law is Gamma(lam/k, beta); the backward driver is a
    compound Poisson process with Exp(beta) jumps.
    """

    k: float
    lam: float
    beta: float
    x0: float = 0.0

    def __post_init__(self):
        # lam = 0 is tolerated as the documented jump-free degenerate case
        if not (self.k > 0 and self.lam >= 0 and self.beta > 0):
            raise ParameterError(
                f"k, beta must be positive and lam non-negative, got "
                f"({self.k}, {self.lam}, {self.beta})"
            )

    @property
    def alpha(self) -> float:
        return self.lam / self.k

    def decay(self, t: float) -> float:
        return math.exp(-self.k * t)

    def remainder(self, t: float) -> "RemainderParams":
        """Law of X(s+t) - a*X(s) for a step of length ``t``."""
        return RemainderParams(a=self.decay(t), alpha=self.alpha, beta=self.beta)


@dataclass(frozen=True)
class RemainderParams:
    """Residual law of a gamma self-decomposition X =law a*Y + Z_a.

    ``a`` is the decay factor in (0,1); (alpha, beta) are the shape and
    rate of the parent gamma law.
    """

    a: float
    alpha: float
    beta: float

    def __post_init__(self):
        if not (0.0 < self.a < 1.0):
            raise ParameterError(f"a must lie in (0, 1), got {self.a}")
        if not (self.alpha > 0 and self.beta > 0):
            raise ParameterError(
                f"alpha, beta must be positive, got ({self.alpha}, {self.beta})"
            )

    @classmethod
    def from_gou(cls, p: GouParams, dt: float) -> "RemainderParams":
        return p.remainder(dt)

    @property
    def atom_prob(self) -> float:
        return self.a ** self.alpha


@dataclass(frozen=True)
class BgouParams:
    """Bilateral Gamma-OU process: two jump intensities and rates sharing
    one mean-reversion speed ``k``.

    Equivalently an OU process driven by a compound Poisson with
    double-exponential jumps; see :meth:`from_bdlp`.
    """

    k: float
    lam1: float
    beta1: float
    lam2: float
    beta2: float
    x0: float = 0.0

    def __post_init__(self):
        vals = (self.k, self.lam1, self.beta1, self.lam2, self.beta2)
        if not all(v > 0 for v in vals):
            raise ParameterError(
                f"k and both (lam, beta) pairs must be positive, got {vals}"
            )

    @classmethod
    def from_bdlp(cls, k: float, lam: float, beta1: float, beta2: float,
                  p: float, x0: float = 0.0) -> "BgouParams":
        """Double-exponential-jump form: total intensity ``lam``, upward
        probability ``p``; maps to lam1 = p*lam, lam2 = (1-p)*lam."""
        if not (0.0 < p < 1.0):
            raise ParameterError(f"mixing p must lie in (0, 1), got {p}")
        return cls(k=k, lam1=p * lam, beta1=beta1,
                   lam2=(1.0 - p) * lam, beta2=beta2, x0=x0)

    @classmethod
    def symmetric_from(cls, k: float, lam: float, beta: float,
                       x0: float = 0.0) -> "BgouParams":
        """Symmetric process with total jump intensity ``lam``."""
        return cls(k=k, lam1=lam / 2.0, beta1=beta,
                   lam2=lam / 2.0, beta2=beta, x0=x0)

    def symmetric(self) -> bool:
        return self.lam1 == self.lam2 and self.beta1 == self.beta2

    @property
    def lam_total(self) -> float:
        return self.lam1 + self.lam2

    @property
    def alpha1(self) -> float:
        return self.lam1 / self.k

    @property
    def alpha2(self) -> float:
        return self.lam2 / self.k

    def decay(self, t: float) -> float:
        return math.exp(-self.k * t)

    def remainder(self, t: float) -> "BilateralRemainderParams":
        return BilateralRemainderParams(
            a=self.decay(t), alpha1=self.alpha1, beta1=self.beta1,
            alpha2=self.alpha2, beta2=self.beta2,
        )


@dataclass(frozen=True)
class BilateralRemainderParams:
    """Difference of two independent gamma remainders sharing ``a``."""

    a: float
    alpha1: float
    beta1: float
    alpha2: float
    beta2: float

    def __post_init__(self):
        if not (0.0 < self.a < 1.0):
            raise ParameterError(f"a must lie in (0, 1), got {self.a}")
        vals = (self.alpha1, self.beta1, self.alpha2, self.beta2)
        if not all(v > 0 for v in vals):
            raise ParameterError(f"shape/rate fields must be positive, got {vals}")

    def sides(self) -> tuple[RemainderParams, RemainderParams]:
        return (
            RemainderParams(self.a, self.alpha1, self.beta1),
            RemainderParams(self.a, self.alpha2, self.beta2),
        )

    @property
    def atom_prob(self) -> float:
        return self.a ** (self.alpha1 + self.alpha2)


@dataclass(frozen=True)
class PathSkeleton:
    """Process values on a strictly increasing time grid."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if times.ndim != 1 or times.shape != values.shape:
            raise ParameterError("times and values must be 1-d arrays of equal length")
        if times.size > 1 and not np.all(np.diff(times) > 0):
            raise ParameterError("times must be strictly increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)


def check_grid(times) -> np.ndarray:
    """Validate a simulation grid (strictly increasing, length >= 1)."""
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size < 1:
        raise ConfigurationError("time grid must be a non-empty 1-d array")
    if times.size > 1 and not np.all(np.diff(times) > 0):
        raise ConfigurationError("time grid must be strictly increasing")
    return times
