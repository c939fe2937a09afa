"""Seedable, splittable random variate streams.

An :class:`RngStream` is identified by ``(seed, stream_id)``.  The uniform
source is a SplitMix64 counter sequence keyed on that pair, so distinct
pairs give statistically independent streams and the same pair replays the
identical uniform sequence bit-for-bit on every run and platform.

Variate-level reproducibility is per backend: uniform and binomial draws
are bit-identical across the numba and numpy backends; exponential and
double-exponential draws consume the same uniforms and agree to within a
unit in the last place (libm vs numpy elementwise transcendentals);
samplers built on rejection (gamma, Erlang, Poisson, Polya) consume
uniforms in backend-specific order and agree in law only.
"""

import numpy as np

from gammaou import _backend
from gammaou.params import ParameterError

_MASK = (1 << 64) - 1


def _mix64_int(z: int) -> int:
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return (z ^ (z >> 31)) & _MASK


def _initial_state(seed: int, stream_id: int) -> int:
    z = _mix64_int(seed)
    z ^= _mix64_int((stream_id * 0xD1B54A32D192ED03 + 0x9E3779B97F4A7C15) & _MASK)
    return _mix64_int(z)


class RngStream:
    """One deterministic variate stream.

    Parameters
    ----------
    seed : int
        Base seed shared by all substreams of one experiment.
    stream_id : int, optional
        Substream index; workers simulating in parallel take disjoint ids.
    backend : str, optional
        ``"numba"`` or ``"numpy"``; default is the active backend
        (``GAMMAOU_BACKEND`` environment variable).
    """

    def __init__(self, seed: int, stream_id: int = 0, backend: str | None = None):
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        self._kern = _backend.kernels(backend)
        self.backend = self._kern.NAME
        self._state = np.uint64(_initial_state(self.seed, self.stream_id))

    def __repr__(self):
        return (f"RngStream(seed={self.seed}, stream_id={self.stream_id}, "
                f"backend={self.backend!r})")

    def spawn(self, stream_id: int) -> "RngStream":
        """Fresh stream with the same seed and a new substream index."""
        return RngStream(self.seed, stream_id, self.backend)

    @property
    def state(self) -> int:
        return int(self._state)

    def _fill(self, fname, *args, size):
        fn = getattr(self._kern, fname)
        state, out = fn(self._state, *args, size)
        # numba unboxes uint64 to a python int; recast so the next call
        # specializes on uint64 again (int64 state would promote to float)
        self._state = np.uint64(state)
        return out

    @staticmethod
    def _ret(out, size):
        if size is None:
            return out[0].item()
        return out

    def uniform(self, size=None):
        """Uniform[0, 1) draws."""
        n = 1 if size is None else int(size)
        return self._ret(self._fill("uniform_fill", size=n), size)

    def exponential(self, rate, size=None):
        """Exp(rate) draws via inversion u -> -log(1-u)/rate."""
        if not rate > 0:
            raise ParameterError(f"rate must be positive, got {rate}")
        n = 1 if size is None else int(size)
        return self._ret(self._fill("exponential_fill", float(rate), size=n), size)

    def gamma(self, shape, rate, size=None):
        """Gamma(shape, rate) draws (mean shape/rate), Marsaglia-Tsang."""
        if not (shape > 0 and rate > 0):
            raise ParameterError(
                f"shape and rate must be positive, got ({shape}, {rate})"
            )
        n = 1 if size is None else int(size)
        return self._ret(
            self._fill("gamma_fill", float(shape), float(rate), size=n), size
        )

    def erlang(self, n_shape, rate, size=None):
        """Erlang(n, rate) draws; n = 0 returns exactly 0."""
        if not rate > 0:
            raise ParameterError(f"rate must be positive, got {rate}")
        if n_shape < 0 or int(n_shape) != n_shape:
            raise ParameterError(f"shape must be a non-negative integer, got {n_shape}")
        n = 1 if size is None else int(size)
        return self._ret(
            self._fill("erlang_fill", int(n_shape), float(rate), size=n), size
        )

    def poisson(self, mean, size=None):
        """Poisson(mean) counts; mean = 0 returns 0."""
        if mean < 0:
            raise ParameterError(f"mean must be non-negative, got {mean}")
        n = 1 if size is None else int(size)
        return self._ret(self._fill("poisson_fill", float(mean), size=n), size)

    def binomial(self, n_trials, p, size=None):
        """Bin(n, p) counts."""
        if not 0.0 <= p <= 1.0:
            raise ParameterError(f"p must lie in [0, 1], got {p}")
        if n_trials < 0 or int(n_trials) != n_trials:
            raise ParameterError(
                f"trial count must be a non-negative integer, got {n_trials}"
            )
        n = 1 if size is None else int(size)
        return self._ret(
            self._fill("binomial_fill", int(n_trials), float(p), size=n), size
        )

    def polya(self, alpha, p, size=None):
        """Polya / negative binomial counts, pmf C(alpha+k-1, k)(1-p)^alpha p^k,
        sampled as a gamma-mixed Poisson."""
        if not alpha > 0:
            raise ParameterError(f"alpha must be positive, got {alpha}")
        if not 0.0 < p < 1.0:
            raise ParameterError(f"p must lie in (0, 1), got {p}")
        n = 1 if size is None else int(size)
        return self._ret(
            self._fill("polya_fill", float(alpha), float(p), size=n), size
        )

    def double_exponential(self, beta1, beta2, p, size=None):
        """Two-sided exponential: +Exp(beta1) with probability p, else
        -Exp(beta2)."""
        if not (beta1 > 0 and beta2 > 0):
            raise ParameterError(
                f"beta1, beta2 must be positive, got ({beta1}, {beta2})"
            )
        if not 0.0 <= p <= 1.0:
            raise ParameterError(f"p must lie in [0, 1], got {p}")
        n = 1 if size is None else int(size)
        return self._ret(
            self._fill(
                "double_exponential_fill",
                float(beta1), float(beta2), float(p), size=n,
            ),
            size,
        )
