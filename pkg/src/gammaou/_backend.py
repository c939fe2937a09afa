"""Kernel backend selection.

Two interchangeable kernel implementations exist:

* ``gammaou._kernels_numba``: scalar loops compiled with ``numba.njit``
  (the default when numba is importable).
* ``gammaou._kernels_numpy``: vectorized pure-numpy fallback.

The active backend is chosen once at import time from the environment
variable ``GAMMAOU_BACKEND`` (``"numba"`` or ``"numpy"``).  Both modules
expose the same function surface and draw from the same counter-based
uniform source, so every result is reproducible per backend.
"""

import os
import warnings

ENV_VAR = "GAMMAOU_BACKEND"


def _detect() -> str:
    choice = os.environ.get(ENV_VAR, "").strip().lower()
    if choice not in ("", "numba", "numpy"):
        raise ValueError(
            f"{ENV_VAR} must be 'numba' or 'numpy', got {choice!r}"
        )
    if choice == "numpy":
        return "numpy"
    try:
        import numba  # noqa: F401
    except ImportError:
        if choice == "numba":
            raise ImportError(
                f"{ENV_VAR}=numba requested but numba is not installed"
            ) from None
        warnings.warn(
            "numba is not installed; falling back to pure-numpy kernels "
            "(slower, identical in law)",
            stacklevel=2,
        )
        return "numpy"
    return "numba"


ACTIVE = _detect()


def kernels(name: str | None = None):
    """Return the kernel module for ``name`` (default: the active backend)."""
    name = ACTIVE if name is None else name
    if name == "numba":
        from gammaou import _kernels_numba
        return _kernels_numba
    if name == "numpy":
        from gammaou import _kernels_numpy
        return _kernels_numpy
    raise ValueError(f"unknown backend {name!r}")
