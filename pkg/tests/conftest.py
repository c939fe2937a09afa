import numpy as np
import pytest

from gammaou.rng import RngStream

SEED = 987654321


@pytest.fixture
def stream():
    """Fresh default-backend stream; one per test, fixed seed."""
    return RngStream(SEED, 0)


def make_stream(stream_id=0, seed=SEED, backend=None):
    return RngStream(seed, stream_id, backend=backend)


def sample_cumulants(x):
    """First four sample cumulants with influence-function standard errors."""
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    mean = x.mean()
    z = x - mean
    z2 = z * z
    m2 = z2.mean()
    z3 = z2 * z
    z4 = z2 * z2
    m3 = z3.mean()
    m4 = z4.mean()
    k = (mean, m2, m3, m4 - 3.0 * m2 * m2)
    if_k1 = z
    if_k2 = z2 - m2
    if_k3 = z3 - m3 - 3.0 * m2 * z
    if_k4 = z4 - m4 - 4.0 * m3 * z - 6.0 * m2 * if_k2
    se = tuple(
        float(np.sqrt((f * f).mean() / n)) for f in (if_k1, if_k2, if_k3, if_k4)
    )
    return k, se
