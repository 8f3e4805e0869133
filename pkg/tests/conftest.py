import numpy as np
import pytest

from qchop._backend import kernels
from qchop.presets import unit_rate_protocol
from qchop.single_photon import ScatterParams


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # trigger any JIT compilation once so timed checks measure the math
    d = np.full(8, 0.5 + 0.1j)
    kernels.damped_scan(d, d)
    z = np.ones((2, 2), complex)
    kernels.coherence_combine(z, z[0], z, z[0], z, 1e-9, 1e-9)


def unit_params(kind, beta, delta=0.0, U=0.0, **kw):
    """ScatterParams with gamma0 = 1 so rates read directly in gamma0 units."""
    return ScatterParams(delta=delta, U=U, protocol=unit_rate_protocol(kind, beta, **kw))
