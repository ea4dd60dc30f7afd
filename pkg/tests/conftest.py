import numpy as np
import pytest

from afsec.model import NetworkInstance, PowerConfig


def make_instance(h_s, h_d, h_e=None, P_s=1.0, P_i=10.0, sigma2=1.0):
    h_s = np.atleast_1d(np.asarray(h_s, dtype=complex))
    h_d = np.atleast_1d(np.asarray(h_d, dtype=complex))
    M = h_s.size
    h_e = np.zeros((M, 0), complex) if h_e is None else np.asarray(h_e, dtype=complex).reshape(M, -1)
    caps = [P_i] * M if np.isscalar(P_i) else list(P_i)
    return NetworkInstance(h_s, h_d, h_e, PowerConfig(P_s, caps, sigma2))


@pytest.fixture
def unit_scalar():
    """One relay, one eavesdropper, every gain equal to one."""
    return make_instance([1.0], [1.0], [[1.0]])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
