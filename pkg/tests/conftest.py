import numpy as np
import pytest

from sgdlab.backend import active_backend, set_backend


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: criteria gate (runs by default)")
    config.addinivalue_line("markers", "slow: heavier Monte Carlo tests")


@pytest.fixture(scope="session")
def backend_name():
    return active_backend()


@pytest.fixture
def both_backends():
    """Yields the list of importable backend names; restores the active one."""
    names = ["numpy"]
    try:
        import numba  # noqa: F401

        names.insert(0, "numba")
    except ImportError:
        pass
    previous = active_backend()
    yield names
    set_backend(previous)


@pytest.fixture(autouse=True)
def _no_global_numpy_seed_leak():
    state = np.random.get_state()
    yield
    np.random.set_state(state)
