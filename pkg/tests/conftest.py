import pytest

from qforge.acceptance import warm_up


@pytest.fixture(scope="session", autouse=True)
def _compiled_kernels():
    # numba compilation happens once per session, outside any timed check
    warm_up()
