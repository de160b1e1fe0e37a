"""Shared test setup: compile the accelerated kernels once per session."""

import pytest

from pathwise_hj import _accel


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    _accel.warm_up()
