import numpy as np
import pytest

from maxmin_nn import KernelProfile, compare_operators, table1

TABLE1_N = (20, 55, 77, 100, 150, 1000)


@pytest.fixture(scope="session")
def logistic1():
    return KernelProfile("logistic", 1)


@pytest.fixture(scope="session")
def logistic2():
    return KernelProfile("logistic", 2)


@pytest.fixture(scope="session")
def table1_grid101(logistic2):
    h = table1()
    return compare_operators(h, TABLE1_N, h.domain, logistic2, grid=101)


@pytest.fixture(scope="session")
def table1_grid151(logistic2):
    h = table1()
    return compare_operators(h, TABLE1_N, h.domain, logistic2, grid=151)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
