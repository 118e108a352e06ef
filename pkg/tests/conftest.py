import numpy as np
import pytest

from polarhull import CompactSample, PoleSeries, RationalModel


@pytest.fixture(scope="session")
def gauss10():
    return PoleSeries.gaussian(10)


@pytest.fixture(scope="session")
def gauss40():
    return PoleSeries.gaussian(40)


@pytest.fixture(scope="session")
def two_pole():
    return RationalModel([0.3, 0.5], [1.0, 2.0])


@pytest.fixture(scope="session")
def segment_sample():
    return CompactSample(np.linspace(-1.0, 1.0, 1001).astype(complex))


@pytest.fixture
def rng():
    return np.random.default_rng(20240229)
