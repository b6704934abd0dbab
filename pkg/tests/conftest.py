"""Shared fixtures: example curves and period data, computed once."""

import numpy as np
import pytest

from holodiff import curves, jacobian


@pytest.fixture(scope="session")
def quintic():
    return curves.PlaneCurve(5, [(5, 0, 1.0), (0, 5, 1.0), (0, 0, 1.0)])


@pytest.fixture(scope="session")
def quartic():
    return curves.PlaneCurve(4, [(4, 0, 1.0), (0, 4, 1.0), (0, 0, 1.0)])


@pytest.fixture(scope="session")
def hyp_g2():
    return curves.HyperellipticCurve([-2.0, -1.0, 0.0, 1.0, 2.0])


@pytest.fixture(scope="session")
def hyp_g4():
    return curves.HyperellipticCurve([float(k) for k in range(-4, 5)])


@pytest.fixture(scope="session")
def lemniscatic():
    return curves.HyperellipticCurve([-1.0, 0.0, 1.0])


@pytest.fixture(scope="session")
def pd_g1(lemniscatic):
    return jacobian.compute_periods(lemniscatic)


@pytest.fixture(scope="session")
def pd_g2(hyp_g2):
    return jacobian.compute_periods(hyp_g2)


@pytest.fixture
def rng():
    return np.random.default_rng(20260818)
