import math

import pytest

from hhaudit.core import BoundParams, Interval
from hhaudit.funcmodel import exp_affine, linear_affine, polynomial

E = math.e
GAP_EXP_01 = (3 - E) / 2


@pytest.fixture
def expx():
    return exp_affine(1.0, 1.0, 0.0)


@pytest.fixture
def lin31():
    return linear_affine(3.0, 1.0)


@pytest.fixture
def cubic():
    return polynomial([1.0, 0.0, 0.0, 1.0])


def params(a=0.0, b=1.0, alpha=1.0, m=1.0, p=2.0, q=2.0, mu=0.5, mu2=None):
    mu2 = mu if mu2 is None else mu2
    return BoundParams(Interval(a, b), alpha, m, p, q, mu, 1 - mu, mu2, 1 - mu2)
