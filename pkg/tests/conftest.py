import numpy as np
import pytest

from gowers.group import GroupFunction, GroupSpec


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_function(rng, orders, scale=1.0):
    group = GroupSpec(tuple(orders))
    return GroupFunction(group, scale * rng.standard_normal(group.order))


def point_mass(n=4):
    vals = np.zeros(n)
    vals[0] = 1.0
    return GroupFunction.on_cyclic(vals)
