import math
from fractions import Fraction

import pytest

from flatchains.groups import (
    BoundedIntGroup,
    FiniteProductGroup,
    cyclic_group,
    validate_group,
)


def pytest_addoption(parser):
    parser.addoption(
        "--seed",
        action="store",
        default=0,
        type=int,
        help="seed for randomized property tests",
    )


@pytest.fixture
def seed(request):
    return request.config.getoption("--seed")


@pytest.fixture
def z_int():
    """Z with unit scale, default bound."""
    return validate_group({"kind": "int", "scale": "1", "bound": 16})


@pytest.fixture
def z_half():
    return BoundedIntGroup(scale=Fraction(1, 2), bound=16)


@pytest.fixture
def z2():
    return cyclic_group(2, ["1"])


@pytest.fixture
def z3():
    """Z_3 with the all-ones norm."""
    return cyclic_group(3, ["1", "1"])


@pytest.fixture
def z6():
    """Z_6 with the norm table (1,2,3,2,1): |2| = |1| + |1| exactly."""
    return cyclic_group(6, ["1", "2", "3", "2", "1"])


@pytest.fixture
def z2xz2():
    return validate_group(
        {
            "kind": "finite",
            "orders": [2, 2],
            "norms": {"(1,0)": "1", "(0,1)": "1", "(1,1)": "1"},
        }
    )


@pytest.fixture
def test_groups(z_int, z2, z3, z6, z2xz2):
    """The default corpus exercised by the randomized invariants."""
    return [z_int, z2, z3, z6, z2xz2]
