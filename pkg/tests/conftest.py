from fractions import Fraction

import pytest

from latrank import make_field, rationals


@pytest.fixture(scope="session")
def QQ():
    return rationals()


@pytest.fixture(scope="session")
def Qi():
    return make_field([1, 0, 1])


@pytest.fixture(scope="session")
def Qs5():
    return make_field([-5, 0, 1],
                      integral_basis=[[1, 0], [Fraction(1, 2), Fraction(1, 2)]])
