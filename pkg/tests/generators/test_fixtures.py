from fractions import Fraction

import pytest

from sparseip.engine import SimplexEngine
from sparseip.errors import ParameterError, UnknownFixture
from sparseip.generators import FIXTURES, gen_gap_fixture
from sparseip.instance import lp_relaxation
from sparseip.oracle import solve_exact


@pytest.mark.parametrize("name", FIXTURES)
@pytest.mark.parametrize("M", [1, 2, 4, 7])
def test_gap(name, M):
    inst = gen_gap_fixture(name, M)
    assert SimplexEngine().solve(lp_relaxation(inst)).value == Fraction(1, M)
    assert solve_exact(inst).objective == 1


def test_parameter_in_name():
    assert gen_gap_fixture("naive-5") == gen_gap_fixture("naive", 5)
    assert gen_gap_fixture("multiplicity-M", 3) == gen_gap_fixture("multiplicity", 3)
    assert gen_gap_fixture("naive-5", 5) == gen_gap_fixture("naive", 5)


def test_unknown_fixture():
    with pytest.raises(UnknownFixture):
        gen_gap_fixture("triangle", 2)


@pytest.mark.parametrize(
    "name,M",
    [("naive", None), ("naive", 0), ("naive-x", None), ("naive-5", 4)],
)
def test_bad_parameter(name, M):
    with pytest.raises(ParameterError):
        gen_gap_fixture(name, M)
