from fractions import Fraction

import pytest

from sparseip.errors import InvalidInstance
from sparseip.instance import SparseIP
from sparseip.verify import check_solution

F = Fraction


@pytest.fixture
def cover():
    return SparseIP.from_rows("cover", [{0: F(3, 4), 1: 1}], b=(1,), c=(1, 2), d=(1, 2))


def test_feasible(cover):
    assert check_solution(cover, (0, 1)) == []
    assert check_solution(cover, (0, 1), objective=F(2)) == []


def test_bound_violation(cover):
    violations = check_solution(cover, (2, 0))
    assert [v.kind for v in violations] == ["bound"]
    assert violations[0].message.startswith("bound 0")


def test_row_short_by_a_quarter(cover):
    (violation,) = check_solution(cover, (1, 0))
    assert violation.kind == "row"
    assert violation.index == 0
    assert violation.slack == F(-1, 4)


def test_integrality(cover):
    kinds = [v.kind for v in check_solution(cover, (F(1, 2), 1))]
    assert kinds == ["integrality"]


def test_wrong_objective(cover):
    (violation,) = check_solution(cover, (0, 1), objective=F(3))
    assert violation.kind == "objective"


def test_length(cover):
    (violation,) = check_solution(cover, (1,))
    assert violation.kind == "length"


def test_packing_slack_orientation():
    pack = SparseIP.from_rows("pack", [{0: 2}], b=(3,), c=(1,), d=(None,))
    (violation,) = check_solution(pack, (2,))
    assert violation.slack == F(-1)
    assert check_solution(pack, (1,)) == []


def test_invalid_instance_is_rejected():
    inst = SparseIP("cover", 1, 1, ((0, 3, 1),), (1,), (1,), (1,))
    with pytest.raises(InvalidInstance, match="outside 1x1"):
        check_solution(inst, (1,))
