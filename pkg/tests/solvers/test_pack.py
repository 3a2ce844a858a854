from fractions import Fraction

import pytest

from sparseip.errors import InvariantViolation, UnboundedInstance, WidthTooSmall
from sparseip.generators import gen_random
from sparseip.instance import SparseIP, preprocess_pack
from sparseip.oracle import solve_exact
from sparseip.solvers.pack import (
    IteratedOutcome,
    Pack2CSSolver,
    PackSolver,
    PackWidthSolver,
    check_outcome,
    decompose,
    iterated_solve,
    solve_pack,
    solve_pack_2cs,
    solve_pack_width,
)

F = Fraction


@pytest.fixture
def knapsack():
    return SparseIP.from_rows(
        "pack", [{0: F(3, 5), 1: F(3, 5)}], b=(1,), c=(1, 1), d=(1, 1)
    )


def _cycle(length):
    entries = []
    for j in range(length):
        entries += [(j, j, 1), ((j + 1) % length, j, 1)]
    return SparseIP("pack", length, length, tuple(entries), (1,) * length, (1,) * length, (1,) * length)


def test_no_rows_takes_multiplicities():
    inst = SparseIP("pack", 0, 2, (), (), (1, 1), (2, 2))
    outcome = iterated_solve(inst)
    assert outcome.x0 == (2, 2)
    assert outcome.x1 == (0, 0)
    assert outcome.special == frozenset()
    assert outcome.value(inst) == 4


def test_knapsack_iterations(knapsack):
    outcome = iterated_solve(knapsack)
    assert outcome.lp_value == F(5, 3)
    assert outcome.x0 == (1, 0)
    assert outcome.x1 == (0, 1)
    assert outcome.special == frozenset({(0, 1)})
    assert len(outcome.trace) == 2
    assert outcome.value(knapsack) == 2
    assert knapsack.row_activity(outcome.total) == (F(6, 5),)


def test_knapsack_decomposition(knapsack):
    outcome = iterated_solve(knapsack)
    decomposition = decompose(knapsack, outcome)
    assert decomposition.classes == ((0, 1),)
    assert decomposition.r == 1


def test_knapsack_solve(knapsack):
    result = solve_pack(knapsack)
    assert result.solution.x == (1, 0)
    assert result.report["ratio_bound"] == 4
    assert result.report["candidates"] == {"x0": F(1), "y1": F(1)}
    assert result.report["chosen"] == "x0"


def test_empty_decomposition():
    inst = SparseIP.from_rows("pack", [{0: 1, 1: 1}], b=(2,), c=(1, 1), d=(1, 1))
    outcome = iterated_solve(inst)
    assert outcome.x1 == (0, 0)
    assert decompose(inst, outcome).classes == ()


def test_integral_lp_is_returned():
    inst = SparseIP.from_rows("pack", [{0: 1, 1: 1}], b=(1,), c=(2, 1), d=(1, 1))
    result = solve_pack(inst)
    assert result.solution.x == (1, 0)
    assert result.value == result.report["lp_value"] == 2


def test_check_outcome_detects_broken_rows(knapsack):
    outcome = iterated_solve(knapsack)
    broken = IteratedOutcome(
        outcome.x0, outcome.x1, frozenset(), outcome.trace, outcome.lp_value, outcome.threshold
    )
    with pytest.raises(InvariantViolation):
        check_outcome(knapsack, broken)


def test_unbounded_empty_column():
    inst = SparseIP.from_rows("pack", [{0: 1}], b=(1,), c=(1, 1), d=(1, None))
    with pytest.raises(UnboundedInstance):
        solve_pack(inst)


def test_needs_preprocessing():
    inst = SparseIP.from_rows("pack", [{0: 2}], b=(1,), c=(1,), d=(1,))
    with pytest.raises(ValueError, match="preprocess_pack"):
        iterated_solve(inst)
    assert solve_pack(inst).solution.x == (0,)


@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("seed", range(10))
def test_random_general_pack(seed, k):
    inst = gen_random(seed, "pack", 4, 4, k, mode="col-sparse", coeff_denominator_bound=3)
    reduced, _ = preprocess_pack(inst)
    outcome = iterated_solve(reduced)
    assert all(count <= reduced.col_sparsity() for count in outcome.special_per_row().values())
    decomposition = decompose(reduced, outcome)
    assert decomposition.r <= 2 * k * k + 1
    assert tuple(map(sum, zip(*decomposition.classes))) in ((), outcome.x1)
    assert all(reduced.is_feasible(y) for y in decomposition.classes)

    result = PackSolver().solve(inst)
    optimum = solve_exact(inst)
    assert inst.is_feasible(result.solution.x)
    assert result.report["lp_value"] >= optimum.objective
    assert result.value * (2 * k * k + 2) >= optimum.objective


def test_two_cs_even_cycle():
    inst = _cycle(4)
    result = solve_pack_2cs(inst)
    assert result.value * 4 >= solve_exact(inst).objective
    assert result.report["fallback_used"] is False


def test_two_cs_odd_cycle_sets_aside_one_edge():
    inst = _cycle(3)
    solver = Pack2CSSolver()
    result = solver.solve(inst)
    assert result.report["lp_value"] == F(3, 2)
    assert len(result.report["matching"]) == 1
    assert result.value == 1
    assert solver.outcome_.value(inst) >= F(3, 2)


def test_two_cs_loops(knapsack):
    result = solve_pack_2cs(knapsack)
    assert result.report["matching"] == [1]
    assert result.value == 1
    assert set(result.report["candidates"]) == {"x0", "M", "y1", "y2"}


def test_two_cs_rejects_dense_columns():
    inst = SparseIP.from_rows("pack", [{0: 1}, {0: 1}, {0: 1}], b=(1, 1, 1), c=(1,), d=(1,))
    with pytest.raises(ValueError, match="at most 2"):
        Pack2CSSolver().solve(inst)


@pytest.mark.parametrize("seed", range(20))
def test_random_two_cs(seed):
    inst = gen_random(seed, "pack", 5, 4, 2, mode="col-sparse", coeff_denominator_bound=3)
    result = solve_pack_2cs(inst)
    optimum = solve_exact(inst)
    bound = 11 if result.report["fallback_used"] else 4
    assert result.report["ratio_bound"] == bound
    assert inst.is_feasible(result.solution.x)
    assert result.value * bound >= optimum.objective


def test_width_without_entries():
    inst = SparseIP("pack", 1, 2, (), (1,), (1, 2), (2, 3))
    result = solve_pack_width(inst)
    assert result.solution.x == (2, 3)
    assert result.report["W"] is None


def test_width_too_small():
    inst = SparseIP.from_rows(
        "pack", [{0: F(1, 2)}, {0: F(1, 2)}], b=(1, 1), c=(1,), d=(3,)
    )
    with pytest.raises(WidthTooSmall):
        PackWidthSolver().solve(inst)


def test_width_quarter_entries():
    rows = [{0: F(1, 4), 1: F(1, 4)}, {2: F(1, 4), 3: F(1, 4)}]
    inst = SparseIP.from_rows("pack", rows, b=(1, 1), c=(1, 1, 1, 1), d=(3, 3, 3, 3))
    result = solve_pack_width(inst)
    assert result.report["W"] == 4
    assert result.report["ratio_bound"] == F(5, 3)
    assert inst.is_feasible(result.solution.x)
    assert result.value * F(5, 3) >= result.report["lp_value"]


@pytest.mark.parametrize("k,width", [(1, 3), (1, 4), (2, 5), (2, 8)])
@pytest.mark.parametrize("seed", range(6))
def test_random_width(seed, k, width):
    inst = gen_random(
        seed, "pack", 4, 3, k, mode="col-sparse", coeff_denominator_bound=3, d_mode="small", width=width
    )
    result = PackWidthSolver().solve(inst)
    report = result.report
    optimum = solve_exact(inst)
    assert inst.is_feasible(result.solution.x)
    assert report["W"] >= width
    assert report["lp_value"] >= optimum.objective
    assert result.value * report["ratio_bound"] >= report["lp_value"]
    counts = report["violated_rows"]
    assert all(a > b for a, b in zip(counts, counts[1:]))
    assert counts[-1] == 0
