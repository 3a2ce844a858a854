import itertools

import networkx as nx
import numpy as np
import pytest

from sparseip.errors import ParameterError, ParseError
from sparseip.generators import (
    Max3Lin2,
    falsifying_assignments,
    gen_hardness,
    gen_random_formula,
    hardness_certificate,
    parse_formula,
    serialize_formula,
)
from sparseip.oracle import solve_exact
from sparseip.solvers import solve_cover
from sparseip.verify import check_solution


@pytest.fixture
def one_clause():
    return Max3Lin2(3, ((0, 1, 2, 0),))


def test_falsifying_assignments():
    assert falsifying_assignments(0) == [(0, 0, 1), (0, 1, 0), (1, 0, 0), (1, 1, 1)]
    assert falsifying_assignments(1) == [(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)]


def test_one_clause_size(one_clause):
    gadget = gen_hardness(one_clause)
    inst = gadget.instance
    assert (inst.nrows, inst.ncols) == (13, 42)
    assert len(gadget.row_labels) == 13
    assert len(gadget.col_labels) == 42
    assert gadget.row_labels[:3] == ["x0", "x0=0", "x0=1"]
    assert inst.b[:3] == (4, 4, 4)
    assert sorted(inst.b).count(3) == 4
    assert all(d == 1 for d in inst.d)


def test_structure_is_bipartite(one_clause):
    gadget = gen_hardness(one_clause)
    inst = gadget.instance
    assert inst.col_sparsity() == 2
    left, right = set(gadget.left_rows), set(gadget.right_rows)
    assert left.isdisjoint(right)
    assert left | right == set(range(inst.nrows))
    graph = nx.MultiGraph()
    graph.add_nodes_from(range(inst.nrows))
    for col in inst.cols:
        u, v = sorted(col)
        assert (u in left) != (v in left)
        assert col[u] == col[v]
        graph.add_edge(u, v)
    assert nx.is_bipartite(graph)


def test_unused_variables_get_no_vertices():
    gadget = gen_hardness(Max3Lin2(5, ((0, 2, 4, 1),)))
    assert gadget.instance.nrows == 13
    assert "x1" not in gadget.row_labels


@pytest.mark.parametrize("assignment,cost", [((0, 0, 0), 24), ((1, 1, 0), 24), ((1, 0, 0), 27)])
def test_certificate_costs(one_clause, assignment, cost):
    certificate = hardness_certificate(one_clause, assignment)
    assert certificate.cost == cost
    assert certificate.unsatisfied == (cost - 24) // 3
    assert gen_hardness(one_clause).instance.is_feasible(certificate.x)
    assert len(certificate.edges) == sum(certificate.x)


@pytest.mark.parametrize("seed", range(3))
def test_certificates_for_every_assignment(seed):
    formula = gen_random_formula(seed, 4, 3)
    inst = gen_hardness(formula).instance
    for assignment in itertools.product((0, 1), repeat=4):
        certificate = hardness_certificate(formula, assignment)
        t = formula.count_unsatisfied(assignment)
        assert certificate.cost == 24 * formula.m + 3 * t
        assert inst.is_feasible(certificate.x)


@pytest.mark.slow
def test_hundred_formulas_all_assignments():
    rng = np.random.default_rng(9)
    for seed in range(100):
        formula = gen_random_formula(seed, int(rng.integers(3, 11)), int(rng.integers(1, 7)))
        inst = gen_hardness(formula).instance
        for assignment in itertools.product((0, 1), repeat=formula.nvars):
            certificate = hardness_certificate(formula, assignment)
            t = formula.count_unsatisfied(assignment)
            assert certificate.cost == 24 * formula.m + 3 * t
            assert check_solution(inst, certificate.x, certificate.cost) == []


def test_certificate_rejects_bad_assignments(one_clause):
    with pytest.raises(ParameterError):
        hardness_certificate(one_clause, (0, 1))
    with pytest.raises(ParameterError):
        hardness_certificate(one_clause, (0, 1, 2))


def test_cover_solver_on_gadget(one_clause):
    inst = gen_hardness(one_clause).instance
    result = solve_cover(inst)
    assert inst.is_feasible(result.solution.x)
    assert result.value <= result.report["k"] * result.report["lp_value"]


@pytest.mark.parametrize("parity", [0, 1])
def test_one_clause_optimum_matches_certificate(parity):
    formula = Max3Lin2(3, ((0, 1, 2, parity),))
    inst = gen_hardness(formula).instance
    assignment = next(
        a for a in itertools.product((0, 1), repeat=3) if formula.count_unsatisfied(a) == 0
    )
    certificate = hardness_certificate(formula, assignment)
    assert certificate.cost == 24
    optimum = solve_exact(inst, incumbent=certificate.x, lp_bound=True)
    assert optimum.objective == 24
    assert inst.is_feasible(optimum.x)


@pytest.mark.parametrize(
    "clause",
    [(0, 0, 1, 0), (0, 1, 3, 0), (0, 1, 2, 2), (0, 1, 2)],
)
def test_bad_clauses(clause):
    with pytest.raises(ParameterError):
        Max3Lin2(3, (clause,))


def test_parse_formula():
    text = "# parity formula\nnvars 5\n\n0 1 2 1\n2 3 4 0\n"
    formula = parse_formula(text)
    assert formula == Max3Lin2(5, ((0, 1, 2, 1), (2, 3, 4, 0)))
    assert parse_formula(serialize_formula(formula)) == formula
    assert parse_formula("0 1 3 0").nvars == 4


@pytest.mark.parametrize(
    "text",
    ["0 1 2", "0 1 two 0", "nvars x", "0 1 1 0", "nvars 2\n0 1 2 0"],
)
def test_parse_formula_errors(text):
    with pytest.raises(ParseError):
        parse_formula(text)
