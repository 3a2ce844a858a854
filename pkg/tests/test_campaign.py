from fractions import Fraction

import pandas as pd
import pytest

from sparseip.campaign import (
    COLUMNS,
    RunReport,
    format_table,
    observed_ratio,
    run_campaign,
    run_instance,
    worst_ratio,
)
from sparseip.errors import ParameterError
from sparseip.generators import gen_gap_fixture
from sparseip.instance import IntSolution, SparseIP

F = Fraction


@pytest.mark.parametrize(
    "sense,value,optimum,expected",
    [
        ("cover", 3, 2, F(3, 2)),
        ("cover", 0, 0, F(1)),
        ("cover", 1, 0, None),
        ("pack", 2, 3, F(3, 2)),
        ("pack", 0, 0, F(1)),
        ("pack", 0, 1, None),
    ],
)
def test_observed_ratio(sense, value, optimum, expected):
    assert observed_ratio(sense, value, optimum) == expected


def _report(**kwargs):
    params = dict(
        digest="0" * 64,
        algorithm="pack-general",
        solution=IntSolution((0, 0), F(0)),
        lp_value=F(2),
        ratio_bound=F(4),
        wall_time=0.0,
    )
    params.update(kwargs)
    return RunReport(**params)


@pytest.mark.parametrize(
    "kwargs,violated",
    [
        (dict(oracle_value=F(1), observed_ratio=None, oracle_status="optimal"), True),
        (dict(oracle_value=F(0), observed_ratio=F(1), oracle_status="optimal"), False),
        (dict(oracle_value=F(8), observed_ratio=F(5), oracle_status="optimal"), True),
        (dict(oracle_status="budget-exceeded"), False),
        (dict(), False),
        (dict(oracle_value=F(1), observed_ratio=None, oracle_status="optimal", ratio_bound=None), False),
    ],
)
def test_bound_violated(kwargs, violated):
    run = _report(**kwargs)
    assert run.bound_violated is violated
    assert run.to_dict()["bound_violated"] is violated


def test_zero_packing_value_is_a_violation():
    run = _report(oracle_value=F(1), oracle_status="optimal")
    run.observed_ratio = observed_ratio("pack", run.solution.objective, run.oracle_value)
    assert run.observed_ratio is None
    assert run.bound_violated


def test_run_instance_with_oracle():
    rows = [{0: 1, 1: 1}, {1: 1, 2: 1}, {0: 1, 2: 1}]
    triangle = SparseIP.from_rows("cover", rows, b=(1, 1, 1), c=(1, 1, 1), d=(1, 1, 1))
    run = run_instance(triangle, oracle=True)
    assert run.algorithm == "cover-k"
    assert run.oracle_value == 2
    assert run.observed_ratio == F(3, 2)
    assert run.oracle_status == "optimal"
    assert not run.bound_violated
    doc = run.to_dict()
    assert doc["observed_ratio"] == "3/2"
    assert doc["solution"]["x"] == ["1", "1", "1"]


def test_run_instance_budget_exceeded(caplog):
    run = run_instance(gen_gap_fixture("naive", 3), oracle=True, budget=1)
    assert run.oracle_status == "budget-exceeded"
    assert run.observed_ratio is None
    assert not run.bound_violated
    assert "oracle budget exceeded" in caplog.text


def test_run_instance_without_oracle():
    run = run_instance(gen_gap_fixture("naive", 3))
    assert run.oracle_status == "skipped"
    assert run.oracle_value is None


def test_empty_campaign():
    frame = run_campaign(0, 0)
    assert list(frame.columns) == COLUMNS
    assert frame.empty
    assert worst_ratio(frame) is None


@pytest.mark.parametrize("family", ["cover", "pack", "pack-2cs", "pack-width"])
def test_small_campaign_meets_bounds(family):
    frame = run_campaign(3, 4, family=family, n=4, m=3, k=2, denominator=3, d_mode="small")
    assert len(frame) == 4
    assert list(frame["index"]) == [0, 1, 2, 3]
    assert not frame["bound_violated"].any()
    assert (frame["oracle_status"] == "optimal").all()
    assert worst_ratio(frame) >= 1


def test_campaign_is_reproducible():
    first = run_campaign(5, 3, n=4, m=4, k=2, denominator=3, d_mode="small")
    second = run_campaign(5, 3, n=4, m=4, k=2, denominator=3, d_mode="small", n_jobs=2)
    assert list(first["digest"]) == list(second["digest"])
    assert list(first["value"]) == list(second["value"])


@pytest.mark.slow
@pytest.mark.parametrize(
    "family,ks,count",
    [("cover", (2, 3), 500), ("pack", (1, 2, 3), 500), ("pack-2cs", (1, 2), 300), ("pack-width", (1, 2), 200)],
)
def test_full_campaign_meets_bounds(family, ks, count):
    share = -(-count // len(ks))
    for k in ks:
        frame = run_campaign(11, share, family=family, n=6, m=6, k=k, n_jobs=-1)
        assert len(frame) == share
        assert not frame["bound_violated"].any()
        assert (frame["oracle_status"] == "optimal").any()


@pytest.mark.parametrize(
    "kwargs",
    [dict(family="knapsack"), dict(count=-1), dict(family="pack-2cs", k=3)],
)
def test_campaign_parameters(kwargs):
    params = dict(seed=0, count=1)
    params.update(kwargs)
    with pytest.raises(ParameterError):
        run_campaign(**params)


def test_format_table():
    frame = pd.DataFrame(
        {
            "value": [F(3, 2)],
            "lp_value": [F(1)],
            "ratio_bound": [F(2)],
            "oracle_value": [None],
            "observed_ratio": [None],
        }
    )
    shown = format_table(frame)
    assert shown.iloc[0].tolist() == ["3/2", "1", "2", "", ""]
    assert frame["value"][0] == F(3, 2)
