import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sparseip.errors import ParseError
from sparseip.generators import gen_random
from sparseip.instance import IntSolution, Sense, SparseIP
from sparseip.utils.serialization import (
    format_rational,
    instance_digest,
    instance_to_dict,
    parse_instance,
    parse_point,
    parse_rational,
    parse_solution,
    serialize_instance,
    serialize_solution,
    to_document,
)

F = Fraction


@pytest.fixture
def inst():
    return SparseIP.from_rows(
        "cover", [{0: F(3, 4), 1: F(3, 4)}], b=(1,), c=(0, 1), d=(1, None)
    )


@pytest.mark.parametrize(
    "value,text", [(F(3, 4), "3/4"), (F(2), "2"), (F(-1, 3), "-1/3"), (None, "inf")]
)
def test_format_rational(value, text):
    assert format_rational(value) == text


@pytest.mark.parametrize("text", ["1/0", "abc", "0.5.1", 0.5, True, None])
def test_parse_rational_rejects(text):
    with pytest.raises(ParseError):
        parse_rational(text)


def test_document_layout(inst):
    doc = instance_to_dict(inst)
    assert doc == {
        "sense": "cover",
        "m": 1,
        "n": 2,
        "b": ["1"],
        "c": ["0", "1"],
        "d": ["1", "inf"],
        "entries": [[0, 0, "3/4"], [0, 1, "3/4"]],
    }
    assert parse_instance(serialize_instance(inst)) == inst


@pytest.mark.parametrize(
    "text",
    [
        "not json",
        "[1, 2]",
        json.dumps({"sense": "cover", "m": 1, "n": 1, "b": ["1"], "c": ["1"], "d": ["1"]}),
        json.dumps({"sense": "both", "m": 0, "n": 0, "b": [], "c": [], "d": [], "entries": []}),
        json.dumps(
            {"sense": "pack", "m": 1, "n": 1, "b": ["1"], "c": ["1"], "d": ["1"], "entries": [[0, 0]]}
        ),
        json.dumps(
            {"sense": "pack", "m": 1, "n": 1, "b": [0.5], "c": ["1"], "d": ["1"], "entries": []}
        ),
    ],
)
def test_parse_instance_errors(text):
    with pytest.raises(ParseError):
        parse_instance(text)


def test_solution_documents(inst):
    sol = IntSolution((0, 1), F(1))
    assert json.loads(serialize_solution(sol)) == {"x": ["0", "1"], "objective": "1"}
    assert parse_solution(serialize_solution(sol)) == sol


def test_parse_point_keeps_fractions():
    x, objective = parse_point('{"x": ["1/2", "1"]}')
    assert x == (F(1, 2), F(1))
    assert objective is None
    with pytest.raises(ParseError):
        parse_solution('{"x": ["1/2", "1"], "objective": "1"}')
    with pytest.raises(ParseError):
        parse_solution('{"x": ["1"]}')


def test_to_document():
    doc = to_document({"ratio": F(3, 2), "sense": Sense.PACK, "cols": {2, 1}, "n": None})
    assert doc == {"ratio": "3/2", "sense": "pack", "cols": [1, 2], "n": None}


def test_digest_is_canonical(inst):
    same = SparseIP(
        "cover", 1, 2, ((0, 1, "3/4"), (0, 0, "6/8")), ("1",), ("0", "1"), ("1", "inf")
    )
    assert instance_digest(inst) == instance_digest(same)
    assert len(instance_digest(inst)) == 64
    assert instance_digest(inst) != instance_digest(inst.replace(c=(F(1), F(1))))


@st.composite
def random_instances(draw):
    sense = draw(st.sampled_from(["cover", "pack"]))
    mode = draw(st.sampled_from(["row-sparse", "col-sparse"]))
    n = draw(st.integers(1, 6))
    m = draw(st.integers(1, 6))
    k = draw(st.integers(1, n if mode == "row-sparse" else m))
    if mode == "col-sparse" and n * k < m:
        m = n * k
    return gen_random(
        draw(st.integers(0, 2**32 - 1)),
        sense,
        n,
        m,
        k,
        mode=mode,
        coeff_denominator_bound=draw(st.integers(1, 7)),
        d_mode=draw(st.sampled_from(["mixed", "infinite", "small"])),
    )


@settings(max_examples=100, deadline=None)
@given(random_instances())
def test_generated_instances_survive_serialization(inst):
    text = serialize_instance(inst)
    assert parse_instance(text) == inst
    doc = json.loads(text)
    assert doc["d"].count("inf") == sum(1 for dj in inst.d if dj is None)
