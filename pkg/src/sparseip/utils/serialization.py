"""Text formats for instances, solutions and reports.

Rationals are written as "p/q" (or "p" when q = 1) and an infinite multiplicity as
"inf"; decimals are never emitted, so `parse_instance(serialize_instance(inst))`
reproduces `inst` exactly.
"""

import hashlib
import json
from fractions import Fraction
from typing import Any, Dict, Mapping, Optional, Tuple

import numpy as np

from sparseip.errors import ParseError
from sparseip.instance import IntSolution, SparseIP, to_rational

__all__ = [
    "format_rational",
    "parse_rational",
    "instance_to_dict",
    "instance_from_dict",
    "serialize_instance",
    "parse_instance",
    "solution_to_dict",
    "serialize_solution",
    "parse_point",
    "parse_solution",
    "to_document",
    "instance_digest",
]


def format_rational(value: Optional[Fraction]) -> str:
    """Format a Fraction as "p/q", "p" or, for None, "inf"."""
    if value is None:
        return "inf"
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_rational(text) -> Fraction:
    if isinstance(text, bool) or not isinstance(text, (str, int)):
        raise ParseError(f"expected a rational string, got {text!r}")
    try:
        return to_rational(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"invalid rational {text!r}") from exc


def _parse_bound(text) -> Optional[Fraction]:
    if text == "inf":
        return None
    return parse_rational(text)


def instance_to_dict(inst: SparseIP) -> Dict[str, Any]:
    return {
        "sense": inst.sense.value,
        "m": inst.nrows,
        "n": inst.ncols,
        "b": [format_rational(v) for v in inst.b],
        "c": [format_rational(v) for v in inst.c],
        "d": [format_rational(v) for v in inst.d],
        "entries": [[i, j, format_rational(a)] for i, j, a in inst.entries],
    }


def instance_from_dict(doc: Mapping[str, Any]) -> SparseIP:
    try:
        sense = doc["sense"]
        if sense not in ("cover", "pack"):
            raise ParseError(f"unknown sense {sense!r}")
        entries = []
        for triple in doc["entries"]:
            if len(triple) != 3:
                raise ParseError(f"entry {triple!r} is not an [i, j, value] triple")
            i, j, a = triple
            if not isinstance(i, int) or not isinstance(j, int):
                raise ParseError(f"entry {triple!r} has non-integer coordinates")
            entries.append((i, j, parse_rational(a)))
        return SparseIP(
            sense=sense,
            nrows=int(doc["m"]),
            ncols=int(doc["n"]),
            entries=tuple(entries),
            b=tuple(parse_rational(v) for v in doc["b"]),
            c=tuple(parse_rational(v) for v in doc["c"]),
            d=tuple(_parse_bound(v) for v in doc["d"]),
        )
    except KeyError as exc:
        raise ParseError(f"missing field {exc.args[0]!r}") from exc
    except TypeError as exc:
        raise ParseError(str(exc)) from exc


def serialize_instance(inst: SparseIP) -> str:
    return json.dumps(instance_to_dict(inst), separators=(", ", ": "))


def parse_instance(text: str) -> SparseIP:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"instance is not a valid document: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("instance document must be an object")
    return instance_from_dict(doc)


def solution_to_dict(sol: IntSolution) -> Dict[str, Any]:
    return {"x": [str(v) for v in sol.x], "objective": format_rational(sol.objective)}


def serialize_solution(sol: IntSolution) -> str:
    return json.dumps(solution_to_dict(sol))


def parse_point(text: str) -> Tuple[Tuple[Fraction, ...], Optional[Fraction]]:
    """Parse a solution document without requiring integral coordinates.

    Returns:
        tuple: The coordinates and the claimed objective (None when absent).
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"solution is not a valid document: {exc}") from exc
    if not isinstance(doc, dict) or "x" not in doc:
        raise ParseError("solution document must be an object with an \"x\" field")
    try:
        x = tuple(parse_rational(v) for v in doc["x"])
    except TypeError as exc:
        raise ParseError(f"malformed solution document: {exc}") from exc
    objective = doc.get("objective")
    return x, None if objective is None else parse_rational(objective)


def parse_solution(text: str) -> IntSolution:
    """Parse a solution document. The objective is kept as written; callers recheck it."""
    x, objective = parse_point(text)
    for j, value in enumerate(x):
        if value.denominator != 1:
            raise ParseError(f"solution coordinate x[{j}] = {value} is not an integer")
    if objective is None:
        raise ParseError("missing field 'objective'")
    return IntSolution(tuple(int(v) for v in x), objective)


def to_document(value: Any) -> Any:
    """Recursively turn reports into JSON-ready values (rationals become strings)."""
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, IntSolution):
        return solution_to_dict(value)
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, Mapping):
        return {str(k): to_document(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = sorted(value) if isinstance(value, (set, frozenset)) else value
        return [to_document(v) for v in items]
    if hasattr(value, "value") and isinstance(getattr(value, "value"), str):
        return value.value
    return value


def instance_digest(inst: SparseIP) -> str:
    """sha256 of the canonical instance document."""
    return hashlib.sha256(serialize_instance(inst).encode("utf-8")).hexdigest()
