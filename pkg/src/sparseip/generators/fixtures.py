"""Small covering instances whose plain LP relaxation is weak."""

import re

from sparseip.errors import ParameterError, UnknownFixture
from sparseip.instance import Sense, SparseIP

__all__ = ["FIXTURES", "gen_gap_fixture"]

FIXTURES = ("naive", "multiplicity")


def _naive(M: int) -> SparseIP:
    # min x1 s.t. M x1 >= 1; LP value 1/M, integral optimum 1
    return SparseIP(Sense.COVER, 1, 1, ((0, 0, M),), (1,), (1,), (None,))


def _multiplicity(M: int) -> SparseIP:
    # min x2 s.t. M x1 + M x2 >= M + 1, x1 <= 1; LP value 1/M, integral optimum 1
    return SparseIP(
        Sense.COVER, 1, 2, ((0, 0, M), (0, 1, M)), (M + 1,), (0, 1), (1, None)
    )


def gen_gap_fixture(name: str, M: int = None) -> SparseIP:
    """Build a named gap fixture.

    Args:
        name (str): "naive" or "multiplicity", optionally with the parameter
            attached as in "naive-5".
        M (int, optional): The gap parameter, required unless it is part of `name`.

    Raises:
        UnknownFixture: For an unknown name.
        ParameterError: If M is missing or smaller than 1.
    """
    match = re.fullmatch(r"(naive|multiplicity)(?:-(\w+))?", name)
    if match is None:
        raise UnknownFixture(f"unknown fixture {name!r}; choose from {FIXTURES}")
    kind, suffix = match.groups()
    if suffix is not None and suffix != "M":
        if not suffix.isdigit():
            raise ParameterError(f"fixture parameter {suffix!r} is not an integer")
        if M is not None and int(suffix) != M:
            raise ParameterError(f"fixture {name!r} conflicts with M = {M}")
        M = int(suffix)
    if M is None:
        raise ParameterError(f"fixture {name!r} needs a value for M")
    if M < 1:
        raise ParameterError(f"M must be at least 1, got {M}")
    return _naive(M) if kind == "naive" else _multiplicity(M)
