"""Seeded random instances and formulas."""

from fractions import Fraction
from typing import List, Optional

import numpy as np

from sparseip.errors import ParameterError
from sparseip.generators.hardness import Max3Lin2
from sparseip.instance import Sense, SparseIP

__all__ = ["D_MODES", "MODES", "gen_random", "gen_random_formula"]

D_MODES = {
    "unit": (1,),
    "small": (1, 2, 3),
    "mixed": (1, 2, 3, None),
    "infinite": (None,),
}
MODES = ("row-sparse", "col-sparse")


def _rational(rng: np.random.Generator, bound: int, high: int, low: int = 0) -> Fraction:
    """Positive p/q with q in [1, bound] and p/q in [low, high]."""
    q = int(rng.integers(1, bound + 1))
    p = int(rng.integers(max(1, low * q), high * q + 1))
    return Fraction(p, q)


def _check_parameters(sense, n, m, k, mode, bound, d_mode, width):
    if sense not in ("cover", "pack", Sense.COVER, Sense.PACK):
        raise ParameterError(f"unknown sense {sense!r}")
    if mode not in MODES:
        raise ParameterError(f"mode must be one of {MODES}, got {mode!r}")
    if d_mode not in D_MODES:
        raise ParameterError(f"d_mode must be one of {tuple(D_MODES)}, got {d_mode!r}")
    if n < 1 or m < 1 or k < 1 or bound < 1:
        raise ParameterError("n, m, k and coeff_denominator_bound must be positive")
    limit = n if mode == "row-sparse" else m
    if k > limit:
        raise ParameterError(f"k = {k} exceeds the line length {limit} in {mode} mode")
    if mode == "col-sparse" and n * k < m:
        raise ParameterError(f"{n} columns of at most k = {k} rows cannot reach all {m} rows")
    if width is not None and Fraction(width) <= 0:
        raise ParameterError("width must be positive")


def _fill_empty_rows(rng: np.random.Generator, supports: List[List[int]], n: int, k: int):
    """Give every empty row one column while keeping each column in at most k rows."""
    load = [0] * n
    for cols in supports:
        for j in cols:
            load[j] += 1
    for i, cols in enumerate(supports):
        if cols:
            continue
        spare = [j for j in range(n) if load[j] < k]
        if spare:
            j = spare[int(rng.integers(len(spare)))]
            load[j] += 1
        else:
            # every column is full, so some row holds two entries and can give one up
            donors = [r for r, other in enumerate(supports) if len(other) > 1]
            donor = supports[donors[int(rng.integers(len(donors)))]]
            j = donor.pop(int(rng.integers(len(donor))))
        cols.append(j)


def gen_random(
    seed,
    sense,
    n: int,
    m: int,
    k: int,
    mode: str = "row-sparse",
    coeff_denominator_bound: int = 5,
    d_mode: str = "mixed",
    width: Optional[int] = None,
) -> SparseIP:
    """Random sparse covering or packing instance.

    In "row-sparse" mode every row gets between 1 and k nonzeros, in "col-sparse"
    mode every column does and rows left empty are then given one column, so no
    row is empty in either mode. Entries are p/q with q <= coeff_denominator_bound and
    value in (0, 2]; costs lie in (0, 4]. With `width` set, b = 1 and entries are
    p/(q * width) <= 1/width instead.

    Covering rows are capped at what the row can reach with x = d, so the instance
    is always feasible, and columns without entries get cost 0.

    Args:
        seed: Anything `numpy.random.default_rng` accepts.
        sense: "cover" or "pack".
        n (int): Number of columns.
        m (int): Number of rows.
        k (int): Sparsity bound of every row or column.
        mode (str): "row-sparse" or "col-sparse".
        coeff_denominator_bound (int): Largest denominator drawn.
        d_mode (str): Multiplicities from `D_MODES`.
        width (int, optional): Width of the instance.

    Raises:
        ParameterError: On invalid parameters.
    """
    _check_parameters(sense, n, m, k, mode, coeff_denominator_bound, d_mode, width)
    sense = Sense(sense)
    rng = np.random.default_rng(seed)
    bound = coeff_denominator_bound

    supports: List[List[int]] = [[] for _ in range(m)]
    if mode == "row-sparse":
        for i in range(m):
            size = int(rng.integers(1, k + 1))
            supports[i] = sorted(int(j) for j in rng.choice(n, size=size, replace=False))
    else:
        for j in range(n):
            size = int(rng.integers(1, k + 1))
            for i in rng.choice(m, size=size, replace=False):
                supports[int(i)].append(j)
        _fill_empty_rows(rng, supports, n, k)

    entries = []
    for i, cols in enumerate(supports):
        for j in sorted(cols):
            if width is None:
                a = _rational(rng, bound, 2)
            else:
                q = int(rng.integers(1, bound + 1))
                a = Fraction(int(rng.integers(1, q + 1)), q) / Fraction(width)
            entries.append((i, j, a))

    if width is not None:
        b = [Fraction(1)] * m
    elif sense is Sense.COVER:
        b = [_rational(rng, bound, 2) for _ in range(m)]
    else:
        b = [_rational(rng, bound, 3, low=1) for _ in range(m)]
    c = [_rational(rng, bound, 4) for _ in range(n)]
    choices = D_MODES[d_mode]
    d = [choices[int(rng.integers(len(choices)))] for _ in range(n)]

    used = {j for _, j, _ in entries}
    c = [cj if j in used else Fraction(0) for j, cj in enumerate(c)]
    if sense is Sense.COVER:
        reach = [Fraction(0)] * m
        unbounded = [False] * m
        for i, j, a in entries:
            if d[j] is None:
                unbounded[i] = True
            else:
                reach[i] += a * d[j]
        b = [bi if unbounded[i] else min(bi, reach[i]) for i, bi in enumerate(b)]

    return SparseIP(sense, m, n, tuple(entries), tuple(b), tuple(c), tuple(d))


def gen_random_formula(seed, nvars: int, nclauses: int):
    """Random 3-variable parity formula with distinct variables per clause.

    Raises:
        ParameterError: If nvars < 3 while clauses are requested, or a count is negative.
    """
    if nvars < 0 or nclauses < 0:
        raise ParameterError("nvars and nclauses must be nonnegative")
    if nclauses and nvars < 3:
        raise ParameterError("clauses need at least 3 variables")
    rng = np.random.default_rng(seed)
    clauses = []
    for _ in range(nclauses):
        i, j, k = (int(v) for v in rng.choice(nvars, size=3, replace=False))
        clauses.append((i, j, k, int(rng.integers(2))))
    return Max3Lin2(nvars, tuple(clauses))
