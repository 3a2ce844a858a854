"""Demand edge cover instances built from 3-variable parity formulas.

Every variable x_i of degree deg_i > 0 gets three vertices, "x_i", "x_i=0" and
"x_i=1", of demand 4 deg_i, and two heavy edges of value and cost 4 deg_i joining
"x_i" to its literal vertices. Every clause gets one vertex of demand 3 per
falsifying assignment of its variables, joined by three parallel unit edges to
each of the three literal vertices that assignment names.

Picking a literal per variable, a cover costs 24 per clause plus 3 per clause
the assignment leaves unsatisfied.
"""

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

from sparseip.errors import InvariantViolation, ParameterError, ParseError
from sparseip.instance import Sense, SparseIP

__all__ = [
    "Max3Lin2",
    "GadgetInstance",
    "Certificate",
    "falsifying_assignments",
    "gen_hardness",
    "hardness_certificate",
    "parse_formula",
    "serialize_formula",
]

Clause = Tuple[int, int, int, int]


@dataclass(frozen=True)
class Max3Lin2:
    """Parity formula: clauses (i, j, k, C) read x_i + x_j + x_k = C (mod 2).

    Raises:
        ParameterError: If a clause repeats a variable, leaves 0..nvars-1 or has C not in {0, 1}.
    """

    nvars: int
    clauses: Tuple[Clause, ...] = ()

    def __post_init__(self):
        clauses = tuple(tuple(int(v) for v in clause) for clause in self.clauses)
        object.__setattr__(self, "clauses", clauses)
        if self.nvars < 0:
            raise ParameterError("nvars must be nonnegative")
        for q, clause in enumerate(clauses):
            if len(clause) != 4:
                raise ParameterError(f"clause {q} is not (i, j, k, C)")
            *variables, parity = clause
            if len(set(variables)) != 3:
                raise ParameterError(f"clause {q} repeats a variable")
            if any(not 0 <= v < self.nvars for v in variables):
                raise ParameterError(f"clause {q} uses a variable outside 0..{self.nvars - 1}")
            if parity not in (0, 1):
                raise ParameterError(f"clause {q} has parity {parity}")

    @property
    def m(self) -> int:
        return len(self.clauses)

    def degree(self, i: int) -> int:
        return sum(1 for clause in self.clauses if i in clause[:3])

    def is_satisfied(self, q: int, assignment: Sequence[int]) -> bool:
        i, j, k, parity = self.clauses[q]
        return (assignment[i] + assignment[j] + assignment[k]) % 2 == parity

    def count_unsatisfied(self, assignment: Sequence[int]) -> int:
        if len(assignment) != self.nvars:
            raise ParameterError(
                f"assignment has {len(assignment)} values, formula has {self.nvars} variables"
            )
        return sum(1 for q in range(self.m) if not self.is_satisfied(q, assignment))


def falsifying_assignments(parity: int) -> List[Tuple[int, int, int]]:
    """The four 0-1 triples whose sum mod 2 differs from `parity`, in lexicographic order."""
    return [bits for bits in itertools.product((0, 1), repeat=3) if sum(bits) % 2 != parity]


@dataclass
class GadgetInstance:
    """Covering instance of the construction together with its labels and lookups.

    Attributes:
        instance (SparseIP): Rows are vertices, columns are edges, d = 1.
        row_labels (list): Vertex labels, e.g. "x0", "x0=1", "c0:x0=0,x1=1,x2=1".
        col_labels (list): Edge labels "<vertex>--<vertex>", unit edges suffixed "#r".
        left_rows (list): Variable and clause vertices, one side of the bipartition.
        right_rows (list): Literal vertices, the other side.
        heavy (dict): (i, value) -> heavy edge column joining "x_i" and "x_i=value".
        vertex (dict): (clause index, assignment triple) -> clause vertex row.
        unit (dict): (clause vertex row, literal row) -> the three parallel columns.
        literal (dict): (i, value) -> row of "x_i=value".
    """

    instance: SparseIP
    row_labels: List[str] = field(default_factory=list)
    col_labels: List[str] = field(default_factory=list)
    left_rows: List[int] = field(default_factory=list)
    right_rows: List[int] = field(default_factory=list)
    heavy: Dict[Tuple[int, int], int] = field(default_factory=dict)
    vertex: Dict[Tuple[int, Tuple[int, int, int]], int] = field(default_factory=dict)
    unit: Dict[Tuple[int, int], List[int]] = field(default_factory=dict)
    literal: Dict[Tuple[int, int], int] = field(default_factory=dict)

    def labels(self) -> Dict[str, List[str]]:
        return {"rows": list(self.row_labels), "cols": list(self.col_labels)}


def gen_hardness(formula: Max3Lin2) -> GadgetInstance:
    """Build the demand edge cover instance of `formula`.

    Variables that occur in no clause get no vertices. For one clause the result has
    13 vertices and 42 edges.
    """
    gadget = GadgetInstance(instance=None)
    demands: List[int] = []
    columns: List[Tuple[Dict[int, int], int]] = []

    def add_row(label, demand, side):
        gadget.row_labels.append(label)
        demands.append(demand)
        side.append(len(demands) - 1)
        return len(demands) - 1

    degrees = {i: formula.degree(i) for i in range(formula.nvars)}
    variable_row = {}
    for i in range(formula.nvars):
        if not degrees[i]:
            continue
        demand = 4 * degrees[i]
        variable_row[i] = add_row(f"x{i}", demand, gadget.left_rows)
        for value in (0, 1):
            gadget.literal[(i, value)] = add_row(f"x{i}={value}", demand, gadget.right_rows)

    for i, row in variable_row.items():
        weight = 4 * degrees[i]
        for value in (0, 1):
            gadget.heavy[(i, value)] = len(columns)
            columns.append(({row: weight, gadget.literal[(i, value)]: weight}, weight))
            gadget.col_labels.append(f"x{i}--x{i}={value}")

    for q, (i, j, k, parity) in enumerate(formula.clauses):
        for bits in falsifying_assignments(parity):
            label = f"c{q}:" + ",".join(f"x{v}={b}" for v, b in zip((i, j, k), bits))
            row = add_row(label, 3, gadget.left_rows)
            gadget.vertex[(q, bits)] = row
            for v, b in zip((i, j, k), bits):
                target = gadget.literal[(v, b)]
                parallel = []
                for r in range(3):
                    parallel.append(len(columns))
                    columns.append(({row: 1, target: 1}, 1))
                    gadget.col_labels.append(f"{label}--x{v}={b}#{r}")
                gadget.unit[(row, target)] = parallel

    entries = [(i, j, a) for j, (col, _) in enumerate(columns) for i, a in col.items()]
    gadget.instance = SparseIP(
        Sense.COVER,
        len(demands),
        len(columns),
        tuple(entries),
        tuple(demands),
        tuple(cost for _, cost in columns),
        (1,) * len(columns),
    )
    return gadget


@dataclass(frozen=True)
class Certificate:
    """Edge set of the explicit cover for one assignment, with its cost and 0-1 vector."""

    edges: Tuple[int, ...]
    cost: Fraction
    unsatisfied: int
    x: Tuple[int, ...]


def hardness_certificate(formula: Max3Lin2, assignment: Sequence[int]) -> Certificate:
    """Explicit cover of cost 24m + 3t for an assignment leaving t clauses unsatisfied.

    Each variable takes the heavy edge to the literal it is assigned. A satisfied
    clause covers each vertex one flip away with the three edges to the flipped
    literal and the all-flipped vertex with one edge to each literal (12 edges). An
    unsatisfied clause covers the vertex of the assignment itself with its three
    least edges and each vertex two flips away with two edges to each flipped
    literal (15 edges).

    Raises:
        ParameterError: If the assignment length or values are wrong.
        InvariantViolation: If the cover is infeasible or its cost is off.
    """
    assignment = [int(v) for v in assignment]
    if any(v not in (0, 1) for v in assignment):
        raise ParameterError("assignment values must be 0 or 1")
    t = formula.count_unsatisfied(assignment)
    gadget = gen_hardness(formula)
    chosen = set()

    for (i, value), col in gadget.heavy.items():
        if assignment[i] == value:
            chosen.add(col)

    for q, (i, j, k, _) in enumerate(formula.clauses):
        variables = (i, j, k)
        own = tuple(assignment[v] for v in variables)

        def flipped(*positions):
            return tuple(1 - b if p in positions else b for p, b in enumerate(own))

        def edges(bits, p):
            row = gadget.vertex[(q, bits)]
            target = gadget.literal[(variables[p], bits[p])]
            return gadget.unit[(row, target)]

        if formula.is_satisfied(q, assignment):
            for p in range(3):
                chosen.update(edges(flipped(p), p))
            everything = flipped(0, 1, 2)
            for p in range(3):
                chosen.add(edges(everything, p)[0])
        else:
            incident = sorted(col for p in range(3) for col in edges(own, p))
            chosen.update(incident[:3])
            for pair in ((0, 1), (0, 2), (1, 2)):
                bits = flipped(*pair)
                for p in pair:
                    chosen.update(edges(bits, p)[:2])

    inst = gadget.instance
    x = tuple(1 if j in chosen else 0 for j in range(inst.ncols))
    cost = inst.objective(x)
    expected = 24 * formula.m + 3 * t
    if cost != expected:
        raise InvariantViolation(f"certificate costs {cost}, expected {expected}")
    if not inst.is_feasible(x):
        raise InvariantViolation("certificate does not cover every demand")
    return Certificate(tuple(sorted(chosen)), cost, t, x)


def parse_formula(text: str, nvars: int = None) -> Max3Lin2:
    """Parse lines "i j k C"; blank lines and lines starting with "#" are skipped.

    A first line "nvars N" fixes the number of variables; otherwise it is `nvars`
    or one more than the largest index.
    """
    clauses = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if fields[0] == "nvars" and len(fields) == 2 and not clauses:
            try:
                nvars = int(fields[1])
            except ValueError as exc:
                raise ParseError(f"line {lineno}: invalid variable count") from exc
            continue
        if len(fields) != 4:
            raise ParseError(f"line {lineno}: expected 'i j k C', got {line!r}")
        try:
            clauses.append(tuple(int(v) for v in fields))
        except ValueError as exc:
            raise ParseError(f"line {lineno}: non-integer field in {line!r}") from exc
    if nvars is None:
        nvars = max((max(clause[:3]) + 1 for clause in clauses), default=0)
    try:
        return Max3Lin2(nvars, tuple(clauses))
    except ParameterError as exc:
        raise ParseError(str(exc)) from exc


def serialize_formula(formula: Max3Lin2) -> str:
    lines = [f"nvars {formula.nvars}"]
    lines += [" ".join(str(v) for v in clause) for clause in formula.clauses]
    return "\n".join(lines) + "\n"
