from .auto import SOLVERS, AutoSolver, make_solver
from .base import BaseIPSolver, SolveResult
from .conflict import ConflictDigraph, color_digraph, conflict_graph
from .cover import (
    CoverSolver,
    KcCut,
    Provenance,
    RoundableRow,
    is_roundable,
    kc_cut,
    make_roundable,
    solve_cover,
)
from .pack import (
    Decomposition,
    IteratedOutcome,
    IterationRecord,
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
