from .fixtures import FIXTURES, gen_gap_fixture
from .hardness import (
    Certificate,
    GadgetInstance,
    Max3Lin2,
    falsifying_assignments,
    gen_hardness,
    hardness_certificate,
    parse_formula,
    serialize_formula,
)
from .synthetic import D_MODES, MODES, gen_random, gen_random_formula
