"""Soccer line-up selection compiled to a binary quadratic model."""

from .constraints import (
    Comparator,
    ConflictMode,
    FormationSpec,
    InfeasibleError,
    LinearConstraint,
    conflict_constraints,
    formation_constraints,
    load_formation,
)
from .problem import LineupProblem
from .qubo import (
    DEFAULT_LAMBDA,
    Bqm,
    SlackRegistry,
    assemble,
    encode_equality,
    encode_inequality,
    energy,
    fill_slacks,
)
from .roster import (
    Position,
    RatingTable,
    RosterError,
    VariableIndex,
    build_variable_index,
    load_roster,
    objective_coefficients,
    paper_roster,
    parse_roster,
)
from .solvers import AnnealParams, Sample, exact_lineup, exhaustive_minimize, simulated_anneal
from .verify import (
    FeasibilityReport,
    LineupSolution,
    check_feasibility,
    compare,
    decode_lineup,
    load_lineup,
)

__version__ = "0.1.0"
