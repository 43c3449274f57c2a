"""Exact fairness checkers, partition solvers and allocation algorithms for indivisible goods."""
from .algorithms import (
    allocate_identical_leximin,
    allocate_matching,
    allocate_three_agents,
    build_envy_graph,
    eliminate_envy_cycles,
)
from .fairness import (
    NOTIONS,
    Criterion,
    FairnessReport,
    ValueThreshold,
    check,
    check_eef,
    check_envy,
    check_mma,
    check_mma1,
    check_mmax,
    check_mms,
    check_prop,
    satisfies,
    verify_witness,
)
from .model import (
    Allocation,
    Instance,
    InstanceError,
    Valuation,
    check_valuation_class,
    parse_allocation,
    parse_instance,
    serialize_allocation,
    serialize_instance,
)
from .partition import (
    BudgetExhausted,
    SearchBudget,
    exhaustive_allocation_search,
    leximin_partition,
    minimax_partition,
    mms_value,
)

__version__ = "0.1.0"
