"""Offline packet scheduling under two-sided (pre/post) delay constraints.

Library surface: problem/cost/schedule types and verification (`core`),
feasibility and decomposition (`feasibility`), energy-optimal schedulers
(`energy_sched`), budgeted completion-time schedulers (`time_sched`),
schedule structure analysis (`structure`), independent solvers (`oracle`),
and the benchmark harness (`bench`). `twosched` is also a CLI.
"""

from .core import (
    CostModel,
    DerivedBounds,
    InfeasibleProblem,
    InsufficientBudget,
    ProblemInstance,
    Schedule,
    VerificationReport,
    completion_time,
    cost_model_from_spec,
    derive_bounds,
    equality_tolerance,
    inverse_cost,
    shannon_cost,
    total_cost,
    verify_schedule,
)
from .energy_sched import (
    cost_independence_check,
    schedule_energy_two_sided,
    schedule_single_deadline,
)
from .feasibility import (
    Decomposition,
    FeasibilityVerdict,
    Segment,
    Violation,
    check_feasibility,
    decompose,
)
from .oracle import OracleConfig, OracleConvergenceError, oracle_energy, oracle_time
from .structure import (
    Group,
    PacketLabel,
    ScheduleStructure,
    Subgroup,
    check_lemma1,
    classify,
)
from .time_sched import (
    BudgetedInstance,
    CaseTag,
    TimeScheduleResult,
    schedule_time_post,
    schedule_time_two_sided,
)

__version__ = "0.1.0"

__all__ = [
    "BudgetedInstance",
    "CaseTag",
    "CostModel",
    "Decomposition",
    "DerivedBounds",
    "FeasibilityVerdict",
    "Group",
    "InfeasibleProblem",
    "InsufficientBudget",
    "OracleConfig",
    "OracleConvergenceError",
    "PacketLabel",
    "ProblemInstance",
    "Schedule",
    "ScheduleStructure",
    "Segment",
    "Subgroup",
    "TimeScheduleResult",
    "VerificationReport",
    "Violation",
    "check_feasibility",
    "check_lemma1",
    "classify",
    "completion_time",
    "cost_independence_check",
    "cost_model_from_spec",
    "decompose",
    "derive_bounds",
    "equality_tolerance",
    "inverse_cost",
    "oracle_energy",
    "oracle_time",
    "schedule_energy_two_sided",
    "schedule_single_deadline",
    "schedule_time_post",
    "schedule_time_two_sided",
    "shannon_cost",
    "total_cost",
    "verify_schedule",
]
