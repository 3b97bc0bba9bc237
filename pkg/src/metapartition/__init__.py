"""Ideal stopping times and planning/execution partitions for anytime computation."""

from .environment import (
    AgentPolicy,
    DiscreteDistribution,
    Environment,
    ProblemInstance,
    ProductLogNormal,
    ProductLogUniform,
    Valuation,
    instance_optimal_utility,
    optimal_utilities,
    value_of_metareasoning,
)
from .errors import (
    BracketError,
    DegenerateEfficacyError,
    DomainError,
    MetapartitionError,
    ParameterError,
    SamplingError,
)
from .goal import (
    GoalSolution,
    GoalSpec,
    alternate_planning_time,
    planning_balance_residual,
    problem_reduction_time,
    solve_goal_generic,
    solve_goal_linear,
    total_time,
)
from .models import (
    Exponential,
    InversePower,
    LinearCost,
    LinearEfficacy,
    PartitionedExponential,
    PartitionedInversePower,
    PowerCost,
    TabulatedCost,
    TabulatedEfficacy,
    eval_cost,
    eval_cost_derivative,
    eval_cost_second_derivative,
    eval_uc,
    eval_uo,
    eval_uo_derivative,
    eval_uo_hessian,
)
from .oracle import ArgOpt, OracleConfig, finite_diff, grid_max_1d, grid_max_2d, grid_min_1d
from .partition import (
    HessianCheck,
    PartitionSolution,
    check_hessian,
    execution_time_given_planning,
    planning_residual,
    solve_partition,
    solve_partition_closed_form,
    solve_partition_fixed_point,
    solve_partition_grid,
)
from .stopping import (
    StoppingSolution,
    inverse_power_optimal_value,
    marginal_gap,
    solve_stop,
    solve_stop_exponential,
    solve_stop_generic,
    solve_stop_inverse_power,
)
from .sweeps import CurvePoint, partition_slices, sweep, value_curve

__version__ = "0.1.0"
