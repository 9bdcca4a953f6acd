"""Multiobjective gradient descent solvers with Barzilai-Borwein steps and
variable trade-off metrics, plus the benchmark harness around them."""

from .core import (
    BBScales,
    ConfigError,
    DimensionError,
    IterationRecord,
    LineSearchFailed,
    Metric,
    MetricBreakdown,
    MopError,
    NotDescentDirection,
    SimplexWeights,
    SolveTrace,
    SolverConfig,
    Status,
    SubproblemFailed,
    check_spd,
)
from .bench import (
    RunRecord,
    Summary,
    export_csv,
    export_front_csv,
    nondominated_filter,
    run_benchmark,
    run_benchmark_traced,
    stable_seed,
    summarize,
)
from .directions import direction, direction_newton, is_critical
from .dual import DualResult, check_kkt, solve_dual
from .linesearch import armijo
from .metrics import (
    PerObjectiveBfgs,
    TradeoffState,
    aggregate_gradient,
    bfgs_update,
    update_tradeoff,
)
from .problems import (
    Problem,
    ProblemRegistry,
    QuadraticProblem,
    QuadraticSpec,
    default_registry,
    eval_jacobian,
    eval_objectives,
    fd_jacobian,
    load_problem,
    make_quadratic,
    register_problem,
    sample_initial,
    save_problem,
)
from .scales import compute_alpha, compute_alpha_euclidean
from .solver import Method, merit_w, run, verify_pareto_critical

__version__ = "0.1.0"
