"""Deterministic uplink RB scheduling simulator for camera surveillance cells."""

from .scenario import (
    CameraSpec,
    FeasibilityExhausted,
    GenParams,
    QoVWeights,
    Scenario,
    TargetObject,
    abstract_scenario,
    build_scenario,
    camera_quality,
    check_feasible,
    coverage_indicator,
    generate_scenario,
    quality_of_view,
)
from .channel import (
    DEFAULT_MCS_TABLE,
    ChannelState,
    EnvConfig,
    McsLevel,
    SpectrumConfig,
    build_channel_state,
    channel_from_rb_matrix,
    path_loss_db,
    rb_requirement,
    select_mcs,
    sinr_db,
)
from .sched import (
    AllocationMap,
    CapacityExceeded,
    InfeasibleError,
    Placement,
    RbRange,
    ScheduleInstance,
    Violation,
    baseline_coverage_phase,
    baseline_fill_phase,
    mqbs_coverage_phase,
    mqbs_improvement_phase,
    objective_value,
    place_contiguous,
    schedule_baseline,
    schedule_mqbs,
    validate_allocation,
)
from .dynamic import (
    AdmitOutcome,
    BackgroundFlow,
    Decision,
    DynamicState,
    UnknownFlow,
    admit_background,
    default_thresholds,
    make_dynamic_state,
    release_background,
    remove_camera,
    reroute_camera,
)
from .oracle import (
    BudgetExhausted,
    ExactSolution,
    allocation_from_assignment,
    solve_enumerate,
    solve_exact,
)
from .harness import (
    ExperimentConfig,
    PointRecord,
    ResultRow,
    generate_event_trace,
    run_point,
    run_sweep,
    run_timeline,
)

__version__ = "0.1.0"
