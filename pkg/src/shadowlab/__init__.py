"""shadowlab: a desk-scale laboratory for shadow-path simplex runs on
smoothed linear programs.

The package splits into instance plumbing (:mod:`shadowlab.lp`), noise
families with certified constants (:mod:`shadowlab.noise`), the exact
parametric pivot engine (:mod:`shadowlab.pivot`), Phase I strategies
(:mod:`shadowlab.phase1`), the interpolation Phase II
(:mod:`shadowlab.interpolate`), brute-force polar geometry
(:mod:`shadowlab.polar`), and the sweep harness (:mod:`shadowlab.bench`)
with its CLI (:mod:`shadowlab.cli`).
"""

from .lp import (
    Basis,
    DegenerateInstance,
    LPInstance,
    SolveResult,
    basis_point,
    default_tol,
    is_feasible_basis,
    is_optimal_basis,
    max_bases,
    oracle_solve,
)
from .noise import (
    GAUSSIAN,
    KINDS,
    LAPLACE,
    LAPLACE_GAUSSIAN,
    DirTail,
    DistributionCertificate,
    DomainError,
    NoiseSpec,
    NormTail,
    SmoothedModel,
    certificate,
    default_lg_radius,
    density_lg,
    empirical_tail,
    sample_instance,
    sample_noise,
    sample_noise_batch,
    sigma_bar,
    tail_bound,
)
from .pivot import (
    DegeneratePivot,
    MaxPivotsExceeded,
    NotOptimalStart,
    PivotStep,
    ShadowProbe,
    ShadowRunResult,
    shadow_vertex_run,
)
from .phase1 import (
    RestartExhausted,
    SymRVConfig,
    SymRVOutcome,
    ZeroLeadingObjective,
    dd_solve,
    dd_solve_any_objective,
    symmetric_rv_solve,
    symrv_loop_stats,
)
from .interpolate import (
    IntLP,
    TwoPhaseResult,
    build_int_lp,
    solve_instance,
    two_phase_solve,
)
from .polar import (
    DegenerateConfiguration,
    OutsideHull,
    PlaneBasis,
    PolarEdge,
    PolarSection,
    RankDeficientShape,
    Shape,
    chord_diameter,
    gaussian_shadow_bound,
    kernel_combination,
    parametrized_edge_bound,
    polar_section,
    shadow_vertices,
    widest_point,
)
from .bench import (
    CSV_HEADER,
    ConfigError,
    SweepConfig,
    SweepRecord,
    SweepResult,
    csv_text,
    run_sweep,
    verify_tails,
    write_csv,
)

__version__ = "0.1.0"

__all__ = [
    "Basis",
    "CSV_HEADER",
    "ConfigError",
    "DegenerateConfiguration",
    "DegenerateInstance",
    "DegeneratePivot",
    "DirTail",
    "DistributionCertificate",
    "DomainError",
    "GAUSSIAN",
    "IntLP",
    "KINDS",
    "LAPLACE",
    "LAPLACE_GAUSSIAN",
    "LPInstance",
    "MaxPivotsExceeded",
    "NoiseSpec",
    "NormTail",
    "NotOptimalStart",
    "OutsideHull",
    "PivotStep",
    "PlaneBasis",
    "PolarEdge",
    "PolarSection",
    "RankDeficientShape",
    "RestartExhausted",
    "ShadowProbe",
    "ShadowRunResult",
    "Shape",
    "SmoothedModel",
    "SolveResult",
    "SweepConfig",
    "SweepRecord",
    "SweepResult",
    "SymRVConfig",
    "SymRVOutcome",
    "TwoPhaseResult",
    "ZeroLeadingObjective",
    "basis_point",
    "build_int_lp",
    "certificate",
    "chord_diameter",
    "csv_text",
    "dd_solve",
    "dd_solve_any_objective",
    "default_lg_radius",
    "default_tol",
    "density_lg",
    "empirical_tail",
    "gaussian_shadow_bound",
    "is_feasible_basis",
    "is_optimal_basis",
    "kernel_combination",
    "max_bases",
    "oracle_solve",
    "parametrized_edge_bound",
    "polar_section",
    "run_sweep",
    "sample_instance",
    "sample_noise",
    "sample_noise_batch",
    "shadow_vertex_run",
    "shadow_vertices",
    "sigma_bar",
    "solve_instance",
    "symmetric_rv_solve",
    "symrv_loop_stats",
    "tail_bound",
    "two_phase_solve",
    "verify_tails",
    "widest_point",
    "write_csv",
]
