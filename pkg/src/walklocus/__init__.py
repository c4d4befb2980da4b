"""Simulation and exact-computation toolkit for locating the source of a
simple random walk on the integer lattice from its trace.

Layers, bottom up: `lattice` (walks and splittable RNG streams), `trace`
(edge/vertex/range trace graphs and their JSON documents), `graphalg`
(BFS, diameters, shortest-path counts), `cutedges` (two-sided cut edges,
block schedules, the c(d) estimator), `estimators` (psi, lambda_k, gamma),
`analytics` (exact rationals and certified enclosures), `couplings`
(step-sequence bijections and coupled-walk experiments), `harness`
(replicated experiments), `reporting` (tallies, Wilson intervals, merges).
`service` exposes everything over HTTP; `cli` is a thin client for it.
"""

from .analytics import (
    ExactValue,
    LocalisationBounds,
    TransienceVerdict,
    intersection_expectation,
    lclt_bound,
    localisation_lower_bounds,
    monotonicity_check,
    return_probability,
    return_probability_by_convolution,
    strong_transience_verdict,
    tail_sum,
)
from .couplings import (
    CouplingOutcome,
    amnesia_experiment,
    couple_walks,
    default_starts,
    middle_drift,
    reroute_steps,
    reverse_steps,
    rotate_steps,
    traces_coincide,
)
from .cutedges import (
    BlockCutCounts,
    CutEdgeRecord,
    EventDiagnostics,
    Schedule,
    build_schedule,
    diagnostics,
    estimate_c,
    finite_cut_edges,
    segment_cut_counts,
    truncation_bias_bounds,
    window_flags,
)
from .errors import (
    BudgetExceededError,
    ConfigError,
    DivergentTailError,
    FormatError,
)
from .estimators import (
    EstimatorOutcome,
    gamma_finite,
    lambda_k,
    localize,
    parse_estimator,
    psi,
)
from .graphalg import (
    DiameterSummary,
    PairGroup,
    all_pairs_distances,
    ball,
    bfs_distances,
    connected_component_labels,
    diameter_summary,
    diametric_mates,
    induced_subgraph,
    residual_components,
    shortest_path_counts,
)
from .harness import ExperimentConfig, run_diameter_growth, run_experiment
from .lattice import (
    StepSequence,
    Walk,
    generate_walk,
    neighbors,
    origin,
    random_steps,
    rng_stream,
)
from .reporting import (
    SCHEMA,
    EstimateReport,
    config_digest,
    merge_reports,
    report_from_json_dict,
    wilson_interval,
)
from .trace import (
    TraceGraph,
    build_trace,
    build_vertex_trace,
    segment_cut_flags,
    trace_from_json_dict,
    trace_to_json_dict,
    walk_from_json_dict,
    walk_to_json_dict,
    walk_until_range,
)

__version__ = "0.1.0"

__all__ = [
    "BlockCutCounts",
    "BudgetExceededError",
    "ConfigError",
    "CouplingOutcome",
    "CutEdgeRecord",
    "DiameterSummary",
    "DivergentTailError",
    "EstimateReport",
    "EstimatorOutcome",
    "EventDiagnostics",
    "ExactValue",
    "ExperimentConfig",
    "FormatError",
    "LocalisationBounds",
    "PairGroup",
    "SCHEMA",
    "Schedule",
    "StepSequence",
    "TraceGraph",
    "TransienceVerdict",
    "Walk",
    "all_pairs_distances",
    "amnesia_experiment",
    "ball",
    "bfs_distances",
    "build_schedule",
    "build_trace",
    "build_vertex_trace",
    "config_digest",
    "connected_component_labels",
    "couple_walks",
    "default_starts",
    "diagnostics",
    "diameter_summary",
    "diametric_mates",
    "estimate_c",
    "finite_cut_edges",
    "gamma_finite",
    "generate_walk",
    "induced_subgraph",
    "intersection_expectation",
    "lambda_k",
    "lclt_bound",
    "localisation_lower_bounds",
    "localize",
    "merge_reports",
    "middle_drift",
    "monotonicity_check",
    "neighbors",
    "origin",
    "parse_estimator",
    "psi",
    "random_steps",
    "report_from_json_dict",
    "reroute_steps",
    "residual_components",
    "return_probability",
    "return_probability_by_convolution",
    "reverse_steps",
    "rng_stream",
    "rotate_steps",
    "run_diameter_growth",
    "run_experiment",
    "segment_cut_flags",
    "segment_cut_counts",
    "shortest_path_counts",
    "strong_transience_verdict",
    "tail_sum",
    "trace_from_json_dict",
    "trace_to_json_dict",
    "traces_coincide",
    "truncation_bias_bounds",
    "walk_from_json_dict",
    "walk_to_json_dict",
    "walk_until_range",
    "wilson_interval",
    "window_flags",
]
