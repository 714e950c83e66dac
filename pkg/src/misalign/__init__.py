"""Quantify goal misalignment across mixed human/AI agent populations.

The model: agents commit to at most one goal per problem area, goals conflict
pairwise with some probability, and a population's misalignment in an area is
the expected conflict between a random pair of distinct agents, optionally
weighted by how much each agent cares.  This package computes those scores
exactly, bounds them, generates seeded random populations, runs the standard
sweeps, and reads/writes the scenario and curve formats.
"""

from .model import (
    AGENT_KINDS,
    NULL_GOAL,
    Agent,
    ConflictMatrix,
    MisalignError,
    MisalignmentReport,
    ProblemArea,
    ScoringPreconditionError,
    Stance,
    Violation,
    World,
    goal_group,
    validate_world,
)
from .scoring import (
    AreaScore,
    area_misalignment,
    area_misalignment_mutex,
    asymptotic_bound,
    max_uniform_misalignment,
    overall_misalignment,
)
from .worldgen import (
    Presets,
    Randomize,
    Ranges,
    RngStream,
    WorldSpec,
    WorldSpecError,
    add_agents,
    check_spec,
    constant_conflicts,
    init_world,
)
from .experiments import (
    CARLA_PROBLEM_AREAS,
    DEFAULT_AGENT_LADDER,
    DEFAULT_PROPORTION_GRID,
    DEFAULT_WEIGHT_GRID,
    EXPERIMENT_NAMES,
    CurvePoint,
    ExperimentCurve,
    encode_series,
    evaluate_scenario,
    exp_carla,
    exp_conflict_levels,
    exp_goal_distribution,
    exp_varying_goals,
    exp_varying_problem_areas,
    exp_weight_sensitivity,
    goal_distribution_counts,
)
from .scenario_io import (
    BUNDLED_SCENARIOS,
    FORMAT_VERSION,
    ScenarioDocument,
    ScenarioError,
    ScenarioSchemaError,
    ScenarioSemanticError,
    ScenarioSyntaxError,
    bundled_scenario_text,
    format_number,
    load_bundled_scenario,
    parse_scenario,
    serialize_scenario,
    write_curves_csv,
)

__version__ = "0.1.0"
