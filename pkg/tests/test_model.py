"""Model construction, the validator's categories, and goal groups."""

import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings

from conftest import small_worlds
from misalign import (
    Agent,
    ConflictMatrix,
    ProblemArea,
    Stance,
    World,
    goal_group,
    validate_world,
)
from misalign import model


def valid_world() -> World:
    areas = (
        ProblemArea(id="first", k=3, conflict=ConflictMatrix.from_lower(3, [[0.2], [0.4, 0.6]])),
        ProblemArea(id="second", k=2, conflict=ConflictMatrix.uniform(2, 0.5)),
    )
    agents = (
        Agent("a", "human", (Stance(1, 0.8), Stance(1, 0.3))),
        Agent("b", "ai", (Stance(2, 0.5), Stance(0, 0.9))),
        Agent("c", "other", (Stance(3, 1.0), Stance(2, 0.0))),
    )
    return World(problem_areas=areas, agents=agents)


def matrix_with(k: int, cells: dict[tuple[int, int], float]) -> ConflictMatrix:
    entries = np.array(ConflictMatrix.uniform(k, 0.5).entries, copy=True)
    for (g, h), value in cells.items():
        entries[g, h] = value
    return ConflictMatrix(k, entries)


def replace_area(world: World, index: int, area: ProblemArea) -> World:
    areas = list(world.problem_areas)
    areas[index] = area
    return World(problem_areas=tuple(areas), agents=world.agents)


def replace_agent(world: World, index: int, agent: Agent) -> World:
    agents = list(world.agents)
    agents[index] = agent
    return World(problem_areas=world.problem_areas, agents=tuple(agents))


def test_valid_world_has_no_violations():
    assert validate_world(valid_world()) == []


def test_model_is_immutable():
    world = valid_world()
    with pytest.raises(dataclasses.FrozenInstanceError):
        world.agents[0].kind = "ai"
    with pytest.raises(dataclasses.FrozenInstanceError):
        world.problem_areas[0].stances = ()
    with pytest.raises(ValueError):
        world.problem_areas[0].conflict.entries[1, 2] = 0.9


# Each entry breaks exactly one invariant and must yield exactly one
# violation of the matching category.
MUTATIONS = {
    model.ASYMMETRIC_CONFLICT: lambda w: replace_area(
        w, 1, ProblemArea("second", 2, matrix_with(2, {(1, 2): 0.3, (2, 1): 0.7}))
    ),
    model.NONZERO_DIAGONAL: lambda w: replace_area(
        w, 1, ProblemArea("second", 2, matrix_with(2, {(1, 1): 0.2}))
    ),
    model.NULL_GOAL_CONFLICT: lambda w: replace_area(
        w, 1, ProblemArea("second", 2, matrix_with(2, {(0, 2): 0.4, (2, 0): 0.4}))
    ),
    model.CONFLICT_OUT_OF_RANGE: lambda w: replace_area(
        w, 1, ProblemArea("second", 2, matrix_with(2, {(1, 2): 1.5, (2, 1): 1.5}))
    ),
    model.AREA_GOAL_COUNT: lambda w: replace_area(
        # Agents must drop to the null goal so only the k invariant breaks.
        dataclasses.replace(
            w,
            agents=tuple(
                dataclasses.replace(
                    a, stances=(a.stances[0], Stance(model.NULL_GOAL, 0.0))
                )
                for a in w.agents
            ),
        ),
        1,
        ProblemArea("second", 0, ConflictMatrix.zeros(0)),
    ),
    model.CONFLICT_SHAPE: lambda w: replace_area(
        w, 1, ProblemArea("second", 2, ConflictMatrix.zeros(1))
    ),
    model.STANCE_COUNT: lambda w: replace_agent(
        w, 1, Agent("b", "ai", (Stance(2, 0.5),))
    ),
    model.GOAL_OUT_OF_RANGE: lambda w: replace_agent(
        w, 1, Agent("b", "ai", (Stance(9, 0.5), Stance(0, 0.9)))
    ),
    model.WEIGHT_OUT_OF_RANGE: lambda w: replace_agent(
        w, 1, Agent("b", "ai", (Stance(2, 1.5), Stance(0, 0.9)))
    ),
}


@pytest.mark.parametrize("kind", sorted(MUTATIONS))
def test_validator_reports_exactly_one_matching_violation(kind):
    violations = validate_world(MUTATIONS[kind](valid_world()))
    assert len(violations) == 1, violations
    assert violations[0].kind == kind
    assert violations[0].severity == "error"
    assert violations[0].path


def test_violation_paths_point_at_the_field():
    bad = MUTATIONS[model.GOAL_OUT_OF_RANGE](valid_world())
    (violation,) = validate_world(bad)
    assert violation.path == "agents[1].stances[0].goal"
    assert "9" in violation.message


def test_too_few_agents_is_a_warning_not_an_error():
    world = World(problem_areas=valid_world().problem_areas, agents=valid_world().agents[:1])
    violations = validate_world(world)
    assert model.TOO_FEW_AGENTS in {v.kind for v in violations}
    assert all(v.severity == "warning" for v in violations)


def test_more_goals_than_agents_is_a_warning():
    world = World(problem_areas=valid_world().problem_areas, agents=valid_world().agents[:2])
    violations = validate_world(world)
    assert [v.kind for v in violations] == [model.GOALS_EXCEED_AGENTS]
    assert violations[0].severity == "warning"
    assert violations[0].path == "problem_areas[0].k"


def test_empty_population_world_is_structurally_fine():
    world = World(problem_areas=valid_world().problem_areas, agents=())
    kinds = {v.kind for v in validate_world(world)}
    assert all(v.severity == "warning" for v in validate_world(world))
    assert model.TOO_FEW_AGENTS in kinds


def test_goal_group_members():
    world = valid_world()
    assert goal_group(world, 0, 1) == {0}
    assert goal_group(world, 1, 0) == {1}
    assert goal_group(world, 1, 2) == {2}
    assert goal_group(world, 0, 0) == set()


def test_goal_group_rejects_bad_indices():
    world = valid_world()
    with pytest.raises(IndexError):
        goal_group(world, 5, 1)
    with pytest.raises(ValueError):
        goal_group(world, 0, 4)
    with pytest.raises(ValueError):
        goal_group(world, 0, -1)


@settings(max_examples=50, derandomize=True)
@given(small_worlds())
def test_goal_groups_partition_the_population(world):
    for j, area in enumerate(world.problem_areas):
        groups = [goal_group(world, j, g) for g in range(area.k + 1)]
        union = set().union(*groups)
        assert union == set(range(world.n_agents))
        assert sum(len(g) for g in groups) == world.n_agents  # pairwise disjoint


@settings(max_examples=50, derandomize=True)
@given(small_worlds())
def test_generated_strategy_worlds_are_valid(world):
    assert [v for v in validate_world(world) if v.severity == "error"] == []


def test_from_lower_and_lower_rows_are_inverse():
    rows = [[0.5], [0.9, 0.3]]
    matrix = ConflictMatrix.from_lower(3, rows)
    assert matrix.lower_rows() == rows
    assert matrix.value(1, 2) == matrix.value(2, 1) == 0.5
    assert matrix.value(3, 1) == 0.9


def test_from_lower_rejects_misshapen_input():
    with pytest.raises(ValueError):
        ConflictMatrix.from_lower(3, [[0.5]])
    with pytest.raises(ValueError):
        ConflictMatrix.from_lower(3, [[0.5], [0.9]])


def test_uniform_matrix_layout():
    matrix = ConflictMatrix.uniform(3, 0.7)
    assert matrix.entries.shape == (4, 4)
    assert matrix.value(0, 1) == 0.0
    assert matrix.value(2, 2) == 0.0
    assert matrix.value(1, 3) == 0.7
