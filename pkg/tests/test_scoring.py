"""Scoring: frozen examples, the brute-force oracle, and algebraic properties."""

import math

import numpy as np
import pytest
from hypothesis import given, settings

from conftest import brute_force_area, mutex_world, small_worlds
from misalign import (
    Agent,
    ConflictMatrix,
    ProblemArea,
    ScoringPreconditionError,
    Stance,
    World,
    area_misalignment,
    area_misalignment_mutex,
    asymptotic_bound,
    max_uniform_misalignment,
    overall_misalignment,
)

TOL = 1e-12


def two_agent_world(conflict: float, w1: float, w2: float) -> World:
    area = ProblemArea(id="area_0", k=2, conflict=ConflictMatrix.uniform(2, conflict))
    return World(
        problem_areas=(area,),
        agents=(
            Agent("agent_0", "human", (Stance(1, w1),)),
            Agent("agent_1", "ai", (Stance(2, w2),)),
        ),
    )


def test_two_agent_weighted_score_is_conflict_times_geometric_mean():
    score = area_misalignment(two_agent_world(0.6, 0.5, 0.8), 0)
    assert score.method == "exact_weighted"
    assert abs(score.value - 0.6 * math.sqrt(0.5 * 0.8)) < TOL


def test_two_agent_unweighted_score_ignores_weights():
    score = area_misalignment(two_agent_world(0.6, 0.5, 0.8), 0, weighted=False)
    assert score.method == "exact_unweighted"
    assert abs(score.value - 0.6) < TOL


def test_even_split_of_four_agents_over_two_goals():
    world = mutex_world([1, 1, 2, 2], k=2)
    assert abs(area_misalignment(world, 0, weighted=False).value - 2 / 3) < TOL


def test_all_distinct_goals_fully_misaligned():
    world = mutex_world([1, 2, 3], k=3)
    assert area_misalignment(world, 0).value == 1.0


def test_agreeing_population_has_zero_misalignment():
    world = mutex_world([2, 2, 2, 2], k=3)
    assert area_misalignment(world, 0).value == 0.0


def test_mutex_closed_form_examples():
    assert abs(area_misalignment_mutex([2, 2]).value - 2 / 3) < TOL
    assert abs(area_misalignment_mutex([4, 4, 4]).value - 24 / 33) < TOL
    assert area_misalignment_mutex([5]).value == 0.0
    # null-goal holders occupy slots without conflicting
    assert abs(area_misalignment_mutex([2, 2], null_count=1).value - 8 / 20) < TOL
    assert area_misalignment_mutex([0, 0], null_count=3).value == 0.0
    assert area_misalignment_mutex([2, 2]).method == "mutex_closed_form"


def test_mutex_rejects_bad_counts():
    with pytest.raises(ValueError):
        area_misalignment_mutex([-1, 3])
    with pytest.raises(ScoringPreconditionError):
        area_misalignment_mutex([1])
    with pytest.raises(ScoringPreconditionError):
        area_misalignment_mutex([], null_count=1)


def test_scoring_preconditions():
    world = mutex_world([1, 2], k=2)
    single = World(world.problem_areas, world.agents[:1])
    with pytest.raises(ScoringPreconditionError):
        area_misalignment(single, 0)
    with pytest.raises(IndexError):
        area_misalignment(world, 3)
    with pytest.raises(ScoringPreconditionError):
        overall_misalignment(World((), world.agents))


def test_null_goal_carries_no_weight():
    area = ProblemArea(id="area_0", k=2, conflict=ConflictMatrix.uniform(2, 1.0))
    world = World(
        problem_areas=(area,),
        agents=(
            Agent("agent_0", "other", (Stance(1, 1.0),)),
            Agent("agent_1", "other", (Stance(0, 0.9),)),  # stored weight must be ignored
            Agent("agent_2", "other", (Stance(2, 1.0),)),
        ),
    )
    # only the (goal 1, goal 2) ordered pairs conflict: 2 of 6
    assert abs(area_misalignment(world, 0).value - 2 / 6) < TOL
    assert abs(area_misalignment(world, 0, weighted=False).value - 2 / 6) < TOL


def test_overall_is_the_mean_of_per_area_scores():
    areas = (
        ProblemArea(id="a", k=2, conflict=ConflictMatrix.uniform(2, 1.0)),
        ProblemArea(id="b", k=2, conflict=ConflictMatrix.uniform(2, 0.0)),
    )
    world = World(
        problem_areas=areas,
        agents=(
            Agent("x", "other", (Stance(1, 1.0), Stance(1, 1.0))),
            Agent("y", "other", (Stance(2, 1.0), Stance(2, 1.0))),
        ),
    )
    report = overall_misalignment(world)
    assert report.per_area == (1.0, 0.0)
    assert report.overall == 0.5
    assert (report.n_agents, report.n_areas, report.weighted) == (2, 2, True)


def test_report_records_unweighted_flag():
    assert overall_misalignment(mutex_world([1, 2], 2), weighted=False).weighted is False


@settings(max_examples=80, derandomize=True)
@given(small_worlds())
def test_exact_scorer_matches_brute_force(world):
    for j in range(world.n_areas):
        for weighted in (True, False):
            got = area_misalignment(world, j, weighted=weighted).value
            want = brute_force_area(world, j, weighted)
            assert abs(got - want) < TOL
            assert -TOL <= got <= 1.0 + TOL


@settings(max_examples=50, derandomize=True)
@given(small_worlds(unit_weights=True, allow_null=False))
def test_weighted_equals_unweighted_at_unit_weights(world):
    for j in range(world.n_areas):
        weighted = area_misalignment(world, j, weighted=True).value
        unweighted = area_misalignment(world, j, weighted=False).value
        assert abs(weighted - unweighted) < TOL


@settings(max_examples=50, derandomize=True)
@given(small_worlds())
def test_weighted_never_exceeds_unweighted(world):
    # geometric-mean weights lie in [0, 1] and never renormalize
    for j in range(world.n_areas):
        assert (
            area_misalignment(world, j, weighted=True).value
            <= area_misalignment(world, j, weighted=False).value + TOL
        )


@settings(max_examples=50, derandomize=True)
@given(small_worlds())
def test_permuting_agents_leaves_scores_unchanged(world):
    order = list(range(world.n_agents))[::-1]
    shuffled = World(world.problem_areas, tuple(world.agents[i] for i in order))
    for j in range(world.n_areas):
        for weighted in (True, False):
            assert (
                abs(
                    area_misalignment(world, j, weighted).value
                    - area_misalignment(shuffled, j, weighted).value
                )
                < TOL
            )


@settings(max_examples=30, derandomize=True)
@given(small_worlds(max_areas=3))
def test_permuting_areas_permutes_per_area_scores(world):
    m = world.n_areas
    order = list(range(m))[::-1]
    permuted = World(
        problem_areas=tuple(world.problem_areas[j] for j in order),
        agents=tuple(
            Agent(a.id, a.kind, tuple(a.stances[j] for j in order)) for a in world.agents
        ),
    )
    original = overall_misalignment(world)
    moved = overall_misalignment(permuted)
    assert abs(original.overall - moved.overall) < TOL
    for new_j, old_j in enumerate(order):
        assert abs(moved.per_area[new_j] - original.per_area[old_j]) < TOL


@settings(max_examples=50, derandomize=True)
@given(small_worlds(max_areas=1))
def test_adding_a_null_goal_agent_only_rescales(world):
    n = world.n_agents
    before = area_misalignment(world, 0).value
    grown = World(
        world.problem_areas,
        world.agents + (Agent("agent_null", "other", (Stance(0, 1.0),)),),
    )
    after = area_misalignment(grown, 0).value
    assert abs(after - before * (n - 1) / (n + 1)) < TOL


@settings(max_examples=50, derandomize=True)
@given(small_worlds(max_areas=1))
def test_raising_a_conflict_entry_never_lowers_the_score(world):
    area = world.problem_areas[0]
    k = area.k
    entries = np.array(area.conflict.entries, copy=True)
    bumped = False
    for g in range(1, k + 1):
        for h in range(g + 1, k + 1):
            if entries[g, h] < 1.0:
                entries[g, h] = entries[h, g] = min(1.0, entries[g, h] + 0.25)
                bumped = True
                break
        if bumped:
            break
    if not bumped:
        return  # k == 1 or everything already at 1
    raised = World(
        (ProblemArea(area.id, k, ConflictMatrix(k, entries)),), world.agents
    )
    for weighted in (True, False):
        assert (
            area_misalignment(raised, 0, weighted).value
            >= area_misalignment(world, 0, weighted).value - TOL
        )


@settings(max_examples=50, derandomize=True)
@given(small_worlds(max_areas=1))
def test_raising_an_agent_weight_never_lowers_the_weighted_score(world):
    agents = list(world.agents)
    stance = agents[0].stances[0]
    raised_stance = Stance(stance.goal, min(1.0, stance.weight + 0.5))
    agents[0] = Agent(agents[0].id, agents[0].kind, (raised_stance,))
    raised = World(world.problem_areas, tuple(agents))
    assert (
        area_misalignment(raised, 0).value >= area_misalignment(world, 0).value - TOL
    )


def test_even_split_bound_examples():
    assert max_uniform_misalignment(1000, 2) == 1000 / 1998
    assert abs(max_uniform_misalignment(12, 3) - 24 / 33) < TOL
    assert max_uniform_misalignment(10, 1) == 0.0


def test_even_split_bound_matches_closed_form_where_defined():
    for k in range(1, 7):
        for n in range(k, 121, k):
            if n < 2:
                continue
            even = area_misalignment_mutex([n // k] * k).value
            assert abs(even - max_uniform_misalignment(n, k)) < TOL


def test_bound_rejections():
    with pytest.raises(ValueError):
        max_uniform_misalignment(10, 3)
    with pytest.raises(ValueError):
        max_uniform_misalignment(1, 1)
    with pytest.raises(ValueError):
        max_uniform_misalignment(10, 0)
    with pytest.raises(ValueError):
        asymptotic_bound(0)


def test_asymptote_values_and_finite_population_excess():
    assert asymptotic_bound(1) == 0.0
    assert asymptotic_bound(2) == 0.5
    assert asymptotic_bound(4) == 0.75
    for n, k in ((4, 2), (1000, 2), (102, 3), (100, 5)):
        assert max_uniform_misalignment(n, k) > asymptotic_bound(k)
