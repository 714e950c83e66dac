"""Scenario files and curve tables.

A scenario is a JSON document holding either an explicit world or a generator
spec, marked with a ``format_version`` for forward compatibility.  Parsing is
strict by default: unknown fields are rejected with their exact path, so a
typo cannot silently change an analysis.  Lenient mode downgrades unknown
fields to warnings.  Serialization is canonical (sorted keys, two-space
indent, shortest float spelling that survives a round trip), so
``parse(serialize(doc))`` reproduces the model exactly and equal models
produce byte-equal files.

Sweep results are exchanged as a small CSV table, one row per curve point::

    experiment,series,x,mean,std,runs

``series`` is the curve's ``key=value;key=value`` label, rows are sorted by
(series, x), and numbers carry 10 significant digits.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib.resources import files
from typing import Any, Sequence

from .experiments import ExperimentCurve
from .model import (
    AGENT_KINDS,
    Agent,
    ConflictMatrix,
    MisalignError,
    ProblemArea,
    Stance,
    Violation,
    World,
    validate_world,
)
from .worldgen import Presets, Randomize, Ranges, WorldSpec, WorldSpecError, check_spec, init_world

FORMAT_VERSION = 1

BUNDLED_SCENARIOS = ("shopping", "carla")

CURVES_CSV_HEADER = ("experiment", "series", "x", "mean", "std", "runs")


class ScenarioError(MisalignError):
    """Base class for scenario file problems."""


class ScenarioSyntaxError(ScenarioError):
    """The file is not JSON; carries the position of the first defect."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class ScenarioSchemaError(ScenarioError):
    """The JSON shape is wrong; carries the path of the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class ScenarioSemanticError(ScenarioError):
    """The document parses but describes an invalid world or spec."""

    def __init__(self, violations: Sequence[Violation]):
        super().__init__("; ".join(str(v) for v in violations))
        self.violations = tuple(violations)


@dataclass(frozen=True)
class ScenarioDocument:
    """A parsed scenario: exactly one of ``world`` or ``spec`` is set."""

    format_version: int = FORMAT_VERSION
    world: World | None = None
    spec: WorldSpec | None = None
    warnings: tuple[str, ...] = ()

    def materialize(self) -> World:
        """The explicit world, generating one first if this is a spec document."""
        if self.world is not None:
            return self.world
        assert self.spec is not None
        return init_world(self.spec)


class _Parser:
    def __init__(self, lenient: bool):
        self.lenient = lenient
        self.warnings: list[str] = []

    def fail(self, path: str, message: str) -> "ScenarioSchemaError":
        return ScenarioSchemaError(path, message)

    def check_keys(self, obj: dict, allowed: set[str], path: str) -> None:
        for key in obj:
            if key not in allowed:
                if self.lenient:
                    self.warnings.append(f"{path}.{key}: unknown field ignored")
                else:
                    raise self.fail(f"{path}.{key}", "unknown field")

    def obj(self, value: Any, path: str) -> dict:
        if not isinstance(value, dict):
            raise self.fail(path, f"expected an object, got {type(value).__name__}")
        return value

    def arr(self, value: Any, path: str) -> list:
        if not isinstance(value, list):
            raise self.fail(path, f"expected an array, got {type(value).__name__}")
        return value

    def require(self, obj: dict, key: str, path: str) -> Any:
        if key not in obj:
            raise self.fail(f"{path}.{key}", "required field is missing")
        return obj[key]

    def string(self, value: Any, path: str) -> str:
        if not isinstance(value, str):
            raise self.fail(path, f"expected a string, got {type(value).__name__}")
        return value

    def integer(self, value: Any, path: str) -> int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise self.fail(path, f"expected an integer, got {type(value).__name__}")
        return value

    def number(self, value: Any, path: str) -> float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise self.fail(path, f"expected a number, got {type(value).__name__}")
        return float(value)

    def boolean(self, value: Any, path: str) -> bool:
        if not isinstance(value, bool):
            raise self.fail(path, f"expected a boolean, got {type(value).__name__}")
        return value

    def pair(self, value: Any, path: str) -> tuple[float, float]:
        row = self.arr(value, path)
        if len(row) != 2:
            raise self.fail(path, f"expected [min, max], got {len(row)} entries")
        return self.number(row[0], f"{path}[0]"), self.number(row[1], f"{path}[1]")

    def parse_area(self, value: Any, path: str) -> ProblemArea:
        obj = self.obj(value, path)
        self.check_keys(obj, {"id", "k", "goals", "conflict"}, path)
        area_id = self.string(self.require(obj, "id", path), f"{path}.id")
        k = self.integer(self.require(obj, "k", path), f"{path}.k")
        if k < 1:
            raise self.fail(f"{path}.k", f"must be >= 1, got {k}")
        labels = None
        if "goals" in obj:
            rows = self.arr(obj["goals"], f"{path}.goals")
            if len(rows) != k:
                raise self.fail(f"{path}.goals", f"expected {k} labels, got {len(rows)}")
            labels = tuple(self.string(v, f"{path}.goals[{i}]") for i, v in enumerate(rows))
        rows = self.arr(self.require(obj, "conflict", path), f"{path}.conflict")
        lower = []
        for i, row in enumerate(rows):
            row = self.arr(row, f"{path}.conflict[{i}]")
            lower.append([self.number(v, f"{path}.conflict[{i}][{j}]") for j, v in enumerate(row)])
        try:
            conflict = ConflictMatrix.from_lower(k, lower)
        except ValueError as e:
            raise self.fail(f"{path}.conflict", str(e)) from e
        return ProblemArea(id=area_id, k=k, conflict=conflict, goal_labels=labels)

    def parse_agent(self, value: Any, path: str, n_areas: int) -> Agent:
        obj = self.obj(value, path)
        self.check_keys(obj, {"id", "kind", "stances"}, path)
        agent_id = self.string(self.require(obj, "id", path), f"{path}.id")
        kind = self.string(self.require(obj, "kind", path), f"{path}.kind")
        if kind not in AGENT_KINDS:
            raise self.fail(f"{path}.kind", f"expected one of {AGENT_KINDS}, got {kind!r}")
        rows = self.arr(self.require(obj, "stances", path), f"{path}.stances")
        if len(rows) != n_areas:
            raise self.fail(f"{path}.stances", f"expected one stance per area ({n_areas}), got {len(rows)}")
        stances = []
        for j, row in enumerate(rows):
            spath = f"{path}.stances[{j}]"
            row = self.obj(row, spath)
            self.check_keys(row, {"goal", "weight"}, spath)
            stances.append(
                Stance(
                    goal=self.integer(self.require(row, "goal", spath), f"{spath}.goal"),
                    weight=self.number(self.require(row, "weight", spath), f"{spath}.weight"),
                )
            )
        return Agent(id=agent_id, kind=kind, stances=tuple(stances))

    def parse_world(self, value: Any, path: str) -> World:
        obj = self.obj(value, path)
        self.check_keys(obj, {"problem_areas", "agents"}, path)
        areas = [
            self.parse_area(v, f"{path}.problem_areas[{j}]")
            for j, v in enumerate(self.arr(self.require(obj, "problem_areas", path), f"{path}.problem_areas"))
        ]
        agents = [
            self.parse_agent(v, f"{path}.agents[{i}]", len(areas))
            for i, v in enumerate(self.arr(self.require(obj, "agents", path), f"{path}.agents"))
        ]
        return World(problem_areas=tuple(areas), agents=tuple(agents))

    def parse_spec(self, value: Any, path: str) -> WorldSpec:
        obj = self.obj(value, path)
        allowed = {"agents", "goals_per_area", "randomize", "ranges", "presets", "allow_null_goals", "seed"}
        self.check_keys(obj, allowed, path)
        n_agents = self.integer(self.require(obj, "agents", path), f"{path}.agents")
        shape = self.arr(self.require(obj, "goals_per_area", path), f"{path}.goals_per_area")
        goals_per_area = tuple(
            self.integer(v, f"{path}.goals_per_area[{j}]") for j, v in enumerate(shape)
        )

        randomize = Randomize()
        if "randomize" in obj:
            rpath = f"{path}.randomize"
            robj = self.obj(obj["randomize"], rpath)
            self.check_keys(robj, {"conflict", "goals", "weights"}, rpath)
            randomize = Randomize(
                conflict=self.boolean(robj["conflict"], f"{rpath}.conflict") if "conflict" in robj else True,
                goals=self.boolean(robj["goals"], f"{rpath}.goals") if "goals" in robj else True,
                weights=self.boolean(robj["weights"], f"{rpath}.weights") if "weights" in robj else True,
            )

        ranges = Ranges()
        if "ranges" in obj:
            rpath = f"{path}.ranges"
            robj = self.obj(obj["ranges"], rpath)
            self.check_keys(robj, {"conflict", "weights"}, rpath)
            ranges = Ranges(
                conflict=self.pair(robj["conflict"], f"{rpath}.conflict") if "conflict" in robj else (0.0, 1.0),
                weights=self.pair(robj["weights"], f"{rpath}.weights") if "weights" in robj else (0.0, 1.0),
            )

        presets = Presets()
        if "presets" in obj:
            ppath = f"{path}.presets"
            pobj = self.obj(obj["presets"], ppath)
            self.check_keys(pobj, {"conflict", "goals", "weights"}, ppath)
            conflict = goals = weights = None
            if "conflict" in pobj:
                conflict = tuple(
                    tuple(
                        tuple(self.number(v, f"{ppath}.conflict[{a}][{g}][{h}]") for h, v in enumerate(self.arr(row, f"{ppath}.conflict[{a}][{g}]")))
                        for g, row in enumerate(self.arr(table, f"{ppath}.conflict[{a}]"))
                    )
                    for a, table in enumerate(self.arr(pobj["conflict"], f"{ppath}.conflict"))
                )
            if "goals" in pobj:
                goals = tuple(
                    tuple(self.integer(v, f"{ppath}.goals[{i}][{j}]") for j, v in enumerate(self.arr(row, f"{ppath}.goals[{i}]")))
                    for i, row in enumerate(self.arr(pobj["goals"], f"{ppath}.goals"))
                )
            if "weights" in pobj:
                weights = tuple(
                    tuple(self.number(v, f"{ppath}.weights[{i}][{j}]") for j, v in enumerate(self.arr(row, f"{ppath}.weights[{i}]")))
                    for i, row in enumerate(self.arr(pobj["weights"], f"{ppath}.weights"))
                )
            presets = Presets(conflict=conflict, goals=goals, weights=weights)

        allow_null = self.boolean(obj["allow_null_goals"], f"{path}.allow_null_goals") if "allow_null_goals" in obj else False
        seed = self.integer(obj["seed"], f"{path}.seed") if "seed" in obj else 0
        return WorldSpec(
            n_agents=n_agents,
            goals_per_area=goals_per_area,
            randomize=randomize,
            ranges=ranges,
            presets=presets,
            allow_null_goals=allow_null,
            seed=seed,
        )


def parse_scenario(text: str, lenient: bool = False) -> ScenarioDocument:
    """Parse and fully check a scenario document.

    Raises :class:`ScenarioSyntaxError` for malformed JSON,
    :class:`ScenarioSchemaError` for shape problems (with the field's path),
    and :class:`ScenarioSemanticError` when the described world or spec breaks
    a structural invariant.  Scoring-precondition warnings do not block.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioSyntaxError(e.msg, e.lineno, e.colno) from e

    p = _Parser(lenient)
    obj = p.obj(data, "$")
    p.check_keys(obj, {"format_version", "world", "world_spec"}, "$")
    version = p.integer(p.require(obj, "format_version", "$"), "$.format_version")
    if version != FORMAT_VERSION:
        raise p.fail("$.format_version", f"unsupported version {version}, expected {FORMAT_VERSION}")
    has_world = "world" in obj
    has_spec = "world_spec" in obj
    if has_world == has_spec:
        raise p.fail("$", "exactly one of 'world' or 'world_spec' is required")

    if has_world:
        world = p.parse_world(obj["world"], "$.world")
        errors = [v for v in validate_world(world) if v.severity == "error"]
        if errors:
            raise ScenarioSemanticError(errors)
        return ScenarioDocument(format_version=version, world=world, warnings=tuple(p.warnings))

    spec = p.parse_spec(obj["world_spec"], "$.world_spec")
    try:
        check_spec(spec)
    except WorldSpecError as e:
        raise ScenarioSemanticError(
            [Violation(kind="world_spec", path="$.world_spec", message=str(e))]
        ) from e
    return ScenarioDocument(format_version=version, spec=spec, warnings=tuple(p.warnings))


def _world_payload(world: World) -> dict:
    areas = []
    for pa in world.problem_areas:
        area: dict[str, Any] = {"id": pa.id, "k": pa.k, "conflict": pa.conflict.lower_rows()}
        if pa.goal_labels is not None:
            area["goals"] = list(pa.goal_labels)
        areas.append(area)
    agents = [
        {
            "id": agent.id,
            "kind": agent.kind,
            "stances": [{"goal": s.goal, "weight": float(s.weight)} for s in agent.stances],
        }
        for agent in world.agents
    ]
    return {"problem_areas": areas, "agents": agents}


def _spec_payload(spec: WorldSpec) -> dict:
    payload: dict[str, Any] = {
        "agents": spec.n_agents,
        "goals_per_area": list(spec.goals_per_area),
        "randomize": {
            "conflict": spec.randomize.conflict,
            "goals": spec.randomize.goals,
            "weights": spec.randomize.weights,
        },
        "ranges": {
            "conflict": [float(v) for v in spec.ranges.conflict],
            "weights": [float(v) for v in spec.ranges.weights],
        },
        "allow_null_goals": spec.allow_null_goals,
        "seed": spec.seed,
    }
    presets = {}
    if spec.presets.conflict is not None:
        presets["conflict"] = [[[float(v) for v in row] for row in table] for table in spec.presets.conflict]
    if spec.presets.goals is not None:
        presets["goals"] = [[int(v) for v in row] for row in spec.presets.goals]
    if spec.presets.weights is not None:
        presets["weights"] = [[float(v) for v in row] for row in spec.presets.weights]
    if presets:
        payload["presets"] = presets
    return payload


def serialize_scenario(doc: ScenarioDocument) -> str:
    """Render a document in canonical form; inverse of :func:`parse_scenario`."""
    if (doc.world is None) == (doc.spec is None):
        raise ValueError("a scenario document holds exactly one of world or spec")
    payload: dict[str, Any] = {"format_version": doc.format_version}
    if doc.world is not None:
        payload["world"] = _world_payload(doc.world)
    else:
        payload["world_spec"] = _spec_payload(doc.spec)
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def format_number(value: float) -> str:
    """10-significant-digit decimal used in curve tables."""
    return f"{float(value):.10g}"


def write_curves_csv(curves: Sequence[ExperimentCurve]) -> str:
    """Render curves as the stable CSV exchange table."""
    rows = []
    for curve in curves:
        label = curve.series_label
        for pt in curve.points:
            rows.append((curve.experiment, label, pt.x, pt.mean, pt.std, pt.runs))
    rows.sort(key=lambda row: (row[1], row[2]))
    lines = [",".join(CURVES_CSV_HEADER)]
    for experiment, label, x, mean, std, runs in rows:
        lines.append(
            f"{experiment},{label},{format_number(x)},{format_number(mean)},{format_number(std)},{runs}"
        )
    return "\n".join(lines) + "\n"


def bundled_scenario_text(name: str) -> str:
    """Raw text of a scenario shipped with the package."""
    if name not in BUNDLED_SCENARIOS:
        raise ValueError(f"unknown bundled scenario {name!r}, expected one of {BUNDLED_SCENARIOS}")
    return files("misalign.data").joinpath(f"{name}.json").read_text(encoding="utf-8")


def load_bundled_scenario(name: str) -> ScenarioDocument:
    return parse_scenario(bundled_scenario_text(name))
