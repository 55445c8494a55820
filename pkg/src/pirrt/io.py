"""Scenario files, trace files, graph snapshots and SVG tree frames."""

from __future__ import annotations

import csv
import json
import math
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, Optional, Union
from xml.sax.saxutils import quoteattr

import jsonschema

from pirrt.dp import PolicyState
from pirrt.errors import InvalidInputError, ScenarioError
from pirrt.geometry import Ball, Box, Environment, Shape
from pirrt.graph import Graph
from pirrt.planners import PlannerConfig, IterationTrace

PathLike = Union[str, Path]

TRACE_COLUMNS = ("iter", "J_init", "n_vertices", "n_edges", "sweeps", "t_plan_ns", "t_nonplan_ns")

_coords = {"type": "array", "items": {"type": "number"}, "minItems": 2}
_shape = {
    "oneOf": [
        {"type": "object", "required": ["type", "min", "max"], "additionalProperties": False,
         "properties": {"type": {"const": "box"}, "min": _coords, "max": _coords}},
        {"type": "object", "required": ["type", "center", "radius"], "additionalProperties": False,
         "properties": {"type": {"const": "ball"}, "center": _coords,
                        "radius": {"type": "number", "exclusiveMinimum": 0}}},
    ]
}
SCENARIO_SCHEMA = {
    "type": "object",
    "required": ["bounds", "goal", "x_init"],
    "properties": {
        "name": {"type": "string"},
        "description": {"type": "string"},
        "bounds": {"type": "object", "required": ["min", "max"], "additionalProperties": False,
                   "properties": {"min": _coords, "max": _coords}},
        "obstacles": {"type": "array", "items": _shape},
        "goal": _shape,
        "x_init": _coords,
        "defaults": {
            "type": "object", "additionalProperties": False,
            "properties": {
                "iterations": {"type": "integer", "minimum": 1},
                "seed": {"type": "integer"},
                "eta": {"type": "number", "exclusiveMinimum": 0},
                "gamma": {"type": ["number", "null"], "exclusiveMinimum": 0},
                "eps": {"type": "number", "minimum": 0},
                "workers": {"type": "integer", "minimum": 1},
            },
        },
    },
}

SHIPPED_SCENARIOS = ("sparse", "cluttered")


def _key_path(parts: Iterable[Any]) -> str:
    out = ""
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else (f".{p}" if out else str(p))
    return out


def _shape_from(item: dict, path: str, dim: int) -> Shape:
    if item["type"] == "box":
        for key in ("min", "max"):
            if len(item[key]) != dim:
                raise ScenarioError(f"dimension mismatch: expected {dim} coordinates", f"{path}.{key}")
        try:
            return Box(tuple(item["min"]), tuple(item["max"]))
        except InvalidInputError as exc:
            raise ScenarioError(str(exc), path) from exc
    if len(item["center"]) != dim:
        raise ScenarioError(f"dimension mismatch: expected {dim} coordinates", f"{path}.center")
    return Ball(tuple(item["center"]), item["radius"])


def scenario_path(name_or_path: PathLike) -> Path:
    """Resolve a shipped scenario name (``sparse``, ``cluttered``) or a file path."""
    if str(name_or_path) in SHIPPED_SCENARIOS:
        return Path(str(resources.files("pirrt") / "scenarios" / f"{name_or_path}.json"))
    return Path(name_or_path)


def parse_scenario(data: Any, overrides: Optional[dict] = None) -> tuple[Environment, PlannerConfig]:
    try:
        jsonschema.validate(data, SCENARIO_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ScenarioError(exc.message, _key_path(exc.absolute_path)) from None

    dim = len(data["bounds"]["min"])
    if len(data["bounds"]["max"]) != dim:
        raise ScenarioError(f"dimension mismatch: expected {dim} coordinates", "bounds.max")
    if len(data["x_init"]) != dim:
        raise ScenarioError(f"dimension mismatch: expected {dim} coordinates", "x_init")
    try:
        bounds = Box(tuple(data["bounds"]["min"]), tuple(data["bounds"]["max"]))
    except InvalidInputError as exc:
        raise ScenarioError(str(exc), "bounds") from exc
    obstacles = [_shape_from(o, f"obstacles[{i}]", dim) for i, o in enumerate(data.get("obstacles", []))]
    goal = _shape_from(data["goal"], "goal", dim)
    try:
        env = Environment(bounds, obstacles, goal, tuple(data["x_init"]))
    except InvalidInputError as exc:
        raise ScenarioError(str(exc), exc.field) from exc

    settings = dict(data.get("defaults", {}))
    settings.update({k: v for k, v in (overrides or {}).items() if v is not None})
    try:
        cfg = PlannerConfig(**settings)
    except InvalidInputError as exc:
        raise ScenarioError(str(exc), f"defaults.{exc.field}") from exc
    except TypeError as exc:
        raise ScenarioError(str(exc), "defaults") from exc
    return env, cfg


def load_scenario(path: PathLike, overrides: Optional[dict] = None) -> tuple[Environment, PlannerConfig]:
    """Read and validate a scenario file; ``overrides`` (non-None values) beat file defaults."""
    path = scenario_path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario: {exc.strerror}", str(path)) from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return parse_scenario(data, overrides)


def format_real(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def write_trace(traces: Iterable[IterationTrace], path: PathLike, timing: bool = True) -> None:
    """Write the per-iteration trace as CSV; timing columns are zeroed when ``timing`` is off."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_COLUMNS)
        for t in traces:
            w.writerow([t.iter, format_real(t.J_init), t.n_vertices, t.n_edges, t.sweeps,
                        t.t_plan if timing else 0, t.t_nonplan if timing else 0])


def read_trace(path: PathLike) -> list[IterationTrace]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != TRACE_COLUMNS:
        raise InvalidInputError(f"{path}: not a trace file (bad header)")
    return [IterationTrace(int(r[0]), float(r[1]), int(r[2]), int(r[3]), int(r[4]), int(r[5]), int(r[6]))
            for r in rows[1:]]


def snapshot_dict(g: Graph, ps: PolicyState, promising: Iterable[int]) -> dict:
    data = g.to_dict()
    data["parent"] = [p if p is not None else -1 for p in ps.parent]
    data["J"] = [format_real(j) for j in ps.J]
    data["J_init"] = format_real(ps.J_init)
    data["promising"] = sorted(promising)
    return data


def write_snapshot(g: Graph, ps: PolicyState, promising: Iterable[int], path: PathLike) -> None:
    """Graph plus parent map and promising set as a JSON document."""
    Path(path).write_text(json.dumps(snapshot_dict(g, ps, promising)), encoding="utf-8")


def read_snapshot(path: PathLike) -> tuple[Graph, PolicyState, list[int]]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    g = Graph.from_dict(data)
    ps = PolicyState()
    for v, (p, j) in enumerate(zip(data["parent"], data["J"])):
        par = None if p < 0 else p
        ps.add_vertex(float(j), par, g.edge_cost_between(v, par) if par is not None else math.inf)
    ps.J_init = float(data["J_init"])
    return g, ps, list(data["promising"])


# red obstacles, yellow start and path,
# dark-blue goal, gray tree, magenta promising vertices
_COLORS = {"obstacle": "#d62728", "path": "#ffd700", "start": "#ffd700", "goal": "#00008b",
           "tree": "#9a9a9a", "promising": "#ff00ff", "goal_region": "#6495ed"}


def emit_tree_svg(g: Graph, ps: PolicyState, promising: Iterable[int], env: Environment, path: PathLike,
                  size: int = 600) -> None:
    """Draw the policy tree over the first two coordinates as an SVG file."""
    lo, hi = env.bounds.lo, env.bounds.hi
    span = max(hi[0] - lo[0], hi[1] - lo[1])
    scale = size / span
    width = (hi[0] - lo[0]) * scale
    height = (hi[1] - lo[1]) * scale

    def X(p):
        return (p[0] - lo[0]) * scale

    def Y(p):
        return height - (p[1] - lo[1]) * scale

    def f(v: float) -> str:
        return f"{v:.3f}"

    def shape_el(s: Shape, fill: str, extra: str = "") -> str:
        if isinstance(s, Box):
            return (f'<rect x="{f(X(s.lo))}" y="{f(Y((0, s.hi[1])))}" width="{f((s.hi[0] - s.lo[0]) * scale)}" '
                    f'height="{f((s.hi[1] - s.lo[1]) * scale)}" fill="{fill}" {extra}/>')
        return f'<circle cx="{f(X(s.center))}" cy="{f(Y(s.center))}" r="{f(s.radius * scale)}" fill="{fill}" {extra}/>'

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{f(width)}" height="{f(height)}" '
           f'viewBox="0 0 {f(width)} {f(height)}">',
           f'<title>{len(g)} vertices, J_init={quoteattr(format_real(ps.J_init))[1:-1]}</title>',
           f'<rect x="0" y="0" width="{f(width)}" height="{f(height)}" fill="white" stroke="black"/>']
    for obs in env.obstacles:
        out.append(shape_el(obs, _COLORS["obstacle"]))
    out.append(shape_el(env.goal, "none", f'stroke="{_COLORS["goal_region"]}" stroke-width="1.5"'))

    out.append(f'<g stroke="{_COLORS["tree"]}" stroke-width="0.6">')
    for v, p in enumerate(ps.parent):
        if p is not None:
            a, b = g.points[v], g.points[p]
            out.append(f'<line x1="{f(X(a))}" y1="{f(Y(a))}" x2="{f(X(b))}" y2="{f(Y(b))}"/>')
    out.append("</g>")

    if g.init_id is not None and math.isfinite(ps.J_init):
        chain = ps.path_to_goal(g, g.init_id)
        if chain:
            pts = " ".join(f"{f(X(g.points[v]))},{f(Y(g.points[v]))}" for v in chain)
            out.append(f'<polyline points="{pts}" fill="none" stroke="{_COLORS["path"]}" stroke-width="3"/>')

    out.append(f'<g fill="{_COLORS["promising"]}">')
    for v in sorted(promising):
        p = g.points[v]
        out.append(f'<circle cx="{f(X(p))}" cy="{f(Y(p))}" r="2"/>')
    out.append("</g>")

    half = 6
    for p, color in ((env.x_init, _COLORS["start"]), (env.goal_point, _COLORS["goal"])):
        out.append(f'<rect x="{f(X(p) - half)}" y="{f(Y(p) - half)}" width="{2 * half}" height="{2 * half}" '
                   f'fill="{color}" stroke="black"/>')
    out.append("</svg>")
    Path(path).write_text("\n".join(out) + "\n", encoding="utf-8")
