"""Incrementally grown random geometric graph with r-disc neighbour queries."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from pirrt.errors import DuplicateEdgeError, DuplicateVertexError, GraphStateError, InvalidInputError
from pirrt.geometry import Environment, Point, unit_ball_volume

# relative slack for the vectorised prefilter; the final decision uses math.dist
_PREFILTER_SLACK = 1e-9


@dataclass(frozen=True)
class RadiusParams:
    gamma: float
    eta: float
    d: int

    def __post_init__(self):
        if not (self.gamma > 0 and self.eta > 0):
            raise InvalidInputError("gamma and eta must be positive")
        if self.d < 2:
            raise InvalidInputError("dimension must be at least 2")


def default_gamma(env: Environment) -> float:
    """Connection constant comfortably above the connectivity threshold.

    Uses the bounding-box measure as a stand-in for the free-space measure,
    which over-approximates it.
    """
    d = env.dim
    return 2.0 * (1.0 + 1.0 / d) ** (1.0 / d) * (env.bounds.measure / unit_ball_volume(d)) ** (1.0 / d)


def connection_radius(params: RadiusParams, n: int) -> float:
    """Shrinking r-disc radius ``min(gamma * (log n / n)^(1/d), eta)``."""
    if n < 1:
        raise InvalidInputError(f"n must be >= 1, got {n}")
    r = params.gamma * (math.log(max(n, 2)) / n) ** (1.0 / params.d)
    return min(r, params.eta)


class Graph:
    """Directed graph over points in R^d with Euclidean edge costs.

    Vertex ids are dense and assigned in insertion order. Adjacency is kept
    as parallel id/cost lists per vertex in both directions.
    """

    def __init__(self, dim: int):
        if dim < 2:
            raise InvalidInputError("dimension must be at least 2")
        self.dim = dim
        self.points: list[Point] = []
        self.succ: list[list[int]] = []
        self.succ_cost: list[list[float]] = []
        self.pred: list[list[int]] = []
        self.pred_cost: list[list[float]] = []
        self.is_goal: list[bool] = []
        self.goal_id: Optional[int] = None
        self.init_id: Optional[int] = None
        self._coords = np.empty((64, dim))
        self._index: dict[Point, int] = {}
        self._edge_set: set[tuple[int, int]] = set()
        # flat edge log, handy for vectorised consumers (oracle, export)
        self.edge_src: list[int] = []
        self.edge_dst: list[int] = []
        self.edge_cost: list[float] = []

    def __len__(self) -> int:
        return len(self.points)

    @property
    def n_edges(self) -> int:
        return len(self.edge_src)

    @property
    def coords(self) -> np.ndarray:
        return self._coords[: len(self.points)]

    def goal_ids(self) -> list[int]:
        return [v for v, g in enumerate(self.is_goal) if g]

    def has_point(self, p: Point) -> bool:
        return tuple(p) in self._index

    def has_edge(self, a: int, b: int) -> bool:
        return (a, b) in self._edge_set

    def insert_vertex(self, p: Point, goal: bool = False) -> int:
        p = tuple(p)
        if len(p) != self.dim:
            raise InvalidInputError(f"point has dimension {len(p)}, graph has {self.dim}")
        if p in self._index:
            raise DuplicateVertexError(f"vertex {p} already present as id {self._index[p]}")
        vid = len(self.points)
        if vid == self._coords.shape[0]:
            grown = np.empty((2 * vid, self.dim))
            grown[:vid] = self._coords
            self._coords = grown
        self._coords[vid] = p
        self.points.append(p)
        self._index[p] = vid
        self.succ.append([])
        self.succ_cost.append([])
        self.pred.append([])
        self.pred_cost.append([])
        self.is_goal.append(goal)
        if goal and self.goal_id is None:
            self.goal_id = vid
        return vid

    def insert_edge_pair(self, a: int, b: int) -> float:
        """Insert ``(a, b)`` and ``(b, a)`` with cost ``distance(a, b)``; returns the cost."""
        if a == b:
            raise DuplicateEdgeError(f"self-loop on vertex {a}")
        n = len(self.points)
        if not (0 <= a < n and 0 <= b < n):
            raise InvalidInputError(f"edge ({a}, {b}) references a missing vertex")
        if (a, b) in self._edge_set or (b, a) in self._edge_set:
            raise DuplicateEdgeError(f"edge pair ({a}, {b}) already present")
        c = math.dist(self.points[a], self.points[b])
        for x, y in ((a, b), (b, a)):
            self._edge_set.add((x, y))
            self.succ[x].append(y)
            self.succ_cost[x].append(c)
            self.pred[y].append(x)
            self.pred_cost[y].append(c)
            self.edge_src.append(x)
            self.edge_dst.append(y)
            self.edge_cost.append(c)
        return c

    def edge_cost_between(self, a: int, b: int) -> float:
        return self.succ_cost[a][self.succ[a].index(b)]

    def edges(self) -> Iterator[tuple[int, int, float]]:
        return zip(self.edge_src, self.edge_dst, self.edge_cost)

    def to_dict(self) -> dict:
        """Snapshot suitable for JSON export."""
        return {
            "dim": self.dim,
            "goal_id": self.goal_id,
            "init_id": self.init_id,
            "vertices": [{"id": v, "coords": list(p), "goal": g}
                         for v, (p, g) in enumerate(zip(self.points, self.is_goal))],
            "edges": [{"from": a, "to": b, "cost": c} for a, b, c in self.edges()],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Graph":
        g = cls(int(data["dim"]))
        for v in data["vertices"]:
            g.insert_vertex(tuple(v["coords"]), goal=bool(v.get("goal", False)))
        seen = set()
        for e in data["edges"]:
            a, b = e["from"], e["to"]
            if (b, a) in seen:
                continue
            seen.add((a, b))
            g.insert_edge_pair(a, b)
        g.goal_id = data["goal_id"]
        g.init_id = data["init_id"]
        return g


def nearest(g: Graph, p: Point) -> int:
    """Vertex closest to ``p``; ties go to the smallest id."""
    if len(g) == 0:
        raise GraphStateError("nearest() on an empty graph")
    d2 = ((g.coords - np.asarray(p)) ** 2).sum(axis=1)
    best = float(d2.min())
    cand = np.flatnonzero(d2 <= best * (1 + _PREFILTER_SLACK) + 1e-300)
    best_v, best_d = -1, math.inf
    for v in cand.tolist():
        dv = math.dist(g.points[v], p)
        if dv < best_d:
            best_v, best_d = v, dv
    return best_v


def near_radius(g: Graph, p: Point, r: float) -> list[int]:
    """Vertices strictly closer than ``r`` to ``p`` (excluding ``p`` itself), ascending id."""
    if len(g) == 0:
        return []
    d2 = ((g.coords - np.asarray(p)) ** 2).sum(axis=1)
    cand = np.flatnonzero(d2 < (r * (1 + _PREFILTER_SLACK)) ** 2)
    out = []
    for v in cand.tolist():
        dv = math.dist(g.points[v], p)
        if 0.0 < dv < r:
            out.append(v)
    return out


def near(g: Graph, p: Point, n: int, params: RadiusParams) -> list[int]:
    return near_radius(g, p, connection_radius(params, n))


def save_graph(g: Graph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(g.to_dict(), fh, indent=1)
