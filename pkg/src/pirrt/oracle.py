"""Ground-truth shortest paths for testing and instrumenting the planners.

Nothing in here is consulted by the planners themselves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from pirrt.graph import Graph

TIGHT_RTOL = 1e-12
MATCH_TOL = 1e-9


@dataclass(frozen=True)
class OracleSolution:
    """Optimal cost-to-go, minimal optimal hop counts and promising sets of one graph.

    ``prom`` holds vertices whose optimal cost is below x_init's; ``focused``
    additionally counts the straight-line distance from x_init, i.e.
    ``h(x_init, x) + J*(x) < J*(x_init)``. Without x_init in the graph its
    optimal cost is taken as infinite.
    """

    J_star: np.ndarray
    hops: np.ndarray
    prom: frozenset[int]
    focused: frozenset[int]
    goals: tuple[int, ...]
    init_id: int | None

    @property
    def J_init(self) -> float:
        return float(self.J_star[self.init_id]) if self.init_id is not None else math.inf


def dijkstra_to_goal(g: Graph) -> OracleSolution:
    n = len(g)
    goals = tuple(g.goal_ids())
    src = np.asarray(g.edge_src, dtype=np.int64)
    dst = np.asarray(g.edge_dst, dtype=np.int64)
    cost = np.asarray(g.edge_cost, dtype=float)
    if src.size:
        # reversed edges: search outward from the goal set
        rev = csr_matrix((cost, (dst, src)), shape=(n, n))
        J = np.asarray(dijkstra(rev, directed=True, indices=list(goals), min_only=True), dtype=float)
    else:
        J = np.full(n, math.inf)
        J[list(goals)] = 0.0

    hops = np.full(n, math.inf)
    hops[list(goals)] = 0.0
    if src.size:
        Js, Jd = J[src], J[dst]
        finite = np.isfinite(Js) & np.isfinite(Jd)
        tight = finite & (Jd + cost <= Js + TIGHT_RTOL * np.maximum(1.0, Js))
        ts, td = src[tight], dst[tight]
        # tight successors have strictly smaller J*, so this settles in max-hop rounds
        while True:
            new = hops.copy()
            np.minimum.at(new, ts, hops[td] + 1.0)
            if np.array_equal(new, hops):
                break
            hops = new

    init = g.init_id
    J_init = J[init] if init is not None else math.inf
    prom = frozenset(np.flatnonzero(J < J_init).tolist())
    if init is not None:
        xi = np.asarray(g.points[init])
        h = np.sqrt(((g.coords - xi) ** 2).sum(axis=1))
        focused = frozenset(np.flatnonzero(h + J < J_init).tolist())
    else:
        focused = prom
    return OracleSolution(J, hops, prom, focused, goals, init)


def nbar(sol: OracleSolution, members: Sequence[int] | frozenset[int] | None = None) -> int:
    """Largest minimal optimal hop count over the promising vertices (0 if none)."""
    members = sol.prom if members is None else members
    finite = [sol.hops[x] for x in members if math.isfinite(sol.hops[x])]
    return int(max(finite)) if finite else 0


def optimal_set(sol: OracleSolution, costs: Sequence[float], members: frozenset[int] | None = None,
                tol: float = MATCH_TOL) -> frozenset[int]:
    """Promising vertices whose cost under ``costs`` matches the optimum within ``tol``.

    ``costs`` is normally the true policy cost (``PolicyState.policy_costs``)
    but the stored cost-to-go works as well.
    """
    members = sol.prom if members is None else members
    return frozenset(x for x in members if abs(costs[x] - sol.J_star[x]) <= tol)
