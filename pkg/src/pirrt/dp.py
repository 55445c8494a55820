"""Dynamic-programming engine over the planner graph.

Holds the policy (parent pointers plus cost-to-go), the Bellman backup, the
restricted policy-improvement sweep, tree-structured policy evaluation, the
Replan loop built from them, and the Gauss-Seidel value-iteration relaxation
used by the baseline planner.
"""

from __future__ import annotations

import heapq
import math
from collections import deque
from concurrent.futures import Executor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Optional

from pirrt.errors import ContractViolation, CycleDetectedError, NonterminationError
from pirrt.geometry import Environment
from pirrt.graph import Graph

INF = math.inf
DEFAULT_EPS = 1e-12


@dataclass
class PolicyState:
    """Per-vertex parent (successor toward the goal) and cost-to-go.

    ``parent_cost[x]`` caches the cost of the edge ``(x, parent[x])``.
    Goal vertices have no parent and ``J == 0``.
    """

    J: list[float] = field(default_factory=list)
    parent: list[Optional[int]] = field(default_factory=list)
    parent_cost: list[float] = field(default_factory=list)
    J_init: float = INF

    def add_vertex(self, J: float = INF, parent: Optional[int] = None, cost: float = INF) -> None:
        self.J.append(J)
        self.parent.append(parent)
        self.parent_cost.append(cost)

    def set_parent(self, x: int, parent: Optional[int], cost: float, J: float) -> None:
        self.parent[x] = parent
        self.parent_cost[x] = cost
        self.J[x] = J

    def path_to_goal(self, g: Graph, x: int) -> Optional[list[int]]:
        """Vertices visited by following parents from ``x``; None if the chain breaks or loops."""
        path = [x]
        while not g.is_goal[x]:
            x = self.parent[x]
            if x is None or len(path) > len(g):
                return None
            path.append(x)
        return path

    def policy_cost(self, g: Graph, x: int) -> float:
        """True cost of executing the policy from ``x``, summed from the goal end."""
        path = self.path_to_goal(g, x)
        if path is None:
            return INF
        total = 0.0
        for v in reversed(path[:-1]):
            total = self.parent_cost[v] + total
        return total

    def policy_costs(self, g: Graph) -> list[float]:
        """True policy cost of every vertex, by one pass down the parent tree."""
        n = len(g)
        out = [INF] * n
        children: list[list[int]] = [[] for _ in range(n)]
        for v in range(n):
            p = self.parent[v]
            if p is not None and not g.is_goal[v]:
                children[p].append(v)
        q = deque(v for v in range(n) if g.is_goal[v])
        for v in q:
            out[v] = 0.0
        while q:
            x = q.popleft()
            for s in children[x]:
                out[s] = self.parent_cost[s] + out[x]
                q.append(s)
        return out


class PromisingSet:
    """Set of vertex ids that iterates in ascending id order."""

    __slots__ = ("_members",)

    def __init__(self, members: Iterable[int] = ()):
        self._members = set(members)

    def add(self, v: int) -> None:
        self._members.add(v)

    def update(self, other: Iterable[int]) -> None:
        self._members.update(other)

    def __contains__(self, v: object) -> bool:
        return v in self._members

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self._members))

    def __len__(self) -> int:
        return len(self._members)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, PromisingSet):
            return self._members == other._members
        return NotImplemented

    def __repr__(self) -> str:
        return f"PromisingSet({sorted(self._members)})"

    def as_set(self) -> frozenset[int]:
        return frozenset(self._members)


@dataclass
class SweepReport:
    max_delta: float = 0.0
    improved_count: int = 0
    sweeps_run: int = 1


def _best_successor(g: Graph, J: list[float], x: int) -> tuple[float, Optional[int], float]:
    best, best_v, best_c = INF, None, INF
    for v, c in zip(g.succ[x], g.succ_cost[x]):
        val = c + J[v]
        if val < best or (val == best and best_v is not None and v < best_v):
            best, best_v, best_c = val, v, c
    return best, best_v, best_c


def backup(g: Graph, ps: PolicyState, x: int) -> tuple[float, Optional[int]]:
    """Bellman backup at ``x``: min over successors of edge cost plus cost-to-go.

    Ties go to the smallest successor id; returns ``(inf, None)`` when no
    successor has a finite cost-to-go.
    """
    if g.is_goal[x]:
        raise ContractViolation(f"backup requested for goal vertex {x}")
    best, best_v, _ = _best_successor(g, ps.J, x)
    return best, best_v


def _backup_chunk(g: Graph, J: list[float], xs: list[int]) -> list[tuple[int, float, Optional[int], float]]:
    out = []
    for x in xs:
        best, v, c = _best_successor(g, J, x)
        if best < J[x]:
            out.append((x, best, v, c))
    return out


def _split(xs: list[int], parts: int) -> list[list[int]]:
    k, r = divmod(len(xs), parts)
    chunks, start = [], 0
    for i in range(parts):
        end = start + k + (1 if i < r else 0)
        if end > start:
            chunks.append(xs[start:end])
        start = end
    return chunks


def improve_sweep(g: Graph, ps: PolicyState, b: Iterable[int], workers: int = 1,
                  executor: Optional[Executor] = None) -> SweepReport:
    """One Jacobi policy-improvement sweep over ``b``.

    Every backup reads the cost-to-go values as they stood when the sweep
    started; the resulting (parent, J) changes are committed together
    afterwards, so the outcome does not depend on ``workers``. A vertex only
    switches parent on a strict improvement.
    """
    targets = [x for x in b if not g.is_goal[x]]
    J = ps.J
    if workers > 1 and executor is not None and len(targets) > 1:
        chunks = _split(targets, workers)
        updates = [u for part in executor.map(lambda xs: _backup_chunk(g, J, xs), chunks) for u in part]
    else:
        updates = _backup_chunk(g, J, targets)
    max_delta = 0.0
    for x, best, v, c in updates:
        delta = J[x] - best
        if delta > max_delta:
            max_delta = delta
    for x, best, v, c in updates:
        ps.set_parent(x, v, c, best)
    if g.init_id is not None:
        ps.J_init = J[g.init_id]
    return SweepReport(max_delta=max_delta, improved_count=len(updates))


def evaluate(g: Graph, ps: PolicyState, env: Environment, prune: bool = True) -> PromisingSet:
    """Policy evaluation restricted to the promising part of the policy tree.

    First re-derives the exact cost of the current x_init path. Then walks the
    tree breadth-first from the goal vertices, recomputing each child's cost
    from its parent, and expanding a vertex only while
    ``h(x_init, x) + J(x) < J(x_init)`` (``J(x) < J(x_init)`` when ``prune`` is
    off). Every predecessor of an expanded vertex is returned as promising.
    """
    J, parent, pcost = ps.J, ps.parent, ps.parent_cost
    is_goal = g.is_goal
    init = g.init_id
    J_init = INF
    if init is not None:
        chain: Optional[list[int]] = []
        x = init
        while not is_goal[x]:
            chain.append(x)
            if len(chain) > len(g):
                raise CycleDetectedError(f"parent chain from x_init exceeds {len(g)} steps")
            x = parent[x]
            if x is None:
                chain = None
                break
        if chain is not None:
            for x in reversed(chain):
                J[x] = pcost[x] + J[parent[x]]
            J_init = J[init]
    ps.J_init = J_init

    roots = [v for v in range(len(g)) if is_goal[v]]
    promising = set(roots)
    queue = deque(roots)
    points, pred, pred_cost = g.points, g.pred, g.pred_cost
    xi = env.x_init
    dist = math.dist
    while queue:
        x = queue.popleft()
        Jx = J[x]
        key = dist(xi, points[x]) + Jx if prune else Jx
        if not key < J_init:
            continue
        for s, c in zip(pred[x], pred_cost[x]):
            if parent[s] == x:
                J[s] = c + Jx
                queue.append(s)
            promising.add(s)
    return PromisingSet(promising)


SweepObserver = Callable[[int, Graph, PolicyState], None]


def replan(g: Graph, ps: PolicyState, b0: Iterable[int], env: Environment, eps: float = DEFAULT_EPS,
           max_sweeps: Optional[int] = None, workers: int = 1, executor: Optional[Executor] = None,
           prune: bool = True, observer: Optional[SweepObserver] = None) -> tuple[PromisingSet, int]:
    """Restricted policy iteration until the largest per-vertex decrease is at most ``eps``.

    Each improvement sweep runs on a freshly evaluated promising set (merged
    with ``b0`` for the first sweep). ``observer(i, g, ps)`` is called with
    ``i = 0`` before the first sweep and after every sweep ``i``.
    Returns the promising set of the last sweep and the number of sweeps.
    """
    if max_sweeps is None:
        max_sweeps = len(g) + 2
    b = evaluate(g, ps, env, prune)
    b.update(b0)
    if observer is not None:
        observer(0, g, ps)
    sweeps = 0
    while True:
        if sweeps >= max_sweeps:
            raise NonterminationError(f"policy still changing after {sweeps} sweeps")
        report = improve_sweep(g, ps, b, workers, executor)
        sweeps += 1
        if observer is not None:
            observer(sweeps, g, ps)
        if report.max_delta <= eps:
            return b, sweeps
        b = evaluate(g, ps, env, prune)


class VIQueue:
    """Lazy-deletion priority queue keyed by ``(J(x) + h(x_init, x), J(x))``."""

    def __init__(self):
        self._heap: list[tuple[float, float, int]] = []

    def push(self, x: int, J: float, h: float) -> None:
        heapq.heappush(self._heap, (J + h, J, x))

    def __len__(self) -> int:
        return len(self._heap)

    def _discard_stale(self, J: list[float]) -> None:
        heap = self._heap
        while heap and heap[0][1] != J[heap[0][2]]:
            heapq.heappop(heap)

    def top(self, J: list[float]) -> Optional[tuple[float, float, int]]:
        self._discard_stale(J)
        return self._heap[0] if self._heap else None

    def pop(self) -> tuple[float, float, int]:
        return heapq.heappop(self._heap)


def vi_relax(g: Graph, ps: PolicyState, queue: VIQueue, env: Environment) -> list[int]:
    """Gauss-Seidel value iteration in key order, stopping once x_init's key is reached.

    Pops the smallest-key vertex, relaxes each predecessor through it, and
    queues those whose cost-to-go dropped. Returns the expanded vertices.
    """
    J, parent, pcost = ps.J, ps.parent, ps.parent_cost
    init = g.init_id
    points, pred, pred_cost, is_goal = g.points, g.pred, g.pred_cost, g.is_goal
    xi = env.x_init
    dist = math.dist
    expanded = []
    while True:
        top = queue.top(J)
        if top is None:
            break
        if init is not None and (top[0], top[1]) >= (J[init], J[init]):
            break
        queue.pop()
        x = top[2]
        expanded.append(x)
        Jx = J[x]
        for s, c in zip(pred[x], pred_cost[x]):
            if is_goal[s]:
                continue
            val = c + Jx
            if val < J[s]:
                J[s] = val
                parent[s] = x
                pcost[s] = c
                queue.push(s, val, dist(xi, points[s]))
    ps.J_init = J[init] if init is not None else INF
    return expanded
