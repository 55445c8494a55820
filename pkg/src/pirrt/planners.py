"""Planner drivers: PI-RRT# (policy iteration) and the RRT# value-iteration baseline.

Both grow the same random geometric graph from the goal toward the start;
they differ only in how the policy is repaired after each extension.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from pirrt.dp import (DEFAULT_EPS, PolicyState, PromisingSet, SweepObserver, VIQueue, backup, replan,
                      vi_relax)
from pirrt.errors import InvalidInputError
from pirrt.geometry import Environment, in_goal, obstacle_free, sample_free, steer
from pirrt.graph import Graph, RadiusParams, connection_radius, default_gamma, near, nearest

PI_RRTSHARP = "pi_rrtsharp"
RRTSHARP_VI = "rrtsharp_vi"
PLANNER_KINDS = (PI_RRTSHARP, RRTSHARP_VI)


@dataclass
class PlannerConfig:
    iterations: int = 1000
    seed: int = 0
    eta: float = 1.0
    gamma: Optional[float] = None
    eps: float = DEFAULT_EPS
    workers: int = 1
    planner_kind: str = PI_RRTSHARP
    # heuristic focusing of the promising set; off = plain J(x) < J(x_init) test
    prune: bool = True

    def __post_init__(self):
        if self.iterations < 1:
            raise InvalidInputError("iterations must be >= 1", field="iterations")
        if self.workers < 1:
            raise InvalidInputError("workers must be >= 1", field="workers")
        if not self.eta > 0:
            raise InvalidInputError("eta must be positive", field="eta")
        if self.gamma is not None and not self.gamma > 0:
            raise InvalidInputError("gamma must be positive", field="gamma")
        if not self.eps >= 0:
            raise InvalidInputError("eps must be nonnegative", field="eps")
        if self.planner_kind not in PLANNER_KINDS:
            raise InvalidInputError(f"unknown planner kind {self.planner_kind!r}", field="planner_kind")


@dataclass
class IterationTrace:
    iter: int
    J_init: float
    n_vertices: int
    n_edges: int
    sweeps: int
    t_plan: int
    t_nonplan: int


@dataclass
class ExtendOutcome:
    vertex: Optional[int] = None
    admitted: bool = False
    skipped: Optional[str] = None

    @property
    def added(self) -> bool:
        return self.vertex is not None


def extend(g: Graph, ps: PolicyState, b: PromisingSet, env: Environment, params: RadiusParams,
           rng: np.random.Generator, prune: bool = True) -> ExtendOutcome:
    """Sample, steer and wire one new vertex with a one-step-optimal parent."""
    x_rand = sample_free(env, rng)
    n_id = nearest(g, x_rand)
    p_nearest = g.points[n_id]
    x_new = steer(p_nearest, x_rand, params.eta)
    if not obstacle_free(env, x_new, p_nearest):
        return ExtendOutcome(skipped="collision")
    if g.has_point(x_new):
        return ExtendOutcome(skipped="duplicate")

    J = ps.J
    dist = math.dist
    cost = dist(x_new, p_nearest)
    J_new, par, par_cost = cost + J[n_id], n_id, cost
    links = [n_id]
    for v in near(g, x_new, len(g), params):
        if v == n_id:
            continue
        pv = g.points[v]
        if obstacle_free(env, x_new, pv):
            c = dist(x_new, pv)
            if J_new > c + J[v]:
                J_new, par, par_cost = c + J[v], v, c
            links.append(v)

    goal = in_goal(env, x_new)
    if goal:
        J_new, par, par_cost = 0.0, None, math.inf
        key = dist(env.x_init, x_new) if prune else 0.0
    else:
        key = (dist(env.x_init, g.points[par]) if prune else 0.0) + J[par]
    admitted = key < ps.J_init

    vid = g.insert_vertex(x_new, goal=goal)
    ps.add_vertex(J_new, par, par_cost)
    for v in links:
        g.insert_edge_pair(vid, v)
    if admitted:
        b.add(vid)
    return ExtendOutcome(vertex=vid, admitted=admitted)


def connect_init(g: Graph, ps: PolicyState, env: Environment, params: RadiusParams, new_vertex: int) -> bool:
    """Insert x_init once a new vertex lands within the connection radius with a clear line.

    x_init is linked to every collision-free vertex of its r-disc and gets its
    cost-to-go from a one-step backup.
    """
    if g.init_id is not None:
        return False
    xi = env.x_init
    p_new = g.points[new_vertex]
    if not (math.dist(p_new, xi) < connection_radius(params, len(g)) and obstacle_free(env, p_new, xi)):
        return False
    if g.has_point(xi):
        g.init_id = g._index[xi]
        ps.J_init = ps.J[g.init_id]
        return True
    nbrs = near(g, xi, len(g), params)
    goal = in_goal(env, xi)
    vid = g.insert_vertex(xi, goal=goal)
    ps.add_vertex(0.0 if goal else math.inf)
    for v in nbrs:
        if obstacle_free(env, xi, g.points[v]):
            g.insert_edge_pair(vid, v)
    g.init_id = vid
    if not goal:
        best, par = backup(g, ps, vid)
        if par is not None:
            ps.set_parent(vid, par, g.edge_cost_between(vid, par), best)
    ps.J_init = ps.J[vid]
    return True


class Planner:
    """Common incremental loop; subclasses supply the policy-repair step."""

    kind = ""

    def __init__(self, env: Environment, cfg: PlannerConfig):
        self.env = env
        self.cfg = cfg
        # one PCG64 stream, used for sampling only
        self.rng = np.random.default_rng(cfg.seed)
        gamma = cfg.gamma if cfg.gamma is not None else default_gamma(env)
        self.params = RadiusParams(gamma=gamma, eta=cfg.eta, d=env.dim)
        self.graph = Graph(env.dim)
        self.policy = PolicyState()
        root = self.graph.insert_vertex(env.goal_point, goal=True)
        self.policy.add_vertex(0.0)
        self.promising = PromisingSet([root])
        self.traces: list[IterationTrace] = []
        self.sweep_observer: Optional[SweepObserver] = None
        self._executor: Optional[ThreadPoolExecutor] = None
        if cfg.workers > 1:
            self._executor = ThreadPoolExecutor(max_workers=cfg.workers)

    def close(self) -> None:
        if self._executor is not None:
            self._executor.shutdown()
            self._executor = None

    def __enter__(self) -> "Planner":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def _after_extend(self, outcome: ExtendOutcome, joined: bool) -> None:
        pass

    def _plan(self, outcome: ExtendOutcome, joined: bool) -> int:
        raise NotImplementedError

    def step(self) -> IterationTrace:
        clock = time.perf_counter_ns
        t0 = clock()
        g, ps = self.graph, self.policy
        outcome = extend(g, ps, self.promising, self.env, self.params, self.rng, self.cfg.prune)
        joined = False
        if outcome.added:
            joined = connect_init(g, ps, self.env, self.params, outcome.vertex)
        self._after_extend(outcome, joined)
        t1 = clock()
        sweeps = self._plan(outcome, joined)
        t2 = clock()
        trace = IterationTrace(len(self.traces) + 1, ps.J_init, len(g), g.n_edges, sweeps, t2 - t1, t1 - t0)
        self.traces.append(trace)
        return trace

    def run(self, iterations: Optional[int] = None) -> list[IterationTrace]:
        for _ in range(iterations if iterations is not None else self.cfg.iterations):
            self.step()
        return self.traces


class PIRRTSharp(Planner):
    """Replans by restricted policy iteration whenever the extension can matter."""

    kind = PI_RRTSHARP

    def _plan(self, outcome: ExtendOutcome, joined: bool) -> int:
        if not (outcome.admitted or joined):
            return 0
        self.promising, sweeps = replan(
            self.graph, self.policy, self.promising, self.env, eps=self.cfg.eps,
            workers=self.cfg.workers, executor=self._executor, prune=self.cfg.prune,
            observer=self.sweep_observer)
        return sweeps


class RRTSharpVI(Planner):
    """Baseline: Gauss-Seidel value iteration over a persistent priority queue.

    The ``sweeps`` trace column counts vertex expansions for this planner.
    """

    kind = RRTSHARP_VI

    def __init__(self, env: Environment, cfg: PlannerConfig):
        super().__init__(env, cfg)
        self.queue = VIQueue()
        self.queue.push(0, 0.0, math.dist(env.x_init, env.goal_point))

    def _after_extend(self, outcome: ExtendOutcome, joined: bool) -> None:
        # queue insertion is part of the extension cost for this planner
        J, xi, pts = self.policy.J, self.env.x_init, self.graph.points
        if outcome.added:
            v = outcome.vertex
            self.queue.push(v, J[v], math.dist(xi, pts[v]))
        if joined:
            v = self.graph.init_id
            self.queue.push(v, J[v], 0.0)

    def _plan(self, outcome: ExtendOutcome, joined: bool) -> int:
        if not (outcome.added or joined):
            return 0
        expanded = vi_relax(self.graph, self.policy, self.queue, self.env)
        self.promising = PromisingSet(expanded)
        return len(expanded)


def make_planner(env: Environment, cfg: PlannerConfig) -> Planner:
    if cfg.planner_kind == PI_RRTSHARP:
        return PIRRTSharp(env, cfg)
    return RRTSharpVI(env, cfg)


def run(env: Environment, cfg: PlannerConfig) -> tuple[Graph, PolicyState, list[IterationTrace]]:
    """Run ``cfg.iterations`` iterations and return the final graph, policy and traces."""
    with make_planner(env, cfg) as planner:
        traces = planner.run()
    return planner.graph, planner.policy, traces
