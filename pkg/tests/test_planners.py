import math

import numpy as np
import pytest

from pirrt.dp import INF, PolicyState, PromisingSet
from pirrt.errors import InvalidInputError
from pirrt.geometry import Ball, Box, Environment
from pirrt.graph import Graph, RadiusParams
from pirrt.planners import (PI_RRTSHARP, RRTSHARP_VI, PlannerConfig, connect_init, extend, make_planner,
                            run)


class ScriptedRng:
    """Stands in for a generator; hands out fixed samples."""

    def __init__(self, *samples):
        self.samples = list(samples)

    def uniform(self, lo, hi):
        return np.asarray(self.samples.pop(0), dtype=float)


def empty_world(x_init=(9.0, 9.0)):
    return Environment(Box((0, 0), (10, 10)), [], Ball((1, 1), 0.2), x_init)


def fresh(env):
    g = Graph(2)
    g.insert_vertex(env.goal_point, goal=True)
    ps = PolicyState([0.0], [None], [INF])
    return g, ps, PromisingSet([0])


def test_config_validation():
    for bad in ({"iterations": 0}, {"workers": 0}, {"eta": 0}, {"gamma": -1}, {"eps": -1},
                {"planner_kind": "astar"}):
        with pytest.raises(InvalidInputError):
            PlannerConfig(**bad)


def test_first_extension_links_to_goal():
    env = empty_world()
    g, ps, b = fresh(env)
    out = extend(g, ps, b, env, RadiusParams(5.0, 1.0, 2), ScriptedRng((1.5, 1.0)))
    assert out.vertex == 1 and len(g) == 2
    assert ps.parent[1] == 0 and ps.J[1] == pytest.approx(0.5)


def test_colliding_extension_adds_nothing():
    env = Environment(Box((0, 0), (10, 10)), [Box((1.4, 0), (1.6, 5))], Ball((1, 1), 0.2), (9.0, 9.0))
    g, ps, b = fresh(env)
    out = extend(g, ps, b, env, RadiusParams(5.0, 1.0, 2), ScriptedRng((2.0, 1.0)))
    assert not out.added and out.skipped == "collision"
    assert len(g) == 1


def test_duplicate_sample_is_skipped():
    env = empty_world()
    g, ps, b = fresh(env)
    params = RadiusParams(5.0, 1.0, 2)
    extend(g, ps, b, env, params, ScriptedRng((1.5, 1.0)))
    out = extend(g, ps, b, env, params, ScriptedRng((1.5, 1.0)))
    assert out.skipped == "duplicate" and len(g) == 2


def test_extension_picks_cheapest_near_vertex():
    env = empty_world()
    g, ps, b = fresh(env)
    # three vertices around (3,1): nearest is expensive, one near vertex is cheap
    for p, J in (((3.2, 1.0), 10.0), ((3.0, 1.5), 1.0), ((3.0, 0.4), 4.0)):
        g.insert_vertex(p)
        ps.add_vertex(J, 0, 1.0)
    params = RadiusParams(gamma=100.0, eta=1.0, d=2)
    out = extend(g, ps, b, env, params, ScriptedRng((3.0, 1.0)))
    v = out.vertex
    assert ps.parent[v] == 2
    assert ps.J[v] == pytest.approx(1.5)
    assert sorted(g.succ[v]) == [1, 2, 3]
    # edges: one pair per linked vertex
    assert g.n_edges == 2 * 3


def test_goal_region_sample_becomes_goal_vertex():
    env = empty_world()
    g, ps, b = fresh(env)
    out = extend(g, ps, b, env, RadiusParams(5.0, 1.0, 2), ScriptedRng((1.1, 1.0)))
    assert g.is_goal[out.vertex] and ps.J[out.vertex] == 0.0 and ps.parent[out.vertex] is None


def test_connect_init_rules():
    # new vertex lands at (1.4, 1), 0.1 from x_init, radius capped at 0.4
    env = empty_world(x_init=(1.5, 1.0))
    g, ps, b = fresh(env)
    params = RadiusParams(gamma=100.0, eta=0.4, d=2)
    extend(g, ps, b, env, params, ScriptedRng((2.0, 1.0)))
    assert connect_init(g, ps, env, params, 1)
    assert g.init_id == 2 and ps.parent[2] == 1
    assert sorted(g.succ[2]) == [1]
    assert ps.J_init == pytest.approx(0.5)
    assert not connect_init(g, ps, env, params, 1)


def test_connect_init_blocked_segment():
    env = Environment(Box((0, 0), (10, 10)), [Box((1.44, 0), (1.46, 5))], Ball((1, 1), 0.2), (1.5, 1.0))
    g, ps, b = fresh(env)
    params = RadiusParams(gamma=100.0, eta=0.4, d=2)
    extend(g, ps, b, env, params, ScriptedRng((2.0, 1.0)))
    assert not connect_init(g, ps, env, params, 1)
    assert g.init_id is None


def test_single_iteration_run():
    env = empty_world()
    g, ps, traces = run(env, PlannerConfig(iterations=1, seed=0))
    assert len(traces) == 1
    assert traces[0].J_init == INF
    assert ps.J_init == INF


def strip_timing(traces):
    return [(t.iter, t.J_init, t.n_vertices, t.n_edges, t.sweeps) for t in traces]


@pytest.mark.parametrize("kind", [PI_RRTSHARP, RRTSHARP_VI])
def test_runs_are_deterministic(sparse_env, kind):
    cfg = PlannerConfig(iterations=300, seed=11, eta=0.5, planner_kind=kind)
    a = run(sparse_env, cfg)[2]
    b = run(sparse_env, cfg)[2]
    assert strip_timing(a) == strip_timing(b)


@pytest.mark.parametrize("kind", [PI_RRTSHARP, RRTSHARP_VI])
def test_trace_invariants(cluttered_env, kind):
    with make_planner(cluttered_env, PlannerConfig(iterations=600, seed=4, eta=0.5, planner_kind=kind)) as p:
        prev = None
        for _ in range(600):
            t = p.step()
            assert t.t_plan >= 0 and t.t_nonplan >= 0
            if prev is not None:
                assert t.J_init <= prev.J_init
                assert t.n_vertices >= prev.n_vertices and t.n_edges >= prev.n_edges
                assert t.n_edges - prev.n_edges <= 2 * t.n_vertices
            if math.isfinite(t.J_init):
                chain = p.policy.path_to_goal(p.graph, p.graph.init_id)
                assert chain is not None
                total = 0.0
                for v in reversed(chain[:-1]):
                    total = p.policy.parent_cost[v] + total
                assert total == t.J_init
            prev = t
    assert math.isfinite(prev.J_init)


def test_pi_and_vi_grow_the_same_graph(sparse_env):
    g1, _, t1 = run(sparse_env, PlannerConfig(iterations=300, seed=2, eta=0.5, planner_kind=PI_RRTSHARP))
    g2, _, t2 = run(sparse_env, PlannerConfig(iterations=300, seed=2, eta=0.5, planner_kind=RRTSHARP_VI))
    assert g1.points == g2.points
    assert [t.n_edges for t in t1] == [t.n_edges for t in t2]


def test_open_square_short_run_is_reasonable(open_square):
    _, ps, _ = run(open_square, PlannerConfig(iterations=1500, seed=0, eta=0.2))
    straight = math.dist((0.1, 0.1), (0.9, 0.9)) - 0.05
    assert straight <= ps.J_init < 1.15 * straight
