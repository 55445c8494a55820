import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import DIAMOND_EDGES, build_graph, diamond_points, enumerate_paths_to_goal, random_small_graph
from pirrt.dp import INF, PolicyState
from pirrt.oracle import dijkstra_to_goal, nbar, optimal_set
from pirrt.planners import PlannerConfig, make_planner


def test_goal_only_graph():
    sol = dijkstra_to_goal(build_graph([(0, 0)], []))
    assert list(sol.J_star) == [0.0] and list(sol.hops) == [0.0]
    assert sol.init_id is None and sol.J_init == INF
    assert sol.prom == {0}  # everything beats an unreachable start
    assert nbar(sol) == 0


def test_diamond():
    g = build_graph(diamond_points(), DIAMOND_EDGES)
    g.init_id = 3
    sol = dijkstra_to_goal(g)
    assert sol.J_star[3] == pytest.approx(2.5)
    assert sol.hops[3] == 2
    assert sol.prom == {0, 1, 2}
    assert nbar(sol) == 1  # s is the start, so not in prom
    assert nbar(sol, sol.prom | {3}) == 2


def test_unreachable_vertex():
    g = build_graph([(0, 0), (1, 0), (5, 5)], [(1, 0)])
    sol = dijkstra_to_goal(g)
    assert sol.J_star[2] == INF and sol.hops[2] == INF


def test_nbar_examples():
    g = build_graph([(0, 0), (1, 0), (2, 0), (3, 0)], [(1, 0), (2, 1), (3, 2)])
    g.init_id = 3
    sol = dijkstra_to_goal(g)
    assert nbar(sol) == 2  # goal, a, b promising
    assert nbar(sol, frozenset()) == 0
    assert nbar(sol, frozenset({0})) == 0


def test_optimal_set_examples():
    g = build_graph(diamond_points(), DIAMOND_EDGES)
    g.init_id = 3
    sol = dijkstra_to_goal(g)
    converged = PolicyState([0.0, 1.0, 2.0, 2.5], [None, 0, 0, 2], [INF, 1.0, 2.0, 0.5])
    assert optimal_set(sol, converged.policy_costs(g)) == sol.prom
    stale = PolicyState([0.0, 1.0, 7.0, 2.5], [None, 0, None, 2], [INF, 1.0, INF, 0.5])
    assert optimal_set(sol, stale.J) == {0, 1}
    assert optimal_set(sol, stale.policy_costs(g)) == {0, 1}


def test_focused_set_adds_heuristic():
    g = build_graph([(0, 0), (1, 0), (1, 1), (-3, 0)], [(1, 0), (2, 1), (3, 0)])
    g.init_id = 2
    sol = dijkstra_to_goal(g)
    assert sol.prom == {0, 1}
    assert sol.focused == {0}


@pytest.mark.parametrize("seed", range(5))
def test_matches_enumeration_on_50_vertex_graphs(seed):
    rnd = random.Random(seed)
    # sparse enough that enumerating up to 6 hops stays cheap
    g = random_small_graph(rnd, 50, 0.06)
    sol = dijkstra_to_goal(g)
    J, hops = enumerate_paths_to_goal(g, max_hops=6)
    checked = 0
    for x in range(len(g)):
        if sol.hops[x] <= 6:
            checked += 1
            assert sol.J_star[x] == J[x]
            assert sol.hops[x] == hops[x]
    assert checked > 5


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_optimal_cost_lower_bounds_any_policy(seed):
    rnd = random.Random(seed)
    g = random_small_graph(rnd, 10, 0.4)
    sol = dijkstra_to_goal(g)
    ps = PolicyState()
    for v in range(len(g)):
        if g.is_goal[v] or not g.succ[v]:
            ps.add_vertex(0.0 if g.is_goal[v] else INF)
        else:
            p = rnd.choice(g.succ[v])
            ps.add_vertex(INF, p, g.edge_cost_between(v, p))
    for x, c in enumerate(ps.policy_costs(g)):
        assert sol.J_star[x] <= c


def test_heuristic_lower_bounds_grown_graph(sparse_env):
    with make_planner(sparse_env, PlannerConfig(iterations=400, seed=3, eta=0.5)) as p:
        p.run()
    sol = dijkstra_to_goal(p.graph)
    goal = p.graph.points[0]
    for x in range(len(p.graph)):
        if math.isfinite(sol.J_star[x]) and not p.graph.is_goal[x]:
            # straight line to some goal vertex never beats the graph path
            best = min(math.dist(p.graph.points[x], p.graph.points[v]) for v in sol.goals)
            assert best <= sol.J_star[x] + 1e-12
    assert goal == sparse_env.goal_point
