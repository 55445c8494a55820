import math

import pytest

from pirrt.geometry import Ball, Box, Environment
from pirrt.graph import Graph
from pirrt.io import load_scenario


@pytest.fixture
def open_square():
    """Obstacle-free unit square with the start and goal at opposite corners."""
    return Environment(Box((0.0, 0.0), (1.0, 1.0)), [], Ball((0.9, 0.9), 0.05), (0.1, 0.1))


@pytest.fixture
def sparse_env():
    return load_scenario("sparse")[0]


@pytest.fixture
def cluttered_env():
    return load_scenario("cluttered")[0]


def build_graph(points, edges, goals=(0,)):
    """Graph over ``points`` with symmetric Euclidean edges; ``goals`` are flagged as goal vertices."""
    g = Graph(len(points[0]))
    for i, p in enumerate(points):
        g.insert_vertex(tuple(float(c) for c in p), goal=i in goals)
    for a, b in edges:
        g.insert_edge_pair(a, b)
    return g


def diamond_points():
    # goal-a 1, goal-b 2, a-s 2, b-s 0.5; no direct goal-s edge
    ct = -0.25
    st = math.sqrt(1 - ct * ct)
    return [(0.0, 0.0), (ct, st), (2.0, 0.0), (1.5, 0.0)]


DIAMOND_EDGES = [(1, 0), (2, 0), (3, 1), (3, 2)]


def enumerate_paths_to_goal(g, tol=1e-12, max_hops=None):
    """Brute-force cost-to-go and optimal hop counts by walking every simple path out of the goal set.

    Costs are accumulated from the goal end, the same association order a
    goal-rooted shortest-path search uses, so results compare exactly. With
    ``max_hops`` only paths of at most that many edges are considered.
    """
    limit = math.inf if max_hops is None else max_hops
    n = len(g)
    costs = [[] for _ in range(n)]  # (cost, hops) of every simple path to a goal

    def walk(x, cost, hops, on_path):
        costs[x].append((cost, hops))
        if hops >= limit:
            return
        for s, c in zip(g.pred[x], g.pred_cost[x]):
            if s not in on_path and not g.is_goal[s]:
                on_path.add(s)
                walk(s, cost + c, hops + 1, on_path)
                on_path.discard(s)

    for goal in g.goal_ids():
        walk(goal, 0.0, 0, {goal})
    J = [min((c for c, _ in cs), default=math.inf) for cs in costs]
    hops = [min((h for c, h in cs if c <= J[x] * (1 + tol)), default=math.inf) for x, cs in enumerate(costs)]
    return J, hops


def random_small_graph(rnd, n, p):
    """``n`` random points in the unit square, each pair joined with probability ``p``; vertex 0 is a goal."""
    pts = []
    while len(pts) < n:
        q = (rnd.random(), rnd.random())
        if q not in pts:
            pts.append(q)
    goals = (0,) if rnd.random() < 0.7 else (0, n - 1)
    edges = [(a, b) for a in range(n) for b in range(a + 1, n) if rnd.random() < p]
    return build_graph(pts, edges, goals=goals)
