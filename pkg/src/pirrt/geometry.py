"""Points, obstacle shapes and the exact geometric predicates used by the planners.

Points are plain tuples of floats. All obstacle and goal shapes are closed sets,
so touching a boundary counts as contact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from pirrt.errors import EnvironmentInfeasibleError, InvalidInputError

Point = tuple[float, ...]

MAX_SAMPLE_TRIES = 10_000


def as_point(coords: Sequence[float]) -> Point:
    p = tuple(float(c) for c in coords)
    if len(p) < 2:
        raise InvalidInputError(f"points need at least 2 coordinates, got {len(p)}")
    if not all(math.isfinite(c) for c in p):
        raise InvalidInputError(f"non-finite coordinate in {p}")
    return p


def _check_dims(a: Sequence[float], b: Sequence[float]) -> None:
    if len(a) != len(b):
        raise InvalidInputError(f"dimension mismatch: {len(a)} vs {len(b)}")


def distance(a: Point, b: Point) -> float:
    """Euclidean distance between two points of equal dimension."""
    _check_dims(a, b)
    return math.dist(a, b)


def heuristic(a: Point, b: Point) -> float:
    """Admissible cost-to-go estimate between two configurations.

    Edge costs are Euclidean lengths, so the straight-line distance never
    overestimates the cost of any path joining ``a`` and ``b``.
    """
    return distance(a, b)


def steer(origin: Point, toward: Point, eta: float) -> Point:
    """Move from ``origin`` toward ``toward`` by at most ``eta``."""
    _check_dims(origin, toward)
    if not eta > 0:
        raise InvalidInputError(f"eta must be positive, got {eta}")
    d = math.dist(origin, toward)
    if d <= eta:
        return tuple(toward)
    return tuple(o + (t - o) / d * eta for o, t in zip(origin, toward))


def unit_ball_volume(d: int) -> float:
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1)


@dataclass(frozen=True)
class Box:
    """Closed axis-aligned box ``[lo, hi]``."""

    lo: Point
    hi: Point

    def __post_init__(self):
        object.__setattr__(self, "lo", as_point(self.lo))
        object.__setattr__(self, "hi", as_point(self.hi))
        _check_dims(self.lo, self.hi)
        if not all(l < h for l, h in zip(self.lo, self.hi)):
            raise InvalidInputError(f"box min {self.lo} must be < max {self.hi} componentwise")

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def center(self) -> Point:
        return tuple((l + h) / 2 for l, h in zip(self.lo, self.hi))

    @property
    def measure(self) -> float:
        return math.prod(h - l for l, h in zip(self.lo, self.hi))

    def contains(self, p: Point) -> bool:
        return all(l <= c <= h for c, l, h in zip(p, self.lo, self.hi))

    def hits_segment(self, a: Point, b: Point) -> bool:
        # slab test on the closed segment; t-interval [t0, t1] of overlap
        t0, t1 = 0.0, 1.0
        for ai, bi, lo, hi in zip(a, b, self.lo, self.hi):
            d = bi - ai
            if d == 0.0:
                if ai < lo or ai > hi:
                    return False
                continue
            ta = (lo - ai) / d
            tb = (hi - ai) / d
            if ta > tb:
                ta, tb = tb, ta
            if ta > t0:
                t0 = ta
            if tb < t1:
                t1 = tb
            if t0 > t1:
                return False
        return True

    def closest_point(self, p: Point) -> Point:
        return tuple(min(max(c, l), h) for c, l, h in zip(p, self.lo, self.hi))


@dataclass(frozen=True)
class Ball:
    """Closed Euclidean ball."""

    center: Point
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        r = float(self.radius)
        if not (math.isfinite(r) and r > 0):
            raise InvalidInputError(f"ball radius must be positive, got {self.radius}")
        object.__setattr__(self, "radius", r)

    @property
    def dim(self) -> int:
        return len(self.center)

    @property
    def measure(self) -> float:
        return unit_ball_volume(self.dim) * self.radius ** self.dim

    def contains(self, p: Point) -> bool:
        return math.dist(p, self.center) <= self.radius

    def hits_segment(self, a: Point, b: Point) -> bool:
        r = self.radius
        c = self.center
        # cheap reject on the segment's bounding box
        for ai, bi, ci in zip(a, b, c):
            if min(ai, bi) > ci + r or max(ai, bi) < ci - r:
                return False
        d = [bi - ai for ai, bi in zip(a, b)]
        dd = math.fsum(x * x for x in d)
        if dd == 0.0:
            t = 0.0
        else:
            t = math.fsum((ci - ai) * di for ai, ci, di in zip(a, c, d)) / dd
            t = min(max(t, 0.0), 1.0)
        closest = tuple(ai + t * di for ai, di in zip(a, d))
        return math.dist(closest, c) <= r


Shape = Union[Box, Ball]


def regions_intersect(s: Shape, t: Shape) -> bool:
    """Closed-set intersection test between two shapes."""
    if isinstance(s, Box) and isinstance(t, Box):
        return all(sl <= th and tl <= sh for sl, sh, tl, th in zip(s.lo, s.hi, t.lo, t.hi))
    if isinstance(s, Ball) and isinstance(t, Ball):
        return math.dist(s.center, t.center) <= s.radius + t.radius
    box, ball = (s, t) if isinstance(s, Box) else (t, s)
    return math.dist(box.closest_point(ball.center), ball.center) <= ball.radius


@dataclass(frozen=True)
class Environment:
    """Planning problem: workspace bounds, obstacles, goal region and start."""

    bounds: Box
    obstacles: tuple[Shape, ...]
    goal: Shape
    x_init: Point
    dim: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "obstacles", tuple(self.obstacles))
        object.__setattr__(self, "x_init", as_point(self.x_init))
        d = self.bounds.dim
        object.__setattr__(self, "dim", d)
        for i, obs in enumerate(self.obstacles):
            if obs.dim != d:
                raise InvalidInputError(
                    f"obstacle {i} has dimension {obs.dim}, bounds have {d}", field=f"obstacles[{i}]")
        if self.goal.dim != d:
            raise InvalidInputError(f"goal has dimension {self.goal.dim}, bounds have {d}", field="goal")
        if len(self.x_init) != d:
            raise InvalidInputError(
                f"x_init has dimension {len(self.x_init)}, bounds have {d}", field="x_init")
        if not self.bounds.contains(self.x_init):
            raise InvalidInputError("x_init lies outside the bounds", field="x_init")
        for i, obs in enumerate(self.obstacles):
            if obs.contains(self.x_init):
                raise InvalidInputError(f"x_init lies inside obstacle {i}", field="x_init")
            if regions_intersect(obs, self.goal):
                raise InvalidInputError(f"goal region intersects obstacle {i}", field="goal")
        if not self.bounds.contains(self.goal.center):
            raise InvalidInputError("goal center lies outside the bounds", field="goal")

    @property
    def goal_point(self) -> Point:
        """Root of the tree: the center of the goal region."""
        return self.goal.center


def in_obstacle(env: Environment, p: Point) -> bool:
    return any(obs.contains(p) for obs in env.obstacles)


def in_goal(env: Environment, p: Point) -> bool:
    _check_dims(p, env.x_init)
    return env.goal.contains(p)


def obstacle_free(env: Environment, a: Point, b: Point) -> bool:
    """True iff the closed segment ``[a, b]`` stays in bounds and touches no obstacle."""
    _check_dims(a, b)
    # canonical endpoint order makes the predicate exactly symmetric
    if b < a:
        a, b = b, a
    if not (env.bounds.contains(a) and env.bounds.contains(b)):
        return False
    for obs in env.obstacles:
        if obs.hits_segment(a, b):
            return False
    return True


def sample_free(env: Environment, rng: np.random.Generator, max_tries: int = MAX_SAMPLE_TRIES) -> Point:
    """Uniform sample over the bounds, rejected until it misses every obstacle."""
    lo = np.asarray(env.bounds.lo)
    hi = np.asarray(env.bounds.hi)
    for _ in range(max_tries):
        p = tuple(float(c) for c in rng.uniform(lo, hi))
        if not in_obstacle(env, p):
            return p
    raise EnvironmentInfeasibleError(f"no free sample found in {max_tries} tries")
