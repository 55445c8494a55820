"""Monte-Carlo harness: repeated trials, power-law fits and the processor-load estimate."""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from pirrt.errors import InvalidInputError
from pirrt.geometry import Environment
from pirrt.planners import IterationTrace, PlannerConfig, run

BENCH_COLUMNS = ("iter", "mean_t_plan_ns", "sd_t_plan_ns", "mean_t_nonplan_ns", "sd_t_nonplan_ns",
                 "mean_J_init", "sd_J_init")
DEFAULT_FIT_MIN = 100


@dataclass
class BenchTable:
    """Per-iteration statistics across trials; times are cumulative nanoseconds."""

    iters: np.ndarray
    mean_t_plan: np.ndarray
    sd_t_plan: np.ndarray
    mean_t_nonplan: np.ndarray
    sd_t_nonplan: np.ndarray
    mean_J_init: np.ndarray
    sd_J_init: np.ndarray
    trials: int = 1

    def __len__(self) -> int:
        return len(self.iters)

    def column(self, name: str) -> np.ndarray:
        attr = {"mean_t_plan_ns": "mean_t_plan", "sd_t_plan_ns": "sd_t_plan",
                "mean_t_nonplan_ns": "mean_t_nonplan", "sd_t_nonplan_ns": "sd_t_nonplan"}.get(name, name)
        if attr == "iter":
            attr = "iters"
        if not hasattr(self, attr) or attr == "trials":
            raise InvalidInputError(f"unknown bench column {name!r}", field="column")
        return getattr(self, attr)


@dataclass(frozen=True)
class PowerLawFit:
    c: float
    alpha: float
    r_squared: float
    fit_range: tuple[int, int]

    def predict(self, n):
        return self.c * np.asarray(n, dtype=float) ** self.alpha

    def report(self) -> str:
        return (f"c: {self.c:.10g}\nalpha: {self.alpha:.10g}\nr_squared: {self.r_squared:.10g}\n"
                f"n_min: {self.fit_range[0]}\nn_max: {self.fit_range[1]}\n")


@dataclass(frozen=True)
class LoadModel:
    """Baseline fit ``c0 n^alpha0`` against the PI fit ``c_pi n^alpha_pi``."""

    c0: float
    alpha0: float
    c_pi: float
    alpha_pi: float

    def __post_init__(self):
        if not (self.c0 > 0 and self.c_pi > 0):
            raise InvalidInputError("load model coefficients must be positive", field="c0" if self.c0 <= 0 else "c_pi")

    @property
    def coefficient(self) -> float:
        return self.c0 / self.c_pi

    @property
    def exponent(self) -> float:
        return 1.0 + self.alpha0 - self.alpha_pi


def load_threshold(model: LoadModel, n: float) -> tuple[float, float]:
    """Largest per-processor load for which parallel PI still beats the baseline at ``n`` iterations.

    Returns ``(threshold, min_processors)`` with ``min_processors = n / threshold``.
    """
    if not n >= 1:
        raise InvalidInputError("n must be >= 1", field="n")
    threshold = model.coefficient * n ** model.exponent
    return threshold, n / threshold


def _mean_sd(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # rows are trials; population sd so a single trial gives 0
    with np.errstate(invalid="ignore"):
        mean = x.mean(axis=0)
        sd = x.std(axis=0)
    any_inf = np.isinf(x).any(axis=0)
    all_inf = np.isinf(x).all(axis=0)
    mean[any_inf] = math.inf
    sd[any_inf] = math.inf
    sd[all_inf] = 0.0
    return mean, sd


def aggregate(runs: Sequence[Sequence[IterationTrace]]) -> BenchTable:
    """Combine per-trial traces (all of equal length) into a BenchTable."""
    if not runs:
        raise InvalidInputError("no trials to aggregate", field="trials")
    length = len(runs[0])
    if any(len(r) != length for r in runs):
        raise InvalidInputError("trials have different lengths", field="trials")
    t_plan = np.cumsum(np.array([[t.t_plan for t in r] for r in runs], dtype=float), axis=1)
    t_non = np.cumsum(np.array([[t.t_nonplan for t in r] for r in runs], dtype=float), axis=1)
    J = np.array([[t.J_init for t in r] for r in runs], dtype=float)
    mp, sp = _mean_sd(t_plan)
    mn, sn = _mean_sd(t_non)
    mj, sj = _mean_sd(J)
    iters = np.array([t.iter for t in runs[0]], dtype=np.int64)
    return BenchTable(iters, mp, sp, mn, sn, mj, sj, trials=len(runs))


def _one_trial(args: tuple[Environment, PlannerConfig]) -> list[IterationTrace]:
    env, cfg = args
    return run(env, cfg)[2]


def run_trials(env: Environment, cfg: PlannerConfig, trials: int, processes: int = 1) -> BenchTable:
    """Run ``trials`` independent trials with seeds ``cfg.seed + i`` and aggregate them.

    ``processes > 1`` spreads trials over a process pool; keep the default
    sequential mode for timing-sensitive measurements. Any failing trial
    aborts the whole batch.
    """
    if trials < 1:
        raise InvalidInputError("trials must be >= 1", field="trials")
    jobs = [(env, replace(cfg, seed=cfg.seed + i)) for i in range(trials)]
    if processes > 1:
        with ProcessPoolExecutor(max_workers=processes) as pool:
            runs = list(pool.map(_one_trial, jobs))
    else:
        runs = [_one_trial(j) for j in jobs]
    return aggregate(runs)


def _fmt(x: float) -> str:
    return "inf" if math.isinf(x) else format(float(x), ".17g")


def write_bench_table(table: BenchTable, path: Union[str, Path]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(BENCH_COLUMNS)
        cols = (table.mean_t_plan, table.sd_t_plan, table.mean_t_nonplan, table.sd_t_nonplan,
                table.mean_J_init, table.sd_J_init)
        for i, it in enumerate(table.iters):
            w.writerow([int(it)] + [_fmt(c[i]) for c in cols])


def read_bench_table(path: Union[str, Path]) -> BenchTable:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != BENCH_COLUMNS:
        raise InvalidInputError(f"{path}: not a bench table (bad header)", field="table")
    body = rows[1:]
    if not body:
        raise InvalidInputError(f"{path}: bench table has no rows", field="table")
    try:
        iters = np.array([int(r[0]) for r in body], dtype=np.int64)
        data = np.array([[float(v) for v in r[1:]] for r in body], dtype=float)
    except (ValueError, IndexError) as exc:
        raise InvalidInputError(f"{path}: malformed row ({exc})", field="table") from exc
    return BenchTable(iters, *data.T)


def fit_power_law(samples: Iterable[tuple[float, float]], fit_range: Optional[tuple[float, float]] = None
                  ) -> PowerLawFit:
    """Least-squares fit of ``t = c n^alpha`` on log-log axes.

    Only samples with ``n`` inside ``fit_range`` (inclusive) are used; the
    default range runs from 100 to the largest ``n``.
    """
    pts = np.asarray(list(samples), dtype=float).reshape(-1, 2)
    if pts.size == 0:
        raise InvalidInputError("no samples to fit", field="samples")
    n, t = pts[:, 0], pts[:, 1]
    if fit_range is None:
        fit_range = (DEFAULT_FIT_MIN, n.max())
    lo, hi = fit_range
    mask = (n >= lo) & (n <= hi)
    n, t = n[mask], t[mask]
    if np.unique(n).size < 2:
        raise InvalidInputError(f"need at least two distinct n in [{lo}, {hi}]", field="fit_range")
    if not (np.all(n > 0) and np.all(t > 0) and np.all(np.isfinite(t))):
        raise InvalidInputError("power-law fit needs positive finite n and t", field="samples")
    x, y = np.log(n), np.log(t)
    A = np.column_stack([np.ones_like(x), x])
    (intercept, slope), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - (intercept + slope * x)
    ss_res = float(resid @ resid)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    if ss_tot == 0.0:
        r2 = 1.0
    else:
        r2 = min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    return PowerLawFit(float(math.exp(intercept)), float(slope), r2, (int(lo), int(hi)))


def fit_table(table: BenchTable, column: str = "mean_t_plan_ns",
              fit_range: Optional[tuple[float, float]] = None) -> PowerLawFit:
    if fit_range is None:
        fit_range = (DEFAULT_FIT_MIN, int(table.iters.max()))
    return fit_power_law(zip(table.iters, table.column(column)), fit_range)
