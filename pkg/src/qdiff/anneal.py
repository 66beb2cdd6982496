"""Simulated annealing over four-point periodic spline diffusion coefficients.

The objective is the speed ratio ``c*_{q_num} / c*_{q_den}`` for a fixed
growth rate ``r``.  The control is ``(d0, d1, d2, d0)``, the values of ``D``
at ``x = 0, 1/3, 2/3, 1``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .fields import (CosineSquared, FieldError, PeriodicField, build_periodic_spline,
                     check_positive, find_extrema, to_record)
from .speed import ExtinctionError, spreading_speed

SPEED_TOL = 1e-4
LAMBDA_TOL = 1e-3


@dataclass(frozen=True)
class AnnealConfig:
    q_num: float = 0.0
    q_den: float = 1.0
    r: PeriodicField = field(default_factory=lambda: CosineSquared(0.0, 1.0, 0.0))
    bounds: tuple = (0.1, 1.0)
    n_iters: int = 2000
    T0: float = 0.1
    cool: float = 0.95
    cool_every: int = 20
    proposal_sigma: float = 0.05
    seed: int = 0
    initial: tuple | None = None  # default: constant at the middle of the bounds
    speed_tol: float = SPEED_TOL
    spline_floor: float | None = 0.1  # lower bound on the whole spline, not just the controls; None: positivity only

    def __post_init__(self):
        lo, hi = self.bounds
        if not lo < hi:
            raise ValueError("bounds must be ordered")
        if lo <= 0:
            raise ValueError("lower bound must be positive")
        if not 0 < self.cool < 1:
            raise ValueError("cool must lie in (0, 1)")
        if self.n_iters < 0:
            raise ValueError("n_iters must be non-negative")
        if self.cool_every < 1:
            raise ValueError("cool_every must be at least 1")
        if self.T0 <= 0 or self.proposal_sigma <= 0:
            raise ValueError("T0 and proposal_sigma must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["r"] = to_record(self.r)
        d["bounds"] = list(self.bounds)
        d["initial"] = None if self.initial is None else list(self.initial)
        return d


@dataclass
class AnnealResult:
    best_control: tuple
    best_ratio: float
    history: list  # (iteration, ratio, accepted); ratio is nan for invalid splines
    evaluations: int
    best_trace: list  # best ratio after every iteration
    initial_control: tuple
    initial_ratio: float

    @property
    def peak_location(self) -> float:
        return spline_peak(self.best_control)


def _clip(values, bounds):
    lo, hi = bounds
    eps = 1e-6 * (hi - lo)
    return np.clip(values, lo + eps, hi - eps)


def _control(free) -> tuple:
    f = [float(v) for v in free]
    return (f[0], f[1], f[2], f[0])


def objective_eval(control, cfg: AnnealConfig) -> float:
    """``c*_{q_num} / c*_{q_den}`` for the spline ``D`` through ``control``;
    0 if either speed is undefined because the population dies out."""
    D = build_periodic_spline(control, cfg.bounds)
    if cfg.spline_floor is not None:
        check_positive(D, floor=cfg.spline_floor)
    try:
        num = spreading_speed(cfg.r, D, cfg.q_num, tol=cfg.speed_tol, lambda_tol=LAMBDA_TOL)
        den = spreading_speed(cfg.r, D, cfg.q_den, tol=cfg.speed_tol, lambda_tol=LAMBDA_TOL)
    except ExtinctionError:
        return 0.0
    return num.c_star / den.c_star


def spline_peak(control, bounds=(0.1, 1.0)) -> float:
    """Location in ``[0, 1)`` of the global maximum of the spline."""
    D = build_periodic_spline(control, bounds)
    ext = find_extrema(D)
    if ext.flat or not ext.maxima:
        return 0.0
    x0, _, _ = max(ext.maxima, key=lambda m: m[1])
    x0 = x0 % D.period
    return 0.0 if D.period - x0 < 1e-9 else float(x0)


def run_annealing(cfg: AnnealConfig, callback=None) -> AnnealResult:
    """Metropolis search with geometric cooling; deterministic given ``cfg.seed``."""
    rng = np.random.default_rng(cfg.seed)
    lo, hi = cfg.bounds
    if cfg.initial is None:
        free = np.full(3, 0.5 * (lo + hi))
    else:
        init = np.asarray(cfg.initial, dtype=float)
        if init.shape != (4,) or init[0] != init[3]:
            raise ValueError("initial control must be 4 values with first == last")
        free = init[:3]
    free = _clip(free, cfg.bounds)

    cache: dict = {}

    def evaluate(fr):
        key = tuple(np.round(fr, 6))
        if key not in cache:
            try:
                cache[key] = objective_eval(_control(fr), cfg)
            except FieldError:
                # the spline overshoots to non-positive values: not a valid D
                cache[key] = math.nan
        return cache[key]

    current = evaluate(free)
    if math.isnan(current):
        raise FieldError("initial control does not give a positive spline")
    init_control, init_ratio = _control(free), current
    best_free, best = free.copy(), current
    history, best_trace = [], []
    for it in range(1, cfg.n_iters + 1):
        T = cfg.T0 * cfg.cool ** ((it - 1) // cfg.cool_every)
        cand = _clip(free + rng.normal(0.0, cfg.proposal_sigma, size=3), cfg.bounds)
        value = evaluate(cand)
        delta = value - current
        # draw every iteration so the stream does not depend on the outcome
        u = rng.random()
        accepted = not math.isnan(value) and (delta >= 0 or u < math.exp(delta / T))
        if accepted:
            free, current = cand, value
            if value > best:
                best_free, best = cand.copy(), value
        history.append((it, value, bool(accepted)))
        best_trace.append(best)
        if callback is not None:
            callback(it, value, accepted, best)
    return AnnealResult(_control(best_free), best, history, len(cache), best_trace,
                        init_control, init_ratio)
