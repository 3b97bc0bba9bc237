"""Brute-force grid optimisers and finite differences.

These routines are the independent check on every analytic solver, so they
use nothing but repeated grid evaluation: find a bracket by doubling,
lay a uniform grid over it, zoom in around the best point, repeat.  No
derivatives, no assumptions about where the optimum "should" be.

Objectives may be vectorised (called with an array, returning an array of
the same shape) or scalar-only; scalar objectives are evaluated pointwise.
NaN results are treated as ``-inf`` (infeasible).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import BracketError, DomainError, ParameterError

_EPS = np.finfo(float).eps
# Values within this many ulps of the best are indistinguishable from it.
_PLATEAU_ULPS = 8.0


@dataclass(frozen=True)
class OracleConfig:
    """Search settings shared by the grid oracle and the bracketing solvers.

    ``bracket_hint`` skips adaptive doubling.  For 2-D searches it may be a
    single ``(low, high)`` applied to both axes or one pair per axis.
    ``coarse_points`` defaults to 4096 in 1-D and 64 per axis in 2-D.
    """

    bracket_hint: Optional[tuple] = None
    max_doublings: int = 60
    coarse_points: Optional[int] = None
    refinement_rounds: int = 6
    shrink_factor: float = 8.0
    lower: float = 0.0
    initial_upper: float = 1.0

    def __post_init__(self):
        if self.max_doublings <= 0 or self.refinement_rounds < 0:
            raise ParameterError("max_doublings must be positive and refinement_rounds nonnegative")
        if self.coarse_points is not None and self.coarse_points < 3:
            raise ParameterError("coarse_points must be at least 3")
        if not self.shrink_factor > 1:
            raise ParameterError("shrink_factor must exceed 1")
        if not self.initial_upper > 0:
            raise ParameterError("initial_upper must be positive")

    def points(self, ndim: int) -> int:
        if self.coarse_points is not None:
            return int(self.coarse_points)
        return 4096 if ndim == 1 else 64


@dataclass(frozen=True)
class ArgOpt:
    """Result of a grid search.

    ``resolution`` bounds how far the true optimum of a unimodal objective
    can lie from ``argument``: the final grid spacing, widened to cover
    every grid point whose value is within rounding noise of the best.
    For 2-D searches ``argument``, ``resolution`` and ``spacing`` are pairs.
    """

    argument: object
    value: float
    resolution: object
    spacing: object
    bracket: tuple


def _evaluate(f: Callable, *grids: np.ndarray) -> np.ndarray:
    shape = np.broadcast(*grids).shape
    try:
        with np.errstate(all="ignore"):
            out = np.asarray(f(*grids), dtype=float)
        out = np.broadcast_to(out, shape).astype(float, copy=True)
    except (TypeError, ValueError):
        flat = [np.broadcast_to(g, shape).ravel() for g in grids]
        with np.errstate(all="ignore"):
            out = np.array([float(f(*(g[i] for g in flat))) for i in range(flat[0].size)])
        out = out.reshape(shape)
    out[np.isnan(out)] = -np.inf
    return out


def _scalar(f: Callable, *args: float) -> float:
    with np.errstate(all="ignore"):
        v = float(f(*(np.float64(a) for a in args)))
    return -np.inf if np.isnan(v) else v


def _noise(best: float) -> float:
    return _PLATEAU_ULPS * _EPS * max(1.0, abs(best))


def _bracket_1d(f: Callable, cfg: OracleConfig) -> tuple[float, float]:
    if cfg.bracket_hint is not None:
        lo, hi = (float(x) for x in cfg.bracket_hint)
        if not hi > lo:
            raise ParameterError("bracket_hint must satisfy low < high")
        return lo, hi
    lo = cfg.lower
    prev = _scalar(f, lo)
    hi = lo + cfg.initial_upper
    flat_run = 0
    for _ in range(cfg.max_doublings):
        cur = _scalar(f, hi)
        flat_run = flat_run + 1 if cur <= prev else 0
        if flat_run >= 3:
            return lo, hi
        prev = cur
        hi = lo + 2.0 * (hi - lo)
    raise BracketError(f"objective still increasing after {cfg.max_doublings} doublings")


def grid_max_1d(objective: Callable, config: Optional[OracleConfig] = None) -> ArgOpt:
    """Maximise a function of one time variable by grid refinement.

    Ties go to the smallest argument.
    """
    cfg = config or OracleConfig()
    n = cfg.points(1)
    lo0, hi0 = _bracket_1d(objective, cfg)
    lo, hi = lo0, hi0
    for rnd in range(cfg.refinement_rounds + 1):
        x = np.linspace(lo, hi, n)
        vals = _evaluate(objective, x)
        i = int(np.argmax(vals))
        if not np.isfinite(vals[i]):
            raise DomainError("objective is infeasible on the whole grid")
        spacing = (hi - lo) / (n - 1)
        if rnd == cfg.refinement_rounds:
            break
        half = 0.5 * (hi - lo) / cfg.shrink_factor
        lo, hi = max(lo0, x[i] - half), min(hi0, x[i] + half)
    best = float(x[i])
    near = x[vals >= vals[i] - _noise(vals[i])]
    resolution = float(np.max(np.abs(near - best)) + spacing)
    return ArgOpt(best, _scalar(objective, best), resolution, float(spacing), (float(lo0), float(hi0)))


def grid_min_1d(objective: Callable, config: Optional[OracleConfig] = None) -> ArgOpt:
    """Minimise by maximising the negated objective."""

    def neg(t):
        return -np.asarray(objective(t), dtype=float)

    res = grid_max_1d(neg, config)
    return ArgOpt(res.argument, _scalar(objective, res.argument), res.resolution, res.spacing, res.bracket)


def _axis_hints(cfg: OracleConfig):
    hint = cfg.bracket_hint
    if hint is None:
        return None
    if np.ndim(hint[0]) == 0:
        hint = (hint, hint)
    out = []
    for lo, hi in hint:
        lo, hi = float(lo), float(hi)
        if not hi > lo:
            raise ParameterError("bracket_hint must satisfy low < high")
        out.append((lo, hi))
    return tuple(out)


def _bracket_2d(f: Callable, cfg: OracleConfig, n: int):
    hints = _axis_hints(cfg)
    if hints is not None:
        return hints
    lo = cfg.lower
    prev = -np.inf
    hi = lo + cfg.initial_upper
    flat_run = 0
    for _ in range(cfg.max_doublings):
        g = np.linspace(lo, hi, n)
        cur = float(np.max(_evaluate(f, g[:, None], g[None, :])))
        flat_run = flat_run + 1 if cur <= prev else 0
        if flat_run >= 3:
            return (lo, hi), (lo, hi)
        prev = cur
        hi = lo + 2.0 * (hi - lo)
    raise BracketError(f"objective still increasing after {cfg.max_doublings} doublings")


def grid_max_2d(objective: Callable, config: Optional[OracleConfig] = None) -> ArgOpt:
    """Maximise ``objective(x, y)`` over a box by 2-D grid refinement.

    Ties go to the smallest ``x``, then the smallest ``y``.
    """
    cfg = config or OracleConfig()
    n = cfg.points(2)
    (xlo0, xhi0), (ylo0, yhi0) = _bracket_2d(objective, cfg, n)
    xlo, xhi, ylo, yhi = xlo0, xhi0, ylo0, yhi0
    for rnd in range(cfg.refinement_rounds + 1):
        x = np.linspace(xlo, xhi, n)
        y = np.linspace(ylo, yhi, n)
        vals = _evaluate(objective, x[:, None], y[None, :])
        i, j = np.unravel_index(int(np.argmax(vals)), vals.shape)
        if not np.isfinite(vals[i, j]):
            raise DomainError("objective is infeasible on the whole grid")
        hx, hy = (xhi - xlo) / (n - 1), (yhi - ylo) / (n - 1)
        if rnd == cfg.refinement_rounds:
            break
        half_x = 0.5 * (xhi - xlo) / cfg.shrink_factor
        half_y = 0.5 * (yhi - ylo) / cfg.shrink_factor
        xlo, xhi = max(xlo0, x[i] - half_x), min(xhi0, x[i] + half_x)
        ylo, yhi = max(ylo0, y[j] - half_y), min(yhi0, y[j] + half_y)
    bx, by = float(x[i]), float(y[j])
    mask = vals >= vals[i, j] - _noise(vals[i, j])
    ii, jj = np.nonzero(mask)
    res = (float(np.max(np.abs(x[ii] - bx)) + hx), float(np.max(np.abs(y[jj] - by)) + hy))
    return ArgOpt((bx, by), _scalar(objective, bx, by), res, (float(hx), float(hy)), ((xlo0, xhi0), (ylo0, yhi0)))


def finite_diff(
    objective: Callable,
    t: float,
    order: int = 1,
    step: Optional[float] = None,
    domain: tuple = (-np.inf, np.inf),
) -> float:
    """Central-difference first or second derivative of a scalar function."""
    if order not in (1, 2):
        raise ParameterError("order must be 1 or 2")
    h = 1e-5 * max(1.0, abs(t)) if step is None else float(step)
    if t - h < domain[0] or t + h > domain[1]:
        raise DomainError(f"stencil [{t - h}, {t + h}] leaves the domain {domain}")
    fp, fm = float(objective(t + h)), float(objective(t - h))
    if order == 1:
        return (fp - fm) / (2.0 * h)
    return (fp - 2.0 * float(objective(t)) + fm) / h**2
