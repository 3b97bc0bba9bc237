"""Shortest total time to reach a fixed fraction of the complete value.

With an exponential refinement process at rate K(t_m), reaching the
fraction f takes t_e = -ln(1 - f) / K(t_m) of execution.  Total time is
t_e + t_m + t_mm, minimised over the planning time t_m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _search
from .errors import DegenerateEfficacyError, DomainError, ParameterError
from .models import LinearEfficacy, TabulatedEfficacy, _nonnegative, _positive
from .oracle import OracleConfig


@dataclass(frozen=True)
class GoalSpec:
    f: float
    efficacy: object
    t_mm: float = 0.0

    def __post_init__(self):
        _check_fraction(self.f)
        object.__setattr__(self, "t_mm", _nonnegative("t_mm", self.t_mm))


@dataclass(frozen=True)
class GoalSolution:
    t_m_star: float
    t_e_star: float
    t_star: float
    at_boundary: bool
    second_order_ok: bool
    method: str
    foc_residual: float = 0.0


def _check_fraction(f: float) -> float:
    f = float(f)
    if not 0.0 < f < 1.0:
        raise ParameterError(f"f must lie strictly between 0 and 1, got {f!r}")
    return f


def _effort(f: float) -> float:
    return -math.log1p(-f)


def problem_reduction_time(efficacy, f: float, t_m):
    """Execution time needed to reach fraction ``f`` after ``t_m`` of planning."""
    f = _check_fraction(f)
    K = np.asarray(efficacy.value(t_m), dtype=float)
    if np.any(K <= 0):
        raise DomainError("K(t_m) must be positive")
    with np.errstate(over="ignore"):
        out = _effort(f) / K
    return float(out) if out.ndim == 0 else out


def total_time(spec: GoalSpec, t_m):
    """Planning plus execution plus the fixed meta-level cost."""
    return problem_reduction_time(spec.efficacy, spec.f, t_m) + np.asarray(t_m, dtype=float) + spec.t_mm


def _total_time_slope(efficacy, f, t_m):
    """d(total time)/d(t_m) = 1 - L K'/K**2, with L = -ln(1 - f)."""
    t_m = np.asarray(t_m, dtype=float)
    K = np.asarray(efficacy.value(t_m), dtype=float)
    dK = np.asarray(efficacy.derivative(t_m), dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return 1.0 - _effort(f) * dK / K**2


def _total_time_curvature(efficacy, f, t_m) -> float:
    K = float(efficacy.value(t_m))
    dK = float(efficacy.derivative(t_m))
    d2K = float(efficacy.second_derivative(t_m))
    return _effort(f) * (2.0 * dK**2 / K**3 - d2K / K**2)


def planning_balance_residual(efficacy, f: float, t_m: float) -> float:
    """K(t_m)**2 / K'(t_m) + ln(1 - f); zero at an interior optimum."""
    K = float(efficacy.value(t_m))
    dK = float(efficacy.derivative(t_m))
    if dK == 0:
        raise DegenerateEfficacyError("K' = 0: the balance condition is undefined")
    return K**2 / dK - _effort(f)


def _finish(efficacy, f, t_mm, t_m, method) -> GoalSolution:
    t_m = float(t_m)
    t_e = float(problem_reduction_time(efficacy, f, t_m))
    at_boundary = t_m == 0.0
    if at_boundary or float(efficacy.derivative(t_m)) == 0:
        residual = 0.0
    else:
        residual = planning_balance_residual(efficacy, f, t_m)
    if at_boundary:
        # Corner solution: total time must not fall when planning starts.
        ok = float(_total_time_slope(efficacy, f, 0.0)) >= 0
    else:
        ok = _total_time_curvature(efficacy, f, t_m) > 0
    return GoalSolution(t_m, t_e, t_m + t_e + t_mm, at_boundary, bool(ok), method, residual)


def solve_goal_linear(k_o: float, l: float, f: float, t_mm: float = 0.0) -> GoalSolution:
    """Closed-form planning time for ``K = k_o + l t_m``.

    The optimum satisfies ``K(t_m)**2 = -l ln(1 - f)``; if ``k_o`` already
    exceeds that rate, no planning is done.
    """
    l = _positive("l", l)
    k_o = _nonnegative("k_o", k_o)
    f = _check_fraction(f)
    t_mm = _nonnegative("t_mm", t_mm)
    t_m = (math.sqrt(l * _effort(f)) - k_o) / l
    return _finish(LinearEfficacy(k_o, l), f, t_mm, max(t_m, 0.0), "closed_form")


def alternate_planning_time(k_o: float, l: float, f: float) -> float:
    """Variant closed form ``(sqrt(k_o**2 - l (k_o**2 + ln(1 - f))) - k_o) / l``.

    Carries extra ``k_o**2`` terms under the root and agrees with
    :func:`solve_goal_linear` only when ``l == 1`` or ``k_o == 0``.  Kept for
    side-by-side reporting; not used by any solver.
    """
    inner = k_o**2 - l * (k_o**2 + math.log1p(-f))
    return (math.sqrt(inner) - k_o) / l


def solve_goal_generic(spec: GoalSpec, search: Optional[OracleConfig] = None) -> GoalSolution:
    """Minimise total time for any monotone efficacy.

    Candidates are the roots of d(total time)/d(t_m) on the search bracket
    plus ``t_m = 0``.  If planning has no effect anywhere on the bracket the
    answer is ``t_m = 0``.
    """
    cfg = search or OracleConfig()
    eff, f, t_mm = spec.efficacy, spec.f, spec.t_mm
    K0 = float(eff.value(0.0))

    def slope(t_m):
        return _total_time_slope(eff, f, t_m)

    if cfg.bracket_hint is not None:
        hi = float(cfg.bracket_hint[1])
    else:
        hi = cfg.initial_upper
        if isinstance(eff, TabulatedEfficacy):
            hi = max(hi, eff.points[-1][0])
    # K' is constant past the last knot, so this scan sees every slope K can have.
    scan = np.linspace(0.0, hi, cfg.points(1))
    if not np.any(np.asarray(eff.derivative(scan)) > 0):
        if K0 <= 0:
            raise DomainError("K(0) = 0 and planning never raises it: the goal is unreachable")
        return _finish(eff, f, t_mm, 0.0, "marginal_search")
    if cfg.bracket_hint is None:
        hi = _search.expand_until(slope, hi, cfg.max_doublings)
    candidates = [t for t in _search.scan_roots(slope, 0.0, hi, cfg.points(1)) if float(eff.value(t)) > 0]
    if K0 > 0:
        candidates.insert(0, 0.0)
    if not candidates:
        raise DomainError("no feasible planning time on the search bracket")

    def total(t_m):
        return float(problem_reduction_time(eff, f, t_m)) + t_m + t_mm

    best, _ = _search.best_of(sorted(set(candidates)), total, maximize=False)
    return _finish(eff, f, t_mm, best, "marginal_search")
