"""Ideal stopping time for a flexible computation with no planning phase.

Given a performance profile u_o(t_e) and a delay cost C, the best
execution time balances marginal value against marginal cost,
u_o'(t_e) = C'(t_e + t_mm).  When marginal cost already dominates at
t_e = 0 the answer is to act immediately, which is reported as a
boundary solution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _search
from .errors import ParameterError
from .models import (
    Exponential,
    InversePower,
    LinearCost,
    TabulatedCost,
    _uo_grad_raw,
    _uo_hessian_raw,
    _positive,
    _nonnegative,
    eval_uc,
    is_partitioned,
)
from .oracle import OracleConfig

TOL_TIME = _search.TOL_TIME
TOL_FOC = _search.TOL_FOC


@dataclass(frozen=True)
class StoppingSolution:
    t_e_star: float
    t_star: float
    u_c_star: float
    at_boundary: bool
    second_order_ok: bool
    method: str
    foc_residual: float = 0.0


def marginal_gap(profile, cost, t_mm: float, t_e):
    """u_o'(t_e) - C'(t_e + t_mm); positive while continuing pays."""
    t_e = np.asarray(t_e, dtype=float)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        return _uo_grad_raw(profile, 0.0, t_e)[1] - cost.derivative(t_e + t_mm)


def _second_order(profile, cost, t_mm: float, t_e: float) -> bool:
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        curv = float(_uo_hessian_raw(profile, 0.0, t_e)[2] - cost.second_derivative(t_e + t_mm))
    return curv < 0


def _finish(profile, cost, t_mm, t_e, method) -> StoppingSolution:
    t_e = float(t_e)
    at_boundary = t_e == 0.0
    residual = 0.0 if at_boundary else float(marginal_gap(profile, cost, t_mm, t_e))
    return StoppingSolution(
        t_e_star=t_e,
        t_star=t_e + t_mm,
        u_c_star=float(eval_uc(profile, cost, t_mm, 0.0, t_e)),
        at_boundary=at_boundary,
        second_order_ok=_second_order(profile, cost, t_mm, t_e),
        method=method,
        foc_residual=residual,
    )


def solve_stop_exponential(k: float, c: float, t_mm: float = 0.0) -> StoppingSolution:
    """Closed-form stopping time for ``1 - exp(-k t)`` under linear cost ``c``.

    The interior optimum ``ln(k/c)/k`` exists only when ``c < k``; otherwise
    the value gained by the first instant of work is already below its cost
    and the solution is ``t_e = 0``.
    """
    k, c = _positive("k", k), _positive("c", c)
    t_mm = _nonnegative("t_mm", t_mm)
    t_e = math.log(k / c) / k if c < k else 0.0
    return _finish(Exponential(k), LinearCost(c), t_mm, t_e, "closed_form")


def solve_stop_inverse_power(k: float, a: float, c: float, t_mm: float = 0.0) -> StoppingSolution:
    """Closed-form stopping time for ``1 - 1/(k t**a)`` under linear cost ``c``.

    Marginal value diverges as t_e -> 0, so the optimum is always interior.
    """
    k, a, c = _positive("k", k), _positive("a", a), _positive("c", c)
    t_mm = _nonnegative("t_mm", t_mm)
    t_e = (a / (k * c)) ** (1.0 / (a + 1.0))
    return _finish(InversePower(k, a), LinearCost(c), t_mm, t_e, "closed_form")


def inverse_power_optimal_value(k: float, a: float, c: float, t_mm: float = 0.0) -> float:
    """Optimal comprehensive value of the inverse-power model, in closed form."""
    ratio = a / (k * c)
    t_e = ratio ** (1.0 / (a + 1.0))
    return 1.0 - ratio ** (-a / (a + 1.0)) / k - c * (t_e + t_mm)


def _time_scale(profile) -> float:
    if isinstance(profile, Exponential):
        return 1.0 / profile.k
    return profile.k ** (-1.0 / profile.a)


def solve_stop_generic(
    profile, cost, t_mm: float = 0.0, search: Optional[OracleConfig] = None
) -> StoppingSolution:
    """Stopping time for any non-partitioned profile and monotone cost.

    Scans the marginal gap for every sign change, bisects each one, and
    compares the resulting local optima (plus ``t_e = 0`` where the profile
    is defined there) by comprehensive value.
    """
    if is_partitioned(profile):
        raise ParameterError("solve_stop_generic needs a non-partitioned profile")
    t_mm = _nonnegative("t_mm", t_mm)
    cfg = search or OracleConfig()

    def gap(t):
        return marginal_gap(profile, cost, t_mm, t)

    if cfg.bracket_hint is not None:
        hi = float(cfg.bracket_hint[1])
    else:
        hi = _time_scale(profile)
        hi = _search.expand_until(lambda t: -gap(t), hi, cfg.max_doublings)
        if isinstance(cost, TabulatedCost):
            hi = max(hi, cost.points[-1][0])
    candidates = _search.scan_roots(gap, 0.0, hi, cfg.points(1))
    if isinstance(profile, Exponential):
        candidates.insert(0, 0.0)
    candidates = sorted(set(candidates))
    best, _ = _search.best_of(candidates, lambda t: float(eval_uc(profile, cost, t_mm, 0.0, t)))
    return _finish(profile, cost, t_mm, best, "marginal_search")


def solve_stop(profile, cost, t_mm: float = 0.0, search: Optional[OracleConfig] = None) -> StoppingSolution:
    """Closed form when one exists for the (profile, cost) pair, else the marginal search."""
    if isinstance(cost, LinearCost):
        if isinstance(profile, Exponential):
            return solve_stop_exponential(profile.k, cost.c, t_mm)
        if isinstance(profile, InversePower):
            return solve_stop_inverse_power(profile.k, profile.a, cost.c, t_mm)
    return solve_stop_generic(profile, cost, t_mm, search)
