"""Curve data for plotting: value-versus-time curves, optimum slices and
parameter sweeps.  Nothing here plots; every function returns plain rows.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Callable, Iterable, Optional

import numpy as np

from .models import eval_cost, eval_uo, uc_raw


@dataclass(frozen=True)
class CurvePoint:
    value: float
    t_m_star: float
    t_e_star: float
    t_star: float
    u_c_star: Optional[float]
    at_boundary: bool

    def as_dict(self) -> dict:
        return asdict(self)


def value_curve(profile, cost, t_mm: float, t_e: Iterable[float], t_m: float = 0.0) -> list[dict]:
    """Object-level value, delay cost and comprehensive value along ``t_e``.

    Each row is ``{"t", "u_o", "cost", "u_c"}`` with ``t`` the total elapsed
    time ``t_m + t_e + t_mm``.
    """
    t_e = np.asarray(list(t_e), dtype=float)
    with np.errstate(divide="ignore"):
        uc = uc_raw(profile, cost, t_mm, t_m, t_e)
    rows = []
    for te, u in zip(t_e, np.atleast_1d(uc)):
        uo = float(eval_uo(profile, t_m, te)) if np.isfinite(u) else -np.inf
        total = t_m + te + t_mm
        rows.append({"t": float(total), "u_o": uo, "cost": float(eval_cost(cost, total)), "u_c": float(u)})
    return rows


def partition_slices(profile, cost, t_mm: float, t_m_star: float, t_e_star: float, points: int = 101, span: float = 2.0):
    """Comprehensive value through the optimum along each axis.

    Returns ``(planning_slice, execution_slice)``: value against ``t_m`` with
    ``t_e`` held at ``t_e_star``, and against ``t_e`` with ``t_m`` held at
    ``t_m_star``.  Both grids run from 0 to ``span`` times the optimum and
    contain the optimum itself as a grid point.
    """
    def axis(center):
        hi = span * center if center > 0 else 1.0
        grid = np.linspace(0.0, hi, points)
        return np.unique(np.append(grid, center))

    tm = axis(t_m_star)
    te = axis(t_e_star)
    u_m = np.atleast_1d(uc_raw(profile, cost, t_mm, tm, t_e_star))
    u_e = np.atleast_1d(uc_raw(profile, cost, t_mm, t_m_star, te))
    planning = [{"t_m": float(x), "u_c": float(u)} for x, u in zip(tm, u_m)]
    execution = [{"t_e": float(x), "u_c": float(u)} for x, u in zip(te, u_e)]
    return planning, execution


def sweep(solve: Callable[[float], object], values: Iterable[float]) -> list[CurvePoint]:
    """Solve once per parameter value, in order, and collect curve points.

    ``solve`` returns a stopping, partition or goal solution.
    """
    rows = []
    for v in values:
        sol = solve(v)
        rows.append(
            CurvePoint(
                value=float(v),
                t_m_star=float(getattr(sol, "t_m_star", 0.0)),
                t_e_star=float(sol.t_e_star),
                t_star=float(sol.t_star),
                u_c_star=getattr(sol, "u_c_star", None),
                at_boundary=bool(sol.at_boundary),
            )
        )
    return rows
