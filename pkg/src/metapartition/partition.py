"""Joint choice of planning time and execution time.

Planning raises the refinement rate K(t_m) of the subsequent execution
phase; both phases are charged to the same delay cost.  For the
partitioned inverse-power profile the two first-order conditions reduce
to a coupling t_e = a K / (b K') and a single equation in t_m, which has
a closed form for linear K and linear cost and is solved by sign scan
and bisection otherwise.  Profiles without that structure fall back to
the 2-D grid oracle.

Every solver also evaluates the "no planning" corner t_m = 0, so planning
can never look worse than not planning.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _search
from .errors import DegenerateEfficacyError, DomainError, ParameterError
from .models import (
    InversePower,
    LinearCost,
    LinearEfficacy,
    PartitionedExponential,
    PartitionedInversePower,
    TabulatedCost,
    TabulatedEfficacy,
    _nonnegative,
    _positive,
    _uo_grad_raw,
    _uo_hessian_raw,
    at_planning_time,
    eval_uc,
    is_partitioned,
    uc_raw,
)
from .oracle import OracleConfig, finite_diff, grid_max_2d
from .stopping import solve_stop

HESSIAN_TOL = 1e-10


@dataclass(frozen=True)
class PartitionSolution:
    t_m_star: float
    t_e_star: float
    t_star: float
    u_c_star: float
    hessian_ok: bool
    at_boundary: bool
    method: str


@dataclass(frozen=True)
class HessianCheck:
    """Second-order test at a candidate optimum.

    ``ok`` requires both stationarity (gradient within ``tol_grad`` in every
    free coordinate) and a negative semidefinite Hessian on the free
    coordinates.
    """

    ok: bool
    negative_semidefinite: bool
    stationary: bool
    matrix: np.ndarray
    eigenvalues: np.ndarray
    gradient: np.ndarray


def execution_time_given_planning(a: float, b: float, efficacy, t_m: float) -> float:
    """Optimal execution time once ``t_m`` has been spent planning: ``a K / (b K')``."""
    dK = float(efficacy.derivative(t_m))
    if dK == 0:
        raise DegenerateEfficacyError(f"K'({t_m}) = 0: planning has no marginal effect")
    return a * float(efficacy.value(t_m)) / (b * dK)


def _make_solution(profile, cost, t_mm, t_m, t_e, method, tol_grad=_search.TOL_FOC) -> PartitionSolution:
    t_m, t_e = float(t_m), float(t_e)
    return PartitionSolution(
        t_m_star=t_m,
        t_e_star=t_e,
        t_star=t_m + t_e + t_mm,
        u_c_star=float(eval_uc(profile, cost, t_mm, t_m, t_e)),
        hessian_ok=check_hessian(profile, cost, t_mm, t_m, t_e, tol_grad=tol_grad).ok,
        at_boundary=t_m == 0.0,
        method=method,
    )


def _no_planning(profile, cost, t_mm, search):
    """Best execution time with planning pinned at zero, or None if K(0) = 0."""
    K0 = float(profile.efficacy.value(0.0))
    # K(0)**b can underflow for tiny base rates; that corner is worth -inf anyway.
    if K0 <= 0 or (isinstance(profile, PartitionedInversePower) and not K0**profile.b > 0):
        return None
    return solve_stop(at_planning_time(profile, 0.0), cost, t_mm, search)


def optimal_rate(a: float, b: float, l: float, c: float) -> float:
    """Refinement rate at the optimum for linear efficacy and linear cost."""
    log_k = ((a + 1) * math.log(b * l) - math.log(c) - a * math.log(a)) / (a + b + 1)
    return math.exp(log_k)


def solve_partition_closed_form(
    a: float, b: float, k_o: float, l: float, c: float, t_mm: float = 0.0
) -> PartitionSolution:
    """Closed-form partition for ``K = k_o + l t_m`` and cost ``c * t``.

    If the base rate already exceeds the optimal rate, planning is not
    worth its cost: ``t_m = 0`` and ``t_e`` solves the plain stopping problem
    at rate ``k_o``.
    """
    a, b, l, c = (_positive(n, v) for n, v in (("a", a), ("b", b), ("l", l), ("c", c)))
    k_o = _nonnegative("k_o", k_o)
    t_mm = _nonnegative("t_mm", t_mm)
    profile = PartitionedInversePower(LinearEfficacy(k_o, l), b=b, a=a)
    cost = LinearCost(c)
    t_m = (optimal_rate(a, b, l, c) - k_o) / l
    if t_m <= 0:
        stop = _no_planning(profile, cost, t_mm, None)
        return _make_solution(profile, cost, t_mm, 0.0, stop.t_e_star, "closed_form")
    t_e = a / b * (k_o / l + t_m)
    return _make_solution(profile, cost, t_mm, t_m, t_e, "closed_form")


def planning_residual(a: float, b: float, efficacy, cost, t_mm: float, t_m):
    """K(t_m) minus the rate at which planning and execution break even.

    Negative while more planning pays.  The cost slope is taken at the total
    elapsed time implied by the optimal execution time for this ``t_m``.
    Where K' = 0 the residual is K itself (planning is pointless there).
    """
    t_m = np.asarray(t_m, dtype=float)
    K = np.asarray(efficacy.value(t_m), dtype=float)
    dK = np.asarray(efficacy.derivative(t_m), dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        t_e = a * K / (b * dK)
        slope = np.asarray(cost.derivative(t_m + t_e + t_mm), dtype=float)
        rhs = ((b * dK) ** (a + 1) / (a**a * slope)) ** (1.0 / (a + b + 1))
        res = K - rhs
    return np.where(dK > 0, res, K)


def solve_partition_fixed_point(
    a: float,
    b: float,
    efficacy,
    cost,
    t_mm: float = 0.0,
    search: Optional[OracleConfig] = None,
) -> PartitionSolution:
    """Partition for the inverse-power profile with any efficacy and cost.

    Every root of :func:`planning_residual` on the search bracket is a
    candidate, as is ``t_m = 0``; the one with the highest comprehensive
    value wins.
    """
    a, b = _positive("a", a), _positive("b", b)
    t_mm = _nonnegative("t_mm", t_mm)
    cfg = search or OracleConfig()
    profile = PartitionedInversePower(efficacy, b=b, a=a)

    def g(t_m):
        return planning_residual(a, b, efficacy, cost, t_mm, t_m)

    if cfg.bracket_hint is not None:
        hi = float(cfg.bracket_hint[1])
    else:
        hi = cfg.initial_upper
        if isinstance(efficacy, TabulatedEfficacy):
            hi = max(hi, efficacy.points[-1][0])
        hi = _search.expand_until(g, hi, cfg.max_doublings)
    scan = np.linspace(0.0, hi, cfg.points(1))
    if not np.any(np.asarray(efficacy.derivative(scan)) > 0):
        raise DegenerateEfficacyError("K' vanishes on the whole search bracket")

    candidates = []
    for t_m in _search.scan_roots(g, 0.0, hi, cfg.points(1)):
        if t_m > 0 and float(efficacy.derivative(t_m)) > 0:
            candidates.append((t_m, execution_time_given_planning(a, b, efficacy, t_m)))
    base = _no_planning(profile, cost, t_mm, None)
    if base is not None:
        candidates.insert(0, (0.0, base.t_e_star))
    if not candidates:
        raise DomainError("no feasible partition found on the search bracket")
    (t_m, t_e), _ = _search.best_of(
        candidates, lambda p: float(eval_uc(profile, cost, t_mm, p[0], p[1]))
    )
    return _make_solution(profile, cost, t_mm, t_m, t_e, "fixed_point")


def solve_partition_grid(
    profile, cost, t_mm: float = 0.0, search: Optional[OracleConfig] = None
) -> PartitionSolution:
    """Partition by 2-D grid refinement, for profiles with no coupling formula."""
    if not is_partitioned(profile):
        raise ParameterError("solve_partition_grid needs a partitioned profile")
    t_mm = _nonnegative("t_mm", t_mm)
    cfg = search or OracleConfig()
    res = grid_max_2d(lambda tm, te: uc_raw(profile, cost, t_mm, tm, te), cfg)
    t_m, t_e = res.argument
    base = _no_planning(profile, cost, t_mm, None)
    if base is not None and base.u_c_star >= res.value:
        t_m, t_e = 0.0, base.t_e_star
    H = check_hessian(profile, cost, t_mm, t_m, t_e).matrix
    tol_grad = max(_search.TOL_FOC, 2.0 * float(np.max(np.abs(H))) * max(res.resolution))
    return _make_solution(profile, cost, t_mm, t_m, t_e, "grid_2d", tol_grad)


def solve_partition(
    profile, cost, t_mm: float = 0.0, search: Optional[OracleConfig] = None
) -> PartitionSolution:
    """Pick the most exact solver available for the profile and cost.

    Degenerate efficacy (K' = 0) falls back to the stopping-only solve.
    """
    if not is_partitioned(profile):
        raise ParameterError("solve_partition needs a partitioned profile")
    eff = profile.efficacy
    if isinstance(profile, PartitionedExponential):
        return solve_partition_grid(profile, cost, t_mm, search)
    try:
        if isinstance(eff, LinearEfficacy) and isinstance(cost, LinearCost) and eff.l > 0:
            return solve_partition_closed_form(profile.a, profile.b, eff.k_o, eff.l, cost.c, t_mm)
        return solve_partition_fixed_point(profile.a, profile.b, eff, cost, t_mm, search)
    except DegenerateEfficacyError:
        stop = _no_planning(profile, cost, t_mm, search)
        if stop is None:
            raise
        return _make_solution(profile, cost, t_mm, 0.0, stop.t_e_star, "fixed_point")


def _analytic_derivatives(profile, cost, t_mm, t_m, t_e):
    T = t_m + t_e + t_mm
    # Huge execution times (tiny base rates) overflow t_e**2 harmlessly to a zero curvature.
    with np.errstate(over="ignore"):
        d_tm, d_te = (float(x) for x in _uo_grad_raw(profile, t_m, t_e))
        mm, me, ee = (float(x) for x in _uo_hessian_raw(profile, t_m, t_e))
    slope = float(cost.derivative(T))
    curv = float(cost.second_derivative(T))
    grad = np.array([d_tm - slope, d_te - slope])
    H = np.array([[mm - curv, me - curv], [me - curv, ee - curv]])
    return grad, H


def _numeric_derivatives(profile, cost, t_mm, t_m, t_e):
    def f(x, y):
        return float(eval_uc(profile, cost, t_mm, x, y))

    hm = 1e-5 * max(1.0, t_m)
    he = 1e-5 * max(1.0, t_e)
    if t_m >= hm:
        g_m = finite_diff(lambda x: f(x, t_e), t_m, 1, hm)
    else:
        g_m = (f(t_m + hm, t_e) - f(t_m, t_e)) / hm
    grad = np.array([g_m, finite_diff(lambda y: f(t_m, y), t_e, 1, he)])
    ee = finite_diff(lambda y: f(t_m, y), t_e, 2, he)
    tm0 = max(t_m, hm)
    mm = finite_diff(lambda x: f(x, t_e), tm0, 2, hm)
    me = (f(tm0 + hm, t_e + he) - f(tm0 + hm, t_e - he) - f(tm0 - hm, t_e + he) + f(tm0 - hm, t_e - he)) / (4 * hm * he)
    return grad, np.array([[mm, me], [me, ee]])


def check_hessian(profile, cost, t_mm: float, t_m: float, t_e: float, tol_grad: float = _search.TOL_FOC) -> HessianCheck:
    """Gradient and Hessian of comprehensive value at ``(t_m, t_e)``.

    A coordinate sitting at 0 with nonpositive slope is pinned to its bound
    and left out of both the stationarity and the curvature test.

    Analytic for parametric families; tabulated efficacy or cost is
    differenced numerically.
    """
    if t_m < 0 or t_e < 0:
        raise DomainError("check_hessian needs nonnegative times")
    if t_e == 0 and isinstance(profile, (PartitionedInversePower, InversePower)):
        raise DomainError("inverse-power profiles are undefined at t_e = 0")
    tabulated = isinstance(cost, TabulatedCost) or isinstance(getattr(profile, "efficacy", None), TabulatedEfficacy)
    if tabulated:
        grad, H = _numeric_derivatives(profile, cost, t_mm, float(t_m), float(t_e))
    else:
        grad, H = _analytic_derivatives(profile, cost, t_mm, float(t_m), float(t_e))
    free = [i for i, x in enumerate((t_m, t_e)) if not (x == 0 and grad[i] <= 0)]
    eig = np.linalg.eigvalsh(H[np.ix_(free, free)]) if free else np.zeros(0)
    stationary = bool(np.all(np.abs(grad[free]) <= tol_grad))
    nsd = bool(np.all(eig <= HESSIAN_TOL))
    return HessianCheck(nsd and stationary, nsd, stationary, H, eig, grad)
