"""Performance profiles, delay costs and planning efficacy.

Every family here exposes exact first and second derivatives so the
solvers never have to difference numerically.  Values are normalised so
that a complete solution is worth 1; delay cost is stored as a
nonnegative magnitude and subtracted in :func:`eval_uc`.

All evaluation functions accept floats or numpy arrays and return the
same kind.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import DomainError, ParameterError

ArrayLike = Union[float, np.ndarray]


def _out(x):
    if np.ndim(x) == 0:
        return float(x)
    return x


def _positive(name: str, value: float) -> float:
    value = float(value)
    if not np.isfinite(value) or value <= 0:
        raise ParameterError(f"{name} must be a positive finite number, got {value!r}")
    return value


def _nonnegative(name: str, value: float) -> float:
    value = float(value)
    if not np.isfinite(value) or value < 0:
        raise ParameterError(f"{name} must be a nonnegative finite number, got {value!r}")
    return value


def _check_times(**times) -> None:
    for name, t in times.items():
        arr = np.asarray(t, dtype=float)
        if np.any(np.isnan(arr)) or np.any(arr < 0):
            raise DomainError(f"{name} must be >= 0")


def _knots(name: str, points, *, strict_values: bool) -> tuple[np.ndarray, np.ndarray]:
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 2:
        raise ParameterError(f"{name} needs at least two (time, value) pairs")
    if not np.all(np.isfinite(pts)):
        raise ParameterError(f"{name} contains non-finite entries")
    t, v = pts[:, 0].copy(), pts[:, 1].copy()
    if t[0] != 0.0:
        raise ParameterError(f"{name} must start at time 0")
    if np.any(np.diff(t) <= 0):
        raise ParameterError(f"{name} times must be strictly increasing")
    dv = np.diff(v)
    if strict_values and np.any(dv <= 0):
        raise ParameterError(f"{name} values must be strictly increasing")
    if not strict_values and np.any(dv < 0):
        raise ParameterError(f"{name} values must be nondecreasing")
    return t, v


def _piecewise(t_knots: np.ndarray, v_knots: np.ndarray, x):
    """Piecewise-linear value and right slope, extrapolated with the end slopes."""
    x = np.asarray(x, dtype=float)
    slopes = np.diff(v_knots) / np.diff(t_knots)
    idx = np.clip(np.searchsorted(t_knots, x, side="right") - 1, 0, len(slopes) - 1)
    value = v_knots[idx] + slopes[idx] * (x - t_knots[idx])
    return value, slopes[idx]


# ---------------------------------------------------------------------------
# Metareasoning efficacy K(t_m)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LinearEfficacy:
    """``K(t_m) = k_o + l * t_m``.

    ``l = 0`` is accepted so that a "planning is useless" configuration can
    be expressed; solvers that need an interior coupling reject it.
    """

    k_o: float
    l: float

    def __post_init__(self):
        object.__setattr__(self, "k_o", _nonnegative("k_o", self.k_o))
        object.__setattr__(self, "l", _nonnegative("l", self.l))

    def value(self, t_m):
        return _out(self.k_o + self.l * np.asarray(t_m, dtype=float))

    def derivative(self, t_m):
        return _out(np.full_like(np.asarray(t_m, dtype=float), self.l))

    def second_derivative(self, t_m):
        return _out(np.zeros_like(np.asarray(t_m, dtype=float)))


@dataclass(frozen=True)
class TabulatedEfficacy:
    """Piecewise-linear K through ``points`` (first knot at ``t_m = 0``).

    Beyond the last knot K continues with the final slope.  At a knot the
    derivative is the slope of the segment to the right.
    """

    points: tuple
    _t: np.ndarray = field(init=False, repr=False, compare=False)
    _v: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        t, v = _knots("efficacy table", self.points, strict_values=False)
        if v[0] < 0:
            raise ParameterError("efficacy table values must be nonnegative")
        object.__setattr__(self, "points", tuple((float(a), float(b)) for a, b in zip(t, v)))
        object.__setattr__(self, "_t", t)
        object.__setattr__(self, "_v", v)

    @property
    def k_o(self) -> float:
        return float(self._v[0])

    def value(self, t_m):
        return _out(_piecewise(self._t, self._v, t_m)[0])

    def derivative(self, t_m):
        return _out(_piecewise(self._t, self._v, t_m)[1])

    def second_derivative(self, t_m):
        return _out(np.zeros_like(np.asarray(t_m, dtype=float)))


MetaEfficacy = Union[LinearEfficacy, TabulatedEfficacy]


# ---------------------------------------------------------------------------
# Delay cost C(t)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LinearCost:
    """``C(t) = c * t``."""

    c: float

    def __post_init__(self):
        object.__setattr__(self, "c", _positive("c", self.c))

    def value(self, t):
        return _out(self.c * np.asarray(t, dtype=float))

    def derivative(self, t):
        return _out(np.full_like(np.asarray(t, dtype=float), self.c))

    def second_derivative(self, t):
        return _out(np.zeros_like(np.asarray(t, dtype=float)))


@dataclass(frozen=True)
class PowerCost:
    """``C(t) = c * t**p`` with ``p >= 1``."""

    c: float
    p: float

    def __post_init__(self):
        object.__setattr__(self, "c", _positive("c", self.c))
        p = float(self.p)
        if not np.isfinite(p) or p < 1:
            raise ParameterError(f"p must be >= 1, got {p!r}")
        object.__setattr__(self, "p", p)

    def value(self, t):
        return _out(self.c * np.asarray(t, dtype=float) ** self.p)

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        if self.p == 1:
            return _out(np.full_like(t, self.c))
        return _out(self.c * self.p * t ** (self.p - 1))

    def second_derivative(self, t):
        t = np.asarray(t, dtype=float)
        if self.p == 1:
            return _out(np.zeros_like(t))
        if self.p == 2:
            return _out(np.full_like(t, 2 * self.c))
        with np.errstate(divide="ignore"):
            return _out(self.c * self.p * (self.p - 1) * t ** (self.p - 2))


@dataclass(frozen=True)
class TabulatedCost:
    """Piecewise-linear cost through ``points``; must start at ``(0, 0)``."""

    points: tuple
    _t: np.ndarray = field(init=False, repr=False, compare=False)
    _v: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        t, v = _knots("cost table", self.points, strict_values=True)
        if v[0] != 0.0:
            raise ParameterError("cost table must start at (0, 0)")
        object.__setattr__(self, "points", tuple((float(a), float(b)) for a, b in zip(t, v)))
        object.__setattr__(self, "_t", t)
        object.__setattr__(self, "_v", v)

    def value(self, t):
        return _out(_piecewise(self._t, self._v, t)[0])

    def derivative(self, t):
        return _out(_piecewise(self._t, self._v, t)[1])

    def second_derivative(self, t):
        return _out(np.zeros_like(np.asarray(t, dtype=float)))


CostModel = Union[LinearCost, PowerCost, TabulatedCost]


# ---------------------------------------------------------------------------
# Performance profiles u_o
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Exponential:
    """``u_o(t_e) = 1 - exp(-k t_e)``."""

    k: float

    def __post_init__(self):
        object.__setattr__(self, "k", _positive("k", self.k))


@dataclass(frozen=True)
class InversePower:
    """``u_o(t_e) = 1 - 1 / (k t_e**a)``."""

    k: float
    a: float

    def __post_init__(self):
        object.__setattr__(self, "k", _positive("k", self.k))
        object.__setattr__(self, "a", _positive("a", self.a))


@dataclass(frozen=True)
class PartitionedExponential:
    """``u_o(t_m, t_e) = 1 - exp(-K(t_m) t_e)``."""

    efficacy: MetaEfficacy


@dataclass(frozen=True)
class PartitionedInversePower:
    """``u_o(t_m, t_e) = 1 - 1 / (K(t_m)**b t_e**a)``."""

    efficacy: MetaEfficacy
    b: float
    a: float

    def __post_init__(self):
        object.__setattr__(self, "b", _positive("b", self.b))
        object.__setattr__(self, "a", _positive("a", self.a))


PerformanceProfile = Union[Exponential, InversePower, PartitionedExponential, PartitionedInversePower]
PARTITIONED = (PartitionedExponential, PartitionedInversePower)
INVERSE_POWER = (InversePower, PartitionedInversePower)


def is_partitioned(profile) -> bool:
    return isinstance(profile, PARTITIONED)


def at_planning_time(profile, t_m: float = 0.0):
    """Freeze the planning time of a partitioned profile.

    Returns the equivalent non-partitioned profile, e.g. a partitioned
    inverse-power profile becomes ``InversePower(k=K(t_m)**b, a)``.
    """
    if not is_partitioned(profile):
        return profile
    K = float(profile.efficacy.value(t_m))
    if isinstance(profile, PartitionedExponential):
        return Exponential(K)
    return InversePower(K**profile.b, profile.a)


def _rate(profile, t_m):
    """K, K', K'' for partitioned profiles; (k, 0, 0) otherwise."""
    if is_partitioned(profile):
        eff = profile.efficacy
        t_m = np.asarray(t_m, dtype=float)
        return eff.value(t_m), eff.derivative(t_m), eff.second_derivative(t_m)
    k = profile.k
    return k, 0.0, 0.0


def _uo_raw(profile, t_m, t_e):
    t_e = np.asarray(t_e, dtype=float)
    K, _, _ = _rate(profile, t_m)
    if isinstance(profile, (Exponential, PartitionedExponential)):
        return -np.expm1(-K * t_e)
    b = getattr(profile, "b", 1.0)
    return 1.0 - 1.0 / (np.power(K, b) * t_e**profile.a)


def _uo_grad_raw(profile, t_m, t_e):
    """(du_o/dt_m, du_o/dt_e)."""
    t_e = np.asarray(t_e, dtype=float)
    K, dK, _ = _rate(profile, t_m)
    if isinstance(profile, (Exponential, PartitionedExponential)):
        decay = np.exp(-K * t_e)
        return dK * t_e * decay, K * decay
    a = profile.a
    b = getattr(profile, "b", 1.0)
    inv = 1.0 / (np.power(K, b) * t_e**a)
    return b * dK / K * inv, a / t_e * inv


def _uo_hessian_raw(profile, t_m, t_e):
    """(d2/dt_m2, d2/dt_m dt_e, d2/dt_e2) of u_o."""
    t_e = np.asarray(t_e, dtype=float)
    K, dK, d2K = _rate(profile, t_m)
    if isinstance(profile, (Exponential, PartitionedExponential)):
        decay = np.exp(-K * t_e)
        mm = (d2K * t_e - dK**2 * t_e**2) * decay
        me = dK * (1.0 - K * t_e) * decay
        ee = -(K**2) * decay
        return mm, me, ee
    a = profile.a
    b = getattr(profile, "b", 1.0)
    inv = 1.0 / (np.power(K, b) * t_e**a)
    if is_partitioned(profile):
        mm = b * inv * (d2K / K - (b + 1) * dK**2 / K**2)
        me = -a * b * dK / (K * t_e) * inv
    else:
        mm = me = np.zeros_like(inv)
    ee = -a * (a + 1) / t_e**2 * inv
    return mm, me, ee


def _check_profile_domain(profile, t_m, t_e) -> None:
    _check_times(t_m=t_m, t_e=t_e)
    if isinstance(profile, INVERSE_POWER) and np.any(np.asarray(t_e) == 0):
        raise DomainError("inverse-power profiles are undefined at t_e = 0")
    if is_partitioned(profile) and isinstance(profile, PartitionedInversePower):
        if np.any(np.asarray(profile.efficacy.value(t_m)) <= 0):
            raise DomainError("inverse-power profiles need K(t_m) > 0")


def eval_uo(profile, t_m, t_e):
    """Object-level value of a result after ``t_m`` planning and ``t_e`` execution.

    ``t_m`` is ignored by non-partitioned profiles.
    """
    _check_profile_domain(profile, t_m, t_e)
    return _out(_uo_raw(profile, t_m, t_e))


def eval_uo_derivative(profile, t_m, t_e, which: str = "wrt_te"):
    """Analytic partial derivative of u_o, ``which`` in {"wrt_te", "wrt_tm"}."""
    if which not in ("wrt_te", "wrt_tm"):
        raise ValueError(f"which must be 'wrt_te' or 'wrt_tm', got {which!r}")
    _check_profile_domain(profile, t_m, t_e)
    d_tm, d_te = _uo_grad_raw(profile, t_m, t_e)
    d = d_te if which == "wrt_te" else d_tm
    return _out(np.broadcast_to(d, np.broadcast(np.asarray(t_m), np.asarray(t_e)).shape) * 1.0)


def eval_uo_hessian(profile, t_m, t_e) -> np.ndarray:
    """2x2 matrix of second partials of u_o in (t_m, t_e) order."""
    _check_profile_domain(profile, t_m, t_e)
    mm, me, ee = (float(x) for x in _uo_hessian_raw(profile, t_m, t_e))
    return np.array([[mm, me], [me, ee]])


def eval_cost(cost, t):
    """Nonnegative delay cost after total elapsed time ``t``."""
    _check_times(t=t)
    return _out(cost.value(t))


def eval_cost_derivative(cost, t):
    _check_times(t=t)
    return _out(cost.derivative(t))


def eval_cost_second_derivative(cost, t):
    _check_times(t=t)
    return _out(cost.second_derivative(t))


def eval_uc(profile, cost, t_mm: float, t_m, t_e):
    """Comprehensive value: object-level value minus the cost of all elapsed time."""
    _check_times(t_mm=t_mm)
    uo = eval_uo(profile, t_m, t_e)
    total = np.asarray(t_m, dtype=float) + np.asarray(t_e, dtype=float) + t_mm
    return _out(uo - cost.value(total))


def uc_raw(profile, cost, t_mm: float, t_m, t_e):
    """:func:`eval_uc` without domain checks; invalid points give ``-inf``.

    Intended for grid objectives that sweep across domain edges.
    """
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        t_m = np.asarray(t_m, dtype=float)
        t_e = np.asarray(t_e, dtype=float)
        val = _uo_raw(profile, t_m, t_e) - cost.value(t_m + t_e + t_mm)
    val = np.where(np.isnan(val), -np.inf, val)
    return _out(val)
