"""Lifetime value of adding a planning capability.

An agent meets independent problem instances ``(c_i, k_i)`` at frequency
``F`` for ``lifetime`` seconds.  The value of one policy over another is
``lifetime * F * E[u*(A1, I) - u*(A2, I)]`` where ``u*`` is the optimal
value an agent with that policy obtains on instance ``I``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import ndtri

from .errors import ParameterError, SamplingError
from .models import (
    Exponential,
    LinearCost,
    LinearEfficacy,
    PartitionedExponential,
    PartitionedInversePower,
    _positive,
    _nonnegative,
    eval_uo,
)
from .partition import solve_partition_closed_form, solve_partition_grid
from .stopping import solve_stop_exponential, solve_stop_inverse_power

SHAPES = ("exponential", "inverse_power")
KINDS = ("reflection_only", "reflection_and_planning")
UTILITIES = ("comprehensive", "object")


@dataclass(frozen=True)
class ProblemInstance:
    c: float
    k: float

    def __post_init__(self):
        object.__setattr__(self, "c", _positive("c", self.c))
        object.__setattr__(self, "k", _positive("k", self.k))


@dataclass(frozen=True)
class DiscreteDistribution:
    instances: tuple
    probabilities: tuple

    def __post_init__(self):
        inst = tuple(i if isinstance(i, ProblemInstance) else ProblemInstance(*i) for i in self.instances)
        p = tuple(float(x) for x in self.probabilities)
        if len(inst) == 0 or len(inst) != len(p):
            raise ParameterError("need one probability per instance")
        if any(x < 0 for x in p) or abs(sum(p) - 1.0) > 1e-12:
            raise ParameterError("probabilities must be nonnegative and sum to 1")
        object.__setattr__(self, "instances", inst)
        object.__setattr__(self, "probabilities", p)


@dataclass(frozen=True)
class ProductLogUniform:
    """``log c`` and ``log k`` independent and uniform on their ranges."""

    c_range: tuple
    k_range: tuple

    def __post_init__(self):
        for name in ("c_range", "k_range"):
            lo, hi = (float(x) for x in getattr(self, name))
            if not (0 < lo <= hi and np.isfinite(hi)):
                raise ParameterError(f"{name} must satisfy 0 < low <= high")
            object.__setattr__(self, name, (lo, hi))

    def quantile(self, u_c, u_k):
        (clo, chi), (klo, khi) = self.c_range, self.k_range
        c = np.exp(np.log(clo) + u_c * (np.log(chi) - np.log(clo)))
        k = np.exp(np.log(klo) + u_k * (np.log(khi) - np.log(klo)))
        return c, k

    def sample(self, rng: np.random.Generator, n: int):
        (clo, chi), (klo, khi) = self.c_range, self.k_range
        c = np.exp(rng.uniform(np.log(clo), np.log(chi), n))
        k = np.exp(rng.uniform(np.log(klo), np.log(khi), n))
        return c, k


@dataclass(frozen=True)
class ProductLogNormal:
    """``log c ~ N(c_loc, c_scale)`` and ``log k ~ N(k_loc, k_scale)``, independent."""

    c_loc: float
    c_scale: float
    k_loc: float
    k_scale: float

    def __post_init__(self):
        _nonnegative("c_scale", self.c_scale)
        _nonnegative("k_scale", self.k_scale)

    def quantile(self, u_c, u_k):
        return (
            np.exp(self.c_loc + self.c_scale * ndtri(u_c)),
            np.exp(self.k_loc + self.k_scale * ndtri(u_k)),
        )

    def sample(self, rng: np.random.Generator, n: int):
        c = rng.lognormal(self.c_loc, self.c_scale, n)
        k = rng.lognormal(self.k_loc, self.k_scale, n)
        return c, k


@dataclass(frozen=True)
class Environment:
    distribution: object
    frequency: float
    lifetime: float

    def __post_init__(self):
        object.__setattr__(self, "frequency", _positive("frequency", self.frequency))
        object.__setattr__(self, "lifetime", _positive("lifetime", self.lifetime))


@dataclass(frozen=True)
class AgentPolicy:
    """How an agent handles each instance.

    ``shape`` selects the refinement family; ``a`` and ``b`` are the
    inverse-power exponents (ignored for the exponential shape).  ``l`` is
    the planning efficiency used by ``reflection_and_planning``.
    """

    kind: str = "reflection_only"
    shape: str = "exponential"
    a: float = 1.0
    b: float = 1.0
    l: float = 0.0
    t_mm: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"kind must be one of {KINDS}")
        if self.shape not in SHAPES:
            raise ParameterError(f"shape must be one of {SHAPES}")
        _positive("a", self.a)
        _positive("b", self.b)
        _nonnegative("l", self.l)
        _nonnegative("t_mm", self.t_mm)
        if self.kind == "reflection_and_planning" and not self.l > 0:
            raise ParameterError("a planning policy needs l > 0")


@dataclass(frozen=True)
class Valuation:
    value: float
    standard_error: float
    method: str
    samples: int = 0
    per_instance: Optional[np.ndarray] = field(default=None, repr=False, compare=False)


def instance_optimal_utility(policy: AgentPolicy, instance: ProblemInstance, utility: str = "comprehensive") -> float:
    """Optimal value an agent with ``policy`` obtains on ``instance``.

    ``utility="object"`` reports the object-level value at the agent's
    optimal times instead of the comprehensive value.
    """
    if utility not in UTILITIES:
        raise ParameterError(f"utility must be one of {UTILITIES}")
    c, k = instance.c, instance.k
    t_mm = policy.t_mm
    if policy.kind == "reflection_only":
        if policy.shape == "exponential":
            sol = solve_stop_exponential(k, c, t_mm)
            profile = Exponential(k)
        else:
            sol = solve_stop_inverse_power(k**policy.b, policy.a, c, t_mm)
            profile = PartitionedInversePower(LinearEfficacy(k, 0.0), b=policy.b, a=policy.a)
        t_m, t_e = 0.0, sol.t_e_star
    else:
        eff = LinearEfficacy(k, policy.l)
        if policy.shape == "exponential":
            profile = PartitionedExponential(eff)
            sol = solve_partition_grid(profile, LinearCost(c), t_mm)
        else:
            profile = PartitionedInversePower(eff, b=policy.b, a=policy.a)
            sol = solve_partition_closed_form(policy.a, policy.b, k, policy.l, c, t_mm)
        t_m, t_e = sol.t_m_star, sol.t_e_star
    if utility == "object":
        return float(eval_uo(profile, t_m, t_e))
    return sol.u_c_star


def _reflection_arrays(policy: AgentPolicy, c, k):
    if policy.shape == "exponential":
        with np.errstate(divide="ignore"):
            t_e = np.where(c < k, np.log(k / c) / k, 0.0)
        return np.zeros_like(t_e), t_e, -np.expm1(-k * t_e)
    kk = k**policy.b
    t_e = (policy.a / (kk * c)) ** (1.0 / (policy.a + 1.0))
    return np.zeros_like(t_e), t_e, 1.0 - 1.0 / (kk * t_e**policy.a)


def optimal_utilities(policy: AgentPolicy, c, k, utility: str = "comprehensive") -> np.ndarray:
    """Vectorised :func:`instance_optimal_utility` over arrays of instances.

    Uses the closed forms directly; planning agents with the exponential
    shape have none and go through the grid solver one instance at a time.
    """
    c = np.asarray(c, dtype=float)
    k = np.asarray(k, dtype=float)
    if policy.kind == "reflection_and_planning" and policy.shape == "exponential":
        return np.array([instance_optimal_utility(policy, ProblemInstance(ci, ki), utility) for ci, ki in zip(c, k)])
    t_m, t_e, u_o = _reflection_arrays(policy, c, k)
    if policy.kind == "reflection_and_planning":
        a, b, l = policy.a, policy.b, policy.l
        rate = np.exp(((a + 1) * np.log(b * l) - np.log(c) - a * np.log(a)) / (a + b + 1))
        plan = (rate - k) / l
        inner = plan > 0
        t_m = np.where(inner, plan, 0.0)
        t_e = np.where(inner, a / b * (k / l + t_m), t_e)
        u_o = 1.0 - 1.0 / (np.power(k + l * t_m, b) * t_e**a)
    if utility == "object":
        return u_o
    return u_o - c * (t_m + t_e + policy.t_mm)


def _gains(a1, a2, c, k, utility) -> np.ndarray:
    if a1 == a2:
        return np.zeros(len(c))
    return optimal_utilities(a1, c, k, utility) - optimal_utilities(a2, c, k, utility)


def value_of_metareasoning(
    env: Environment,
    a1: AgentPolicy,
    a2: AgentPolicy,
    method: str = "quadrature",
    seed: Optional[int] = None,
    samples: int = 10_000,
    order: int = 32,
    utility: str = "comprehensive",
) -> Valuation:
    """Lifetime gain of policy ``a1`` over ``a2`` in ``env``.

    ``quadrature`` sums exactly over a discrete distribution and uses a
    tensor Gauss-Legendre rule on the unit square of quantiles for the
    product families.  ``monte_carlo`` draws ``samples`` instances from a
    ``numpy`` generator seeded with ``seed`` and reports the standard error.
    """
    scale = env.lifetime * env.frequency
    dist = env.distribution
    if method == "quadrature":
        if isinstance(dist, DiscreteDistribution):
            c = np.array([i.c for i in dist.instances])
            k = np.array([i.k for i in dist.instances])
            gains = _gains(a1, a2, c, k, utility)
            weights = np.array(dist.probabilities)
        else:
            nodes, w = np.polynomial.legendre.leggauss(order)
            u = 0.5 * (nodes + 1.0)
            w = 0.5 * w
            uc, uk = np.meshgrid(u, u, indexing="ij")
            c, k = dist.quantile(uc.ravel(), uk.ravel())
            gains = _gains(a1, a2, c, k, utility)
            weights = np.outer(w, w).ravel()
        return Valuation(scale * float(np.dot(weights, gains)), 0.0, method, 0, gains)
    if method == "monte_carlo":
        if samples < 2:
            raise ParameterError("monte_carlo needs at least 2 samples")
        rng = np.random.default_rng(seed)
        if isinstance(dist, DiscreteDistribution):
            idx = rng.choice(len(dist.instances), size=samples, p=dist.probabilities)
            c = np.array([dist.instances[i].c for i in idx])
            k = np.array([dist.instances[i].k for i in idx])
        else:
            c, k = dist.sample(rng, samples)
        if not (np.all(c > 0) and np.all(k > 0) and np.all(np.isfinite(c)) and np.all(np.isfinite(k))):
            raise SamplingError("a drawn instance has a nonpositive or non-finite parameter")
        gains = _gains(a1, a2, c, k, utility)
        mean = float(np.mean(gains))
        se = float(np.std(gains, ddof=1) / np.sqrt(samples))
        return Valuation(scale * mean, scale * se, method, samples, gains)
    raise ParameterError("method must be 'quadrature' or 'monte_carlo'")

