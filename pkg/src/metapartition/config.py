"""JSON run configurations and reports.

A configuration names one task and describes the model it runs on::

    {
      "task": "stopping",
      "model": {
        "profile": {"type": "exponential", "k": 0.1},
        "cost": {"type": "linear", "c": 0.04},
        "t_mm": 0.01
      },
      "sweep": {"parameter": "cost.c", "start": 0.01, "stop": 0.2, "points": 50},
      "output": {"format": "csv", "path": "-"}
    }

See ``configs/`` in the repository for one file per task.  Structural
problems are reported by :class:`ConfigError` with the dotted path of the
offending field.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from typing import Any, Optional

import jsonschema
import numpy as np

from .environment import (
    AgentPolicy,
    DiscreteDistribution,
    Environment,
    ProblemInstance,
    ProductLogNormal,
    ProductLogUniform,
)
from .errors import MetapartitionError
from .goal import GoalSpec
from .models import (
    Exponential,
    InversePower,
    LinearCost,
    LinearEfficacy,
    PartitionedExponential,
    PartitionedInversePower,
    PowerCost,
    TabulatedCost,
    TabulatedEfficacy,
)
from .oracle import OracleConfig

TASKS = ("stopping", "partition", "goal", "environment")


class ConfigError(MetapartitionError, ValueError):
    """The configuration is malformed; ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


_num = {"type": "number"}
_points = {"type": "array", "minItems": 2, "items": {"type": "array", "minItems": 2, "maxItems": 2, "items": _num}}

_profile = {
    "type": "object",
    "required": ["type"],
    "properties": {
        "type": {"enum": ["exponential", "inverse_power", "partitioned_exponential", "partitioned_inverse_power"]},
        "k": _num,
        "a": _num,
        "b": _num,
    },
    "additionalProperties": False,
}
_cost = {
    "type": "object",
    "required": ["type"],
    "properties": {"type": {"enum": ["linear", "power", "tabulated"]}, "c": _num, "p": _num, "points": _points},
    "additionalProperties": False,
}
_efficacy = {
    "type": "object",
    "required": ["type"],
    "properties": {"type": {"enum": ["linear", "tabulated"]}, "k_o": _num, "l": _num, "points": _points},
    "additionalProperties": False,
}
_policy = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["reflection_only", "reflection_and_planning"]},
        "shape": {"enum": ["exponential", "inverse_power"]},
        "a": _num,
        "b": _num,
        "l": _num,
        "t_mm": _num,
    },
    "additionalProperties": False,
}
_distribution = {
    "type": "object",
    "required": ["type"],
    "properties": {
        "type": {"enum": ["discrete", "log_uniform", "log_normal"]},
        "instances": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["c", "k", "p"],
                "properties": {"c": _num, "k": _num, "p": _num},
                "additionalProperties": False,
            },
        },
        "c_range": {"type": "array", "minItems": 2, "maxItems": 2, "items": _num},
        "k_range": {"type": "array", "minItems": 2, "maxItems": 2, "items": _num},
        "c_loc": _num,
        "c_scale": _num,
        "k_loc": _num,
        "k_scale": _num,
    },
    "additionalProperties": False,
}

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["task", "model"],
    "properties": {
        "task": {"enum": list(TASKS)},
        "model": {
            "type": "object",
            "properties": {
                "profile": _profile,
                "cost": _cost,
                "efficacy": _efficacy,
                "t_mm": _num,
                "f": _num,
                "method": {"enum": ["auto", "closed_form", "fixed_point", "grid_2d", "marginal_search"]},
                "distribution": _distribution,
                "frequency": _num,
                "lifetime": _num,
                "a1": _policy,
                "a2": _policy,
                "valuation": {"enum": ["quadrature", "monte_carlo"]},
                "order": {"type": "integer", "minimum": 1},
                "samples": {"type": "integer", "minimum": 2},
                "seed": {"type": "integer"},
                "utility": {"enum": ["comprehensive", "object"]},
            },
            "additionalProperties": False,
        },
        "sweep": {
            "type": "object",
            "required": ["parameter"],
            "properties": {
                "parameter": {"type": "string"},
                "start": _num,
                "stop": _num,
                "points": {"type": "integer", "minimum": 2},
                "scale": {"enum": ["linear", "log"]},
                "values": {"type": "array", "minItems": 2, "items": _num},
            },
            "additionalProperties": False,
        },
        "curve": {
            "type": "object",
            "properties": {"start": _num, "stop": _num, "points": {"type": "integer", "minimum": 2}},
            "additionalProperties": False,
        },
        "slices": {
            "type": "object",
            "properties": {"points": {"type": "integer", "minimum": 3}, "span": _num},
            "additionalProperties": False,
        },
        "search": {
            "type": "object",
            "properties": {
                "bracket_hint": {"type": "array", "minItems": 2, "maxItems": 2},
                "max_doublings": {"type": "integer", "minimum": 1},
                "coarse_points": {"type": "integer", "minimum": 3},
                "refinement_rounds": {"type": "integer", "minimum": 0},
                "shrink_factor": _num,
                "lower": _num,
                "initial_upper": _num,
            },
            "additionalProperties": False,
        },
        "output": {
            "type": "object",
            "properties": {"format": {"enum": ["csv", "json", "text"]}, "path": {"type": "string"}},
            "additionalProperties": False,
        },
    },
    "additionalProperties": False,
}

_row = {"type": "object", "additionalProperties": {"type": ["number", "boolean", "null", "string"]}}

REPORT_SCHEMA = {
    "type": "object",
    "required": ["task", "config"],
    "properties": {
        "task": {"enum": list(TASKS)},
        "config": CONFIG_SCHEMA,
        "solution": _row,
        "rows": {"type": "array", "items": _row},
        "curve": {"type": "array", "items": _row},
        "slices": {
            "type": "object",
            "required": ["planning", "execution"],
            "properties": {"planning": {"type": "array", "items": _row}, "execution": {"type": "array", "items": _row}},
        },
        "diagnostics": {"type": "object"},
    },
    "additionalProperties": False,
}


def _path(err: jsonschema.ValidationError) -> str:
    return ".".join(str(p) for p in err.absolute_path)


def _validate(doc: Any, schema: dict) -> None:
    validator = jsonschema.Draft7Validator(schema)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        raise ConfigError(_path(err), err.message)


# ---------------------------------------------------------------------------


def _need(d: dict, key: str, where: str):
    if key not in d:
        raise ConfigError(f"{where}.{key}", "is required")
    return d[key]


def _build(where: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except ConfigError:
        raise
    except (MetapartitionError, ValueError, TypeError) as exc:
        raise ConfigError(where, str(exc)) from exc


def build_efficacy(d: dict, where: str = "model.efficacy"):
    if d["type"] == "linear":
        return _build(where, LinearEfficacy, _need(d, "k_o", where), _need(d, "l", where))
    return _build(where, TabulatedEfficacy, _need(d, "points", where))


def build_cost(d: dict, where: str = "model.cost"):
    kind = d["type"]
    if kind == "linear":
        return _build(where, LinearCost, _need(d, "c", where))
    if kind == "power":
        return _build(where, PowerCost, _need(d, "c", where), _need(d, "p", where))
    return _build(where, TabulatedCost, _need(d, "points", where))


def build_profile(d: dict, efficacy=None, where: str = "model.profile"):
    kind = d["type"]
    if kind == "exponential":
        return _build(where, Exponential, _need(d, "k", where))
    if kind == "inverse_power":
        return _build(where, InversePower, _need(d, "k", where), _need(d, "a", where))
    if efficacy is None:
        raise ConfigError("model.efficacy", f"is required for a {kind} profile")
    if kind == "partitioned_exponential":
        return PartitionedExponential(efficacy)
    return _build(where, PartitionedInversePower, efficacy, b=_need(d, "b", where), a=_need(d, "a", where))


def build_policy(d: dict, where: str) -> AgentPolicy:
    return _build(where, AgentPolicy, **d)


def build_distribution(d: dict, where: str = "model.distribution"):
    kind = d["type"]
    if kind == "discrete":
        inst = _need(d, "instances", where)
        return _build(
            where,
            DiscreteDistribution,
            tuple(_build(f"{where}.instances.{i}", ProblemInstance, e["c"], e["k"]) for i, e in enumerate(inst)),
            tuple(e["p"] for e in inst),
        )
    if kind == "log_uniform":
        return _build(where, ProductLogUniform, tuple(_need(d, "c_range", where)), tuple(_need(d, "k_range", where)))
    return _build(
        where,
        ProductLogNormal,
        _need(d, "c_loc", where),
        _need(d, "c_scale", where),
        _need(d, "k_loc", where),
        _need(d, "k_scale", where),
    )


def build_search(d: Optional[dict]) -> OracleConfig:
    d = dict(d or {})
    if "bracket_hint" in d:
        d["bracket_hint"] = tuple(d["bracket_hint"])
    return _build("search", OracleConfig, **d)


@dataclass
class Model:
    """Solver inputs for one task, built from a ``model`` section."""

    task: str
    t_mm: float = 0.0
    profile: Any = None
    cost: Any = None
    efficacy: Any = None
    method: str = "auto"
    goal: Optional[GoalSpec] = None
    environment: Optional[Environment] = None
    a1: Optional[AgentPolicy] = None
    a2: Optional[AgentPolicy] = None
    valuation: dict = field(default_factory=dict)


def build_model(task: str, m: dict) -> Model:
    t_mm = float(m.get("t_mm", 0.0))
    if t_mm < 0:
        raise ConfigError("model.t_mm", "must be >= 0")
    method = m.get("method", "auto")
    if task == "stopping":
        profile = build_profile(_need(m, "profile", "model"))
        if profile.__class__ not in (Exponential, InversePower):
            raise ConfigError("model.profile.type", "the stopping task needs a non-partitioned profile")
        return Model(task, t_mm, profile, build_cost(_need(m, "cost", "model")), method=method)
    if task == "partition":
        eff = build_efficacy(_need(m, "efficacy", "model"))
        profile = build_profile(_need(m, "profile", "model"), eff)
        if profile.__class__ not in (PartitionedExponential, PartitionedInversePower):
            raise ConfigError("model.profile.type", "the partition task needs a partitioned profile")
        return Model(task, t_mm, profile, build_cost(_need(m, "cost", "model")), eff, method)
    if task == "goal":
        eff = build_efficacy(_need(m, "efficacy", "model"))
        spec = _build("model.f", GoalSpec, _need(m, "f", "model"), eff, t_mm)
        return Model(task, t_mm, efficacy=eff, method=method, goal=spec)
    env = _build(
        "model",
        Environment,
        build_distribution(_need(m, "distribution", "model")),
        _need(m, "frequency", "model"),
        _need(m, "lifetime", "model"),
    )
    valuation = {
        "method": m.get("valuation", "quadrature"),
        "order": m.get("order", 32),
        "samples": m.get("samples", 10_000),
        "seed": m.get("seed", 0),
        "utility": m.get("utility", "comprehensive"),
    }
    return Model(
        task,
        t_mm,
        environment=env,
        a1=build_policy(_need(m, "a1", "model"), "model.a1"),
        a2=build_policy(_need(m, "a2", "model"), "model.a2"),
        valuation=valuation,
    )


def _set_path(doc: dict, dotted: str, value: float) -> dict:
    out = copy.deepcopy(doc)
    node = out
    keys = dotted.split(".")
    for key in keys[:-1]:
        if not isinstance(node, dict) or key not in node:
            raise ConfigError("sweep.parameter", f"{dotted!r} does not name a model field")
        node = node[key]
    if not isinstance(node, dict) or not isinstance(node.get(keys[-1]), (int, float)) or isinstance(node.get(keys[-1]), bool):
        raise ConfigError("sweep.parameter", f"{dotted!r} does not name a numeric model field")
    node[keys[-1]] = value
    return out


def sweep_values(s: dict) -> list[float]:
    if "values" in s:
        return [float(v) for v in s["values"]]
    for key in ("start", "stop", "points"):
        if key not in s:
            raise ConfigError(f"sweep.{key}", "is required unless sweep.values is given")
    start, stop, n = float(s["start"]), float(s["stop"]), int(s["points"])
    if s.get("scale", "linear") == "log":
        if start <= 0 or stop <= 0:
            raise ConfigError("sweep.start", "log sweeps need positive endpoints")
        return [float(v) for v in np.geomspace(start, stop, n)]
    return [float(v) for v in np.linspace(start, stop, n)]


@dataclass
class RunConfig:
    raw: dict
    task: str
    model: Model
    search: OracleConfig
    sweep_parameter: Optional[str] = None
    sweep_models: list = field(default_factory=list)
    output_format: Optional[str] = None
    output_path: str = "-"


def parse_config(doc: Any) -> RunConfig:
    """Validate a decoded configuration and build every model it needs.

    Sweep points are all built up front so that an invalid value anywhere in
    the range is reported as a configuration error before solving starts.
    """
    _validate(doc, CONFIG_SCHEMA)
    task = doc["task"]
    model = build_model(task, doc["model"])
    run = RunConfig(doc, task, model, build_search(doc.get("search")))
    out = doc.get("output", {})
    run.output_format = out.get("format")
    run.output_path = out.get("path", "-")
    if "sweep" in doc:
        s = doc["sweep"]
        run.sweep_parameter = s["parameter"]
        for v in sweep_values(s):
            varied = _set_path(doc["model"], s["parameter"], v)
            try:
                run.sweep_models.append((v, build_model(task, varied)))
            except ConfigError as exc:
                raise ConfigError(exc.field, f"{exc} (at sweep value {v!r})") from exc
    return run


def load_config(path: str) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError("--config", str(exc)) from exc
    except json.JSONDecodeError as exc:
        raise ConfigError("--config", f"invalid JSON: {exc}") from exc
    return parse_config(doc)


def parse_report(text: str) -> dict:
    """Decode a JSON report and check it against :data:`REPORT_SCHEMA`."""
    doc = json.loads(text)
    _validate(doc, REPORT_SCHEMA)
    return doc
