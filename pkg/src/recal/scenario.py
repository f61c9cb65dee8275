"""Scenario files: JSON schema, strict parsing and the bundled example.

Schema (all keys checked; unknown keys are rejected)::

    {
      "source": {
        "class0": {"trials": int, "success_prob": float},
        "class1": {"trials": int, "success_prob": float},
        "prior": float
      }
      // or explicitly:
      // "source": {"support": [...], "probs": [...], "posterior": [...],
      //            "prior": float (optional, defaults to the posterior mean)}

      "target": {
        "feature": {"type": "binomial", "trials": int, "success_prob": float}
                 | {"type": "vasicek_mixture", "trials": int, "mean": float,
                    "correlation": float, "quad_nodes": int (optional)}
                 | {"type": "explicit", "support": [...], "probs": [...]},
        "prior": float
      },

      "methods": "all" | ["capped_scaling", "label_shift", ...],
      "functional": "sqrt" | {"id": "tabulated", "grid": [...], "values": [...]},
      "solver": {"tol_mean": float, "tol_auc": float, "max_iter": int}  // optional
    }

With a class-conditional source, the unconditional feature pmf is
prior * f1 + (1 - prior) * f0 and the posterior at each support point is the
Bayes ratio prior * f1 / (prior * f1 + (1 - prior) * f0).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

import numpy as np

from .dist_core import (
    DiscreteScoreDist,
    PosteriorCurve,
    SourceModel,
    TargetSpec,
    binomial_dist,
    vasicek_mixture_dist,
)
from .errors import RecalError, ScenarioError
from .eval_report import FunctionalSpec
from .recal_methods import CANONICAL_ORDER, MethodId, RecalResult, run_method
from .solvers import DEFAULT_SETTINGS, SolverSettings


@dataclass(frozen=True, eq=False)
class Scenario:
    """Validated bundle of source model, target spec, method selection and
    evaluation functional, plus solver settings."""

    source: SourceModel
    target: TargetSpec
    methods: tuple[MethodId, ...]
    functional: FunctionalSpec
    settings: SolverSettings


def _check_keys(obj: dict, path: str, required: tuple[str, ...], optional: tuple[str, ...] = ()):
    if not isinstance(obj, dict):
        raise ScenarioError(f"{path}: expected an object")
    for key in required:
        if key not in obj:
            raise ScenarioError(f"{path}: missing key '{key}'")
    for key in obj:
        if key not in required and key not in optional:
            raise ScenarioError(f"{path}.{key}: unexpected key")


def _number(obj: dict, path: str, key: str) -> float:
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"{path}.{key}: expected a number")
    return float(value)


def _integer(obj: dict, path: str, key: str) -> int:
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioError(f"{path}.{key}: expected an integer")
    return value


def _open_unit(obj: dict, path: str, key: str) -> float:
    value = _number(obj, path, key)
    if not (0.0 < value < 1.0):
        raise ScenarioError(f"{path}.{key}: must lie strictly inside (0, 1)")
    return value


def _vector(obj: dict, path: str, key: str) -> np.ndarray:
    value = obj[key]
    if not isinstance(value, list) or not value:
        raise ScenarioError(f"{path}.{key}: expected a non-empty array of numbers")
    for item in value:
        if isinstance(item, bool) or not isinstance(item, (int, float)):
            raise ScenarioError(f"{path}.{key}: expected a non-empty array of numbers")
    return np.asarray(value, dtype=float)


def _binomial_spec(obj: dict, path: str) -> tuple[int, float]:
    _check_keys(obj, path, ("trials", "success_prob"))
    trials = _integer(obj, path, "trials")
    if trials < 1:
        raise ScenarioError(f"{path}.trials: must be a positive integer")
    return trials, _open_unit(obj, path, "success_prob")


def _parse_source(obj: dict) -> SourceModel:
    if not isinstance(obj, dict):
        raise ScenarioError("source: expected an object")
    if "class0" in obj or "class1" in obj:
        _check_keys(obj, "source", ("class0", "class1", "prior"))
        trials0, sp0 = _binomial_spec(obj["class0"], "source.class0")
        trials1, sp1 = _binomial_spec(obj["class1"], "source.class1")
        if trials0 != trials1:
            raise ScenarioError("source.class1.trials: must match source.class0.trials")
        prior = _open_unit(obj, "source", "prior")
        f0 = binomial_dist(trials0, sp0)
        f1 = binomial_dist(trials1, sp1)
        probs = prior * f1.probs + (1.0 - prior) * f0.probs
        posterior = prior * f1.probs / probs
        try:
            feature = DiscreteScoreDist(f0.support, probs)
            curve = PosteriorCurve(f0.support, posterior)
            return SourceModel(feature, curve, prior)
        except RecalError as exc:
            raise ScenarioError(f"source: {exc}") from exc
    _check_keys(obj, "source", ("support", "probs", "posterior"), optional=("prior",))
    support = _vector(obj, "source", "support")
    probs = _vector(obj, "source", "probs")
    posterior = _vector(obj, "source", "posterior")
    try:
        feature = DiscreteScoreDist(support, probs)
        curve = PosteriorCurve(support, posterior)
    except RecalError as exc:
        raise ScenarioError(f"source: {exc}") from exc
    prior = float(np.dot(feature.probs, curve.values))
    if "prior" in obj:
        prior_given = _open_unit(obj, "source", "prior")
        if abs(prior_given - prior) > 1e-10:
            raise ScenarioError(
                "source.prior: inconsistent with the posterior mean "
                f"({prior_given!r} vs {prior!r})"
            )
        prior = prior_given
    try:
        return SourceModel(feature, curve, prior)
    except RecalError as exc:
        raise ScenarioError(f"source: {exc}") from exc


def _parse_target(obj: dict, source_support: np.ndarray) -> TargetSpec:
    _check_keys(obj, "target", ("feature", "prior"))
    prior = _open_unit(obj, "target", "prior")
    feat = obj["feature"]
    if not isinstance(feat, dict) or "type" not in feat:
        raise ScenarioError("target.feature.type: missing key 'type'")
    kind = feat["type"]
    try:
        if kind == "binomial":
            _check_keys(feat, "target.feature", ("type", "trials", "success_prob"))
            trials, sp = _binomial_spec(
                {"trials": feat["trials"], "success_prob": feat["success_prob"]},
                "target.feature",
            )
            dist = binomial_dist(trials, sp)
        elif kind == "vasicek_mixture":
            _check_keys(
                feat,
                "target.feature",
                ("type", "trials", "mean", "correlation"),
                optional=("quad_nodes",),
            )
            trials = _integer(feat, "target.feature", "trials")
            mean = _open_unit(feat, "target.feature", "mean")
            correlation = _open_unit(feat, "target.feature", "correlation")
            nodes = (
                _integer(feat, "target.feature", "quad_nodes")
                if "quad_nodes" in feat
                else 128
            )
            dist = vasicek_mixture_dist(trials, mean, correlation, nodes)
        elif kind == "explicit":
            _check_keys(feat, "target.feature", ("type", "support", "probs"))
            dist = DiscreteScoreDist(
                _vector(feat, "target.feature", "support"),
                _vector(feat, "target.feature", "probs"),
            )
        else:
            raise ScenarioError(f"target.feature.type: unknown type {kind!r}")
    except ScenarioError:
        raise
    except RecalError as exc:
        raise ScenarioError(f"target.feature: {exc}") from exc
    if not np.array_equal(dist.support, source_support):
        raise ScenarioError(
            "target.feature: support must be identical to the source support"
        )
    try:
        return TargetSpec(dist, prior)
    except RecalError as exc:
        raise ScenarioError(f"target: {exc}") from exc


def _parse_methods(value) -> tuple[MethodId, ...]:
    if value == "all":
        return CANONICAL_ORDER
    if not isinstance(value, list) or not value:
        raise ScenarioError("methods: expected 'all' or a non-empty array of method names")
    out = []
    for i, item in enumerate(value):
        try:
            method = MethodId(item)
        except ValueError:
            raise ScenarioError(f"methods[{i}]: unknown method {item!r}") from None
        if method in out:
            raise ScenarioError(f"methods[{i}]: duplicate method {item!r}")
        out.append(method)
    return tuple(out)


def _parse_functional(value) -> FunctionalSpec:
    if isinstance(value, str):
        try:
            return FunctionalSpec.from_id(value)
        except RecalError as exc:
            raise ScenarioError(f"functional: {exc}") from exc
    _check_keys(value, "functional", ("id", "grid", "values"))
    if value["id"] != "tabulated":
        raise ScenarioError(f"functional.id: unknown functional id {value['id']!r}")
    try:
        return FunctionalSpec.tabulated(
            _vector(value, "functional", "grid"), _vector(value, "functional", "values")
        )
    except RecalError as exc:
        raise ScenarioError(f"functional: {exc}") from exc


def _parse_settings(obj: dict | None) -> SolverSettings:
    if obj is None:
        return DEFAULT_SETTINGS
    _check_keys(obj, "solver", (), optional=("tol_mean", "tol_auc", "max_iter"))
    settings = DEFAULT_SETTINGS
    if "tol_mean" in obj:
        tol = _number(obj, "solver", "tol_mean")
        if tol <= 0:
            raise ScenarioError("solver.tol_mean: must be positive")
        settings = replace(settings, tol_mean=tol)
    if "tol_auc" in obj:
        tol = _number(obj, "solver", "tol_auc")
        if tol <= 0:
            raise ScenarioError("solver.tol_auc: must be positive")
        settings = replace(settings, tol_auc=tol)
    if "max_iter" in obj:
        n = _integer(obj, "solver", "max_iter")
        if n < 1:
            raise ScenarioError("solver.max_iter: must be a positive integer")
        settings = replace(settings, max_iter=n)
    return settings


def scenario_from_dict(obj: dict) -> Scenario:
    _check_keys(
        obj, "scenario", ("source", "target", "methods", "functional"), optional=("solver",)
    )
    source = _parse_source(obj["source"])
    target = _parse_target(obj["target"], source.support)
    methods = _parse_methods(obj["methods"])
    functional = _parse_functional(obj["functional"])
    settings = _parse_settings(obj.get("solver"))
    return Scenario(source, target, methods, functional, settings)


def parse_scenario(path) -> Scenario:
    """Read and fully validate a scenario file; errors name the offending key."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file: {exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"scenario file is not valid JSON: {exc}") from exc
    return scenario_from_dict(obj)


def scenario_to_dict(scenario: Scenario) -> dict:
    """Serialize a scenario; the source is written in explicit form."""
    functional: str | dict
    if scenario.functional.id == "sqrt":
        functional = "sqrt"
    else:
        functional = {
            "id": "tabulated",
            "grid": scenario.functional.grid.tolist(),
            "values": scenario.functional.grid_values.tolist(),
        }
    return {
        "source": {
            "support": scenario.source.support.tolist(),
            "probs": scenario.source.feature_dist.probs.tolist(),
            "posterior": scenario.source.posterior.values.tolist(),
            "prior": scenario.source.prior,
        },
        "target": {
            "feature": {
                "type": "explicit",
                "support": scenario.target.support.tolist(),
                "probs": scenario.target.feature_dist.probs.tolist(),
            },
            "prior": scenario.target.prior,
        },
        "methods": [m.value for m in scenario.methods],
        "functional": functional,
        "solver": {
            "tol_mean": scenario.settings.tol_mean,
            "tol_auc": scenario.settings.tol_auc,
            "max_iter": scenario.settings.max_iter,
        },
    }


def write_scenario(scenario: Scenario, path) -> None:
    Path(path).write_text(
        json.dumps(scenario_to_dict(scenario), indent=2) + "\n", encoding="utf-8"
    )


def example_scenario_path() -> Path:
    """Path of the bundled worked-example scenario file."""
    return Path(resources.files("recal").joinpath("data/worked_example.json"))


def worked_example_scenario() -> Scenario:
    """The bundled worked example, built programmatically.

    Source: class-conditional binomials with 16 trials and success
    probabilities 0.4 (class 0) and 0.55 (class 1), class-1 prior 0.01.
    Target: binomial with 16 trials whose success probability follows a
    one-factor mixing law with mean 0.3 and correlation 0.3, prior 0.05.
    """
    return scenario_from_dict(
        {
            "source": {
                "class0": {"trials": 16, "success_prob": 0.4},
                "class1": {"trials": 16, "success_prob": 0.55},
                "prior": 0.01,
            },
            "target": {
                "feature": {
                    "type": "vasicek_mixture",
                    "trials": 16,
                    "mean": 0.3,
                    "correlation": 0.3,
                    "quad_nodes": 128,
                },
                "prior": 0.05,
            },
            "methods": "all",
            "functional": "sqrt",
        }
    )


def run_methods(scenario: Scenario) -> list[RecalResult]:
    """Run the selected methods in canonical order."""
    order = [m for m in CANONICAL_ORDER if m in scenario.methods]
    return [
        run_method(m, scenario.source, scenario.target, scenario.settings) for m in order
    ]
