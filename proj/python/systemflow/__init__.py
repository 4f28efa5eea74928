"""Flow-graph model of trigger and data-acquisition pipelines."""

import json

from ._systemflow import (
    ConfigError,
    ErrorCosts,
    Model,
    ModelError,
    SystemScore,
    canonical_config,
    costs,
    evaluate_json,
    fit_lambda,
    format_ratio,
    load_model,
    main,
    parse_model,
    parse_ratio,
    report,
    run,
    sweep,
    trigger_rate,
)


def evaluate(model, **point):
    """Edge flows, node power and confusion, score and warnings as a dict."""
    return json.loads(evaluate_json(model, **point))


__all__ = [
    "ConfigError",
    "ErrorCosts",
    "Model",
    "ModelError",
    "SystemScore",
    "canonical_config",
    "costs",
    "evaluate",
    "evaluate_json",
    "fit_lambda",
    "format_ratio",
    "load_model",
    "main",
    "parse_model",
    "parse_ratio",
    "report",
    "run",
    "sweep",
    "trigger_rate",
]
