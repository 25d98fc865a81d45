"""Python access to the edge-service market simulator."""

import json

from . import _edgemkt
from ._edgemkt import ConfigError, InputError, default_parameter_count, pipeline_names

__all__ = [
    "ConfigError",
    "InputError",
    "check_ordinal",
    "default_parameter_count",
    "generate_scenario",
    "online",
    "pipeline_names",
    "run",
    "sweep_csv",
]


def _config_text(config):
    if config is None:
        return ""
    if isinstance(config, str):
        return config
    return json.dumps(config)


def generate_scenario(config=None, seed=1):
    """Generate a scenario and return it as a dict."""
    return json.loads(_edgemkt.generate_scenario_json(_config_text(config), seed))


def run(pipeline="FUSION", config=None, seed=1, trials=1):
    """Run one pipeline over several trials; returns per-trial rows and a summary."""
    return json.loads(_edgemkt.run_json(_config_text(config), pipeline, seed, trials))


def sweep_csv(axis, values, config=None, trials=1, seed=1):
    """Sweep every pipeline over an axis and return the summary CSV text."""
    return _edgemkt.sweep_csv(_config_text(config), axis, list(values), trials, seed)


def online(config=None, seed=1):
    """Run best-response scheduling without contracted UAVs."""
    return json.loads(_edgemkt.online_json(_config_text(config), seed))


def check_ordinal(samples=1000, seed=1):
    """Sample improving deviations and count potential-ordering violations."""
    return json.loads(_edgemkt.check_ordinal_json(samples, seed))
