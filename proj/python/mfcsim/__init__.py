"""Model-following control simulator."""

import json

from ._mfcsim import MfcError, pole_placement, run_config, run_study

__all__ = ["MfcError", "pole_placement", "run", "run_config", "run_study"]


def run(config, horizon=None, dt=None):
    """Run a config given as a dict, JSON text, or path to a JSON file."""
    if isinstance(config, dict):
        text = json.dumps(config)
    elif isinstance(config, str) and config.lstrip().startswith("{"):
        text = config
    else:
        with open(config, encoding="utf-8") as fh:
            text = fh.read()
    return run_config(text, horizon=horizon, dt=dt)
