"""Python front end to the gascert core. Reports come back as dicts."""

import json

from ._core import GascertError, catalogue_names, evaluate, gradient
from ._core import run as _run

__all__ = [
    "GascertError",
    "analyze",
    "catalogue",
    "catalogue_names",
    "embed",
    "envelope",
    "evaluate",
    "expand",
    "gradient",
    "regions",
    "run",
    "simulate",
]


def run(command, **config):
    """Run a CLI command; keyword names follow the CLI flags. Returns (report, exit_code)."""
    config["command"] = command
    text, code = _run(json.dumps(config))
    return json.loads(text), code


def _report(command, map, config):
    if map is not None:
        config["map"] = map
    return run(command, **config)[0]


def analyze(map=None, **config):
    return _report("analyze", map, config)


def regions(map=None, **config):
    return _report("regions", map, config)


def catalogue():
    return _report("catalogue", None, {})["maps"]


def expand(map=None, **config):
    return _report("expand", map, config)


def envelope(map=None, **config):
    return _report("envelope", map, config)


def embed(map=None, **config):
    return _report("embed", map, config)


def simulate(map=None, **config):
    return _report("simulate", map, config)
