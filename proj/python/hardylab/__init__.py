"""Dimension, Frostman and Hardy-constant experiments on Euclidean grids and point sets."""

import json
from typing import Any, Iterable, Optional

from ._core import ConfigError, HardylabError, version
from . import _core

__all__ = ["ConfigError", "HardylabError", "list_fixtures", "run", "version"]


def run(config: dict, out: Optional[str] = None, formats: Iterable[str] = ()) -> dict[str, Any]:
    """Run one experiment config.

    Returns a dict with "summary", "provenance" and "tables" (name -> header/rows).
    When `out` is given the bundle is also written there.
    """
    return json.loads(_core.run_json(json.dumps(config), out or "", list(formats)))


def list_fixtures() -> list[dict[str, Any]]:
    """Named builders with their kinds and documented parameters."""
    return json.loads(_core.fixtures_json())
