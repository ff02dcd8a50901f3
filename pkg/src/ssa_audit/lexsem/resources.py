"""Access to the bundled fixture resources (mini inventory, irregular forms)."""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path


def resource_path(name: str) -> Path:
    return Path(str(resources.files("ssa_audit.resources").joinpath(name)))


def _load_json(name: str):
    with resources.files("ssa_audit.resources").joinpath(name).open("r") as fh:
        return json.load(fh)


def bundled_inventory() -> dict:
    return _load_json("mini_inventory.json")


def bundled_inflections() -> dict:
    return _load_json("inflections.json")
