"""Bundled reference data for the four-site hydrogen chain (8 qubits)."""
from __future__ import annotations

import json
from importlib import resources


def _text(name: str) -> str:
    return resources.files(__package__).joinpath(name).read_text()


def fixture_path(name: str) -> str:
    """Filesystem path of a bundled fixture file."""
    return str(resources.files(__package__).joinpath(name))


def h4_hamiltonian_text() -> str:
    return _text("h4_hamiltonian.txt")


def h4_grouping_json(kind: str) -> str:
    """Grouping JSON for kind in {"tpb", "gc", "ht"}."""
    if kind not in ("tpb", "gc", "ht"):
        raise ValueError("kind must be 'tpb', 'gc' or 'ht'")
    return _text(f"h4_{kind}_grouping.json")


def h4_ansatz() -> dict:
    return json.loads(_text("h4_ansatz.json"))


def h4_allocations() -> dict:
    return json.loads(_text("h4_allocations.json"))
