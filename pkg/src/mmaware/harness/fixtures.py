"""Catalog instances shipped as JSON files."""
from __future__ import annotations

from importlib import resources
from pathlib import Path

from ..model import serialize_allocation, serialize_instance
from .catalog import worked_instances



def fixture_texts() -> dict[str, str]:
    """File name -> canonical text for every shipped fixture."""
    out = {}
    for entry in worked_instances():
        out[f"{entry.id}.json"] = serialize_instance(entry.instance)
        for name, alloc in entry.allocations.items():
            out[f"{entry.id}_{name}_alloc.json"] = serialize_allocation(alloc)
    return out


def fixture_path(name: str) -> Path:
    """Path of a shipped fixture, e.g. ``fixture_path("identical_efx_not_mmax.json")``."""
    return Path(str(resources.files("mmaware") / "fixtures" / name))


def write_fixtures(directory) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name, text in sorted(fixture_texts().items()):
        path = directory / name
        path.write_text(text)
        written.append(path)
    return written
