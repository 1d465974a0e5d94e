"""Named field presets loaded from YAML/JSON definitions."""
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional

import yaml


@dataclass
class FieldPreset:
    name: str
    coefficients: List[int]
    description: str = ""


class PresetLibrary:
    """Loads field presets from a directory of YAML/JSON files."""

    def __init__(self, preset_dir: Optional[Path] = None, collection: str = "fields"):
        base_dir = preset_dir or Path(__file__).parent / "presets"
        self.preset_dir = Path(base_dir)
        self.collection = collection
        self._cache: Optional[Dict[str, FieldPreset]] = None

    def presets(self) -> Dict[str, FieldPreset]:
        if self._cache is None:
            path = self._resolve_preset_path(self.collection)
            with path.open() as f:
                raw = yaml.safe_load(f) or {}
            self._cache = {}
            for entry in raw.get("presets", []):
                coefficients = [int(c) for c in entry["coefficients"]]
                self._cache[entry["name"]] = FieldPreset(
                    name=entry["name"], coefficients=coefficients, description=entry.get("description", "")
                )
        return self._cache

    def get(self, name: str) -> FieldPreset:
        presets = self.presets()
        if name not in presets:
            raise KeyError(f"Unknown field preset: {name}")
        return presets[name]

    def names(self) -> List[str]:
        return sorted(self.presets())

    def _resolve_preset_path(self, collection: str) -> Path:
        for suffix in (".yaml", ".yml", ".json"):
            path = self.preset_dir / f"{collection}{suffix}"
            if path.exists():
                return path
        raise FileNotFoundError(f"Preset collection {collection} not found in {self.preset_dir}")


def parse_coefficients(text: str) -> List[int]:
    """Comma-separated integers, constant term first."""
    try:
        return [int(part) for part in text.replace(" ", "").split(",") if part]
    except ValueError as exc:
        raise ValueError(f"Not an integer list: {text!r}") from exc


def resolve_field(value: str, library: Optional[PresetLibrary] = None) -> List[int]:
    """A preset name, or an explicit coefficient list; a single integer b means x - b."""
    library = library or PresetLibrary()
    if value in library.presets():
        return library.get(value).coefficients
    coefficients = parse_coefficients(value)
    if len(coefficients) == 1:
        return [-coefficients[0], 1]
    if not coefficients:
        raise ValueError("Empty field specification")
    return coefficients
