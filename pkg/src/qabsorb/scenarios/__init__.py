"""Bundled scenario files and the JSON schema they follow."""

from __future__ import annotations

import json
from importlib import resources

import jsonschema

SCHEMA_VERSION = 1


class ScenarioError(ValueError):
    """Schema or syntax problem in a scenario, anchored to a line of the source text."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


def _files():
    return resources.files(__name__)


def schema() -> dict:
    return json.loads(_files().joinpath("scenario.schema.json").read_text())


def bundled_names() -> list[str]:
    return sorted(f.name[:-5] for f in _files().iterdir() if f.name.endswith(".json") and f.name != "scenario.schema.json")


def bundled_text(name: str) -> str:
    if name not in bundled_names():
        raise KeyError(name)
    return _files().joinpath(f"{name}.json").read_text()


def _line_of(text: str, path) -> int | None:
    """Best-effort line of the deepest key in ``path`` that appears in the text."""
    keys = [p for p in path if isinstance(p, str)]
    lines = text.splitlines()
    start = 0
    found = None
    for key in keys:
        needle = f'"{key}"'
        for i in range(start, len(lines)):
            if needle in lines[i]:
                found, start = i + 1, i
                break
    return found


def parse(text: str) -> dict:
    """Decode and validate a scenario; raises ScenarioError with a line number."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise ScenarioError(err.msg, err.lineno) from None
    validator = jsonschema.Draft202012Validator(schema())
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        where = "/".join(str(p) for p in err.absolute_path) or "<root>"
        line = _line_of(text, list(err.absolute_path)) or 1
        raise ScenarioError(f"{where}: {err.message}", line)
    return data
