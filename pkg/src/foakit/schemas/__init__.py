"""JSON schemas for scene manifests, evaluation manifests and reports."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

import jsonschema

from foakit.errors import ValidationError


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    text = resources.files(__name__).joinpath(f"{name}.schema.json").read_text()
    return json.loads(text)


def validate(instance, name: str, *, label: str = "document") -> None:
    """Validate ``instance`` against the named bundled schema."""
    validator = jsonschema.Draft202012Validator(load_schema(name))
    errors = sorted(validator.iter_errors(instance), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        where = "/".join(str(p) for p in err.absolute_path) or "<root>"
        raise ValidationError(f"{label}: {where}: {err.message}")
