"""``key = value`` metric reports with deterministic key order."""

from __future__ import annotations

from pathlib import Path
from typing import Any, Mapping

UNDEFINED = "undefined"


def format_value(value: Any) -> str:
    if value is None:
        return UNDEFINED
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def flatten(
    values: Mapping[str, Any],
    prefix: str = "",
) -> dict[str, Any]:
    """Join nested mapping keys with dots."""

    flat: dict[str, Any] = {}
    for key, value in values.items():
        name = f"{prefix}{key}"
        if isinstance(value, Mapping):
            flat.update(flatten(value, f"{name}."))
        else:
            flat[name] = value
    return flat


def format_report(values: Mapping[str, Any]) -> str:
    flat = flatten(values)
    return "".join(
        f"{key} = {format_value(flat[key])}\n" for key in sorted(flat)
    )


def write_report(path: Path, values: Mapping[str, Any]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_report(values), encoding="utf-8")
