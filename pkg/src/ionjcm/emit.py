"""Deterministic data-file and manifest writers.

CSV carries a single '#'-prefixed header line; numbers are formatted with 17
significant digits (enough to round-trip a double), '.' decimal separator and
'\\n' line endings, so identical runs emit byte-identical files.  JSON data
files follow the same numeric formatting; the manifest is a JSON sidecar with
stable key order.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Iterable

__all__ = ["format_cell", "render_csv", "render_json", "write_run", "manifest_path"]


def format_cell(value: Any) -> str:
    if value is None:
        return "nan"
    if isinstance(value, str):
        return value
    v = float(value)
    if math.isnan(v):
        return "nan"
    return "%.17g" % v


def render_csv(columns: list[str], rows: Iterable[Iterable[Any]]) -> str:
    lines = ["# " + ",".join(columns)]
    for row in rows:
        lines.append(",".join(format_cell(cell) for cell in row))
    return "\n".join(lines) + "\n"


def _json_cell(value: Any) -> str:
    if value is None:
        return "null"
    if isinstance(value, str):
        return json.dumps(value)
    v = float(value)
    if math.isnan(v):
        return "null"
    return "%.17g" % v


def render_json(columns: list[str], rows: Iterable[Iterable[Any]]) -> str:
    row_text = ",\n    ".join(
        "[" + ", ".join(_json_cell(cell) for cell in row) + "]" for row in rows
    )
    return (
        "{\n"
        f'  "columns": {json.dumps(columns)},\n'
        '  "rows": [\n    ' + row_text + "\n  ]\n}\n"
    )


def render_manifest(manifest: dict[str, Any]) -> str:
    return json.dumps(_sanitize(manifest), indent=2, allow_nan=False) + "\n"


def _sanitize(value):
    """NaN -> null and numpy scalars -> python scalars, recursively."""
    if isinstance(value, dict):
        return {k: _sanitize(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_sanitize(v) for v in value]
    if hasattr(value, "item") and not isinstance(value, (str, bytes)):
        value = value.item()
    if isinstance(value, float) and math.isnan(value):
        return None
    return value


def manifest_path(data_path: str | Path) -> Path:
    return Path(str(data_path) + ".manifest.json")


def write_run(path: str | Path, columns: list[str], rows, manifest: dict[str, Any],
              fmt: str = "csv") -> tuple[Path, Path]:
    """Write the data file and its manifest sidecar; returns both paths."""
    path = Path(path)
    if fmt == "csv":
        text = render_csv(columns, rows)
    elif fmt == "json":
        text = render_json(columns, rows)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    path.write_text(text, encoding="utf-8", newline="\n")
    mpath = manifest_path(path)
    mpath.write_text(render_manifest(manifest), encoding="utf-8", newline="\n")
    return path, mpath
