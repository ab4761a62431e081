"""CSV collections, key=value run configs and the JSON report writer."""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from karma.core import ConfigError, DataError, TimeSeriesCollection


class CsvFormatError(DataError):
    """Malformed CSV input; the message names the offending line."""


def load_csv(path) -> TimeSeriesCollection:
    """Header line of channel names, then one row of decimals per time step."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    rows = list(csv.reader(text.splitlines()))
    if not rows:
        raise CsvFormatError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    if any(not h for h in header):
        raise CsvFormatError(f"{path}:1: empty channel name")
    seen = set()
    for h in header:
        if h in seen:
            raise CsvFormatError(f"{path}:1: duplicate header {h!r}")
        seen.add(h)
    values = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise CsvFormatError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
        parsed = []
        for col, cell in enumerate(row, start=1):
            try:
                parsed.append(float(cell))
            except ValueError:
                raise CsvFormatError(f"{path}:{lineno}: column {col}: not a number: {cell!r}") from None
        values.append(parsed)
    if not values:
        raise CsvFormatError(f"{path}: no data rows")
    arr = np.array(values)
    bad = np.argwhere(~np.isfinite(arr))
    if bad.size:
        r, c = bad[0]
        raise CsvFormatError(f"{path}:{r + 2}: column {c + 1}: non-finite value")
    return TimeSeriesCollection(arr, tuple(header))


def save_csv(collection: TimeSeriesCollection, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(collection.channel_names)
        for row in collection.values:
            writer.writerow([repr(float(v)) for v in row])


def parse_config_file(path) -> dict[str, str]:
    """Flat ``key = value`` lines; '#' starts a comment; keys normalized to snake_case."""
    out: dict[str, str] = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for lineno, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError(f"{path}:{lineno}: empty key")
        out[key.replace("-", "_")] = value
    return out


def format_json(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with every float printed to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{_string(str(k))}: {format_json(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(format_json(v, indent, _level + 1) for v in obj) + "]"
        items = [pad + format_json(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x) or math.isinf(x):
            return "null"
        return format(x, ".17g")
    if isinstance(obj, str):
        return _string(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _string(s: str) -> str:
    import json

    return json.dumps(s)
