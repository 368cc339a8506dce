"""Shared helpers for command handlers: effective config and output."""

import argparse
import csv
import io
import json
import sys
from typing import Any

import numpy as np

from cskit.config import Config, load_config, parse_tolerance

# significant digits of floats in text output
TEXT_DIGITS = 12


def effective_config(args: argparse.Namespace) -> Config:
    """Config from files and environment with the command-line overrides applied."""
    cfg = load_config()
    tolerances = dict(parse_tolerance(spec) for spec in getattr(args, "tol", None) or [])
    return cfg.with_overrides(
        seed=getattr(args, "seed", None),
        trials=getattr(args, "trials", None),
        output_format=getattr(args, "format", None),
        tolerances=tolerances,
    )


def plain(value: Any) -> Any:
    """Convert numpy values and containers to JSON-compatible Python objects."""
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    return value


def _text(value: Any) -> str:
    if isinstance(value, bool) or value is None:
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.{TEXT_DIGITS}g}"
    if isinstance(value, list):
        if value and all(isinstance(row, list) for row in value):
            return "\n" + "\n".join("  " + " ".join(_text(v) for v in row) for row in value)
        return " ".join(_text(v) for v in value)
    if isinstance(value, dict):
        return " ".join(f"{k}={_text(v)}" for k, v in value.items())
    return str(value)


def _cell(value: Any) -> str:
    if isinstance(value, bool) or value is None:
        return "" if value is None else str(value).lower()
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def _csv_rows(writer: Any, key: str, value: Any) -> None:
    """One row per scalar, flat list or matrix row; nested keys are dotted."""
    if isinstance(value, dict):
        for k, v in value.items():
            _csv_rows(writer, f"{key}.{k}", v)
    elif isinstance(value, list) and value and all(isinstance(v, (list, dict)) for v in value):
        for i, v in enumerate(value):
            if isinstance(v, dict):
                _csv_rows(writer, f"{key}[{i}]", v)
            else:
                writer.writerow([f"{key}[{i}]", *(_cell(x) for x in v)])
    elif isinstance(value, list):
        writer.writerow([key, *(_cell(x) for x in value)])
    else:
        writer.writerow([key, _cell(value)])


def render(data: dict, fmt: str) -> str:
    """JSON (shortest round-trip float repr), key: value text or key,value CSV."""
    data = plain(data)
    if fmt == "json":
        return json.dumps(data, indent=2)
    if fmt == "csv":
        output = io.StringIO()
        writer = csv.writer(output, lineterminator="\n")
        for key, value in data.items():
            _csv_rows(writer, key, value)
        return output.getvalue().rstrip("\n")
    return "\n".join(f"{key}: {_text(value)}" for key, value in data.items())


def emit(data: dict, fmt: str) -> None:
    print(render(data, fmt))


def fail(message: str, code: int) -> None:
    print(f"Error: {message}", file=sys.stderr)
    sys.exit(code)
