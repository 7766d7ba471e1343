"""Result serialization: CSV tables and JSON reports.

CSV files carry a mandatory header row, UTF-8 text, '.' decimal separator, one
record per line. Floats are written with repr (shortest exact round-trip), so
reruns of a deterministic experiment produce byte-identical files; non-finite
values appear as nan/inf. The JSON report mirrors the CSV records and adds the
resolved config and the software version, with every non-finite number mapped
to null.
"""
from __future__ import annotations

import json
import math
from typing import Any, Iterable, Mapping, Sequence

from ._version import __version__
from .config import (
    KIND_ITERATE_1D,
    KIND_ITERATE_LINREG,
    KIND_LANDSCAPE,
    ExperimentConfig,
)
from .errors import ConfigError

LANDSCAPE_COLUMNS = (
    "delta", "r", "sigma_c", "log_ratio_mean", "log_ratio_se",
    "theory_log_ratio", "n_reps", "status",
)
TRAJECTORY_COLUMNS = (
    "arm", "round", "n_k_per_direction", "dist_theta_star_mean",
    "dist_theta_star_se", "dist_center_mean", "dist_center_se",
    "theory_bound", "rho", "n_reps",
)
GAUSSIAN1D_COLUMNS = (
    "round", "n_k", "mean_estimate_mean", "mean_estimate_se",
    "dist_midpoint_mean", "dist_midpoint_se", "theory_bound", "n_reps",
)

_COLUMNS_BY_KIND = {
    KIND_LANDSCAPE: LANDSCAPE_COLUMNS,
    KIND_ITERATE_LINREG: TRAJECTORY_COLUMNS,
    KIND_ITERATE_1D: GAUSSIAN1D_COLUMNS,
}
_BASENAME_BY_KIND = {
    KIND_LANDSCAPE: "landscape",
    KIND_ITERATE_LINREG: "trajectory",
    KIND_ITERATE_1D: "gaussian1d",
}


def columns_for(kind: str) -> tuple[str, ...]:
    """The CSV column tuple for an experiment kind."""
    try:
        return _COLUMNS_BY_KIND[kind]
    except KeyError:
        raise ConfigError(f"no output schema for experiment kind {kind!r}") from None


def output_basename(kind: str) -> str:
    """The output file stem (landscape / trajectory / gaussian1d) for a kind."""
    try:
        return _BASENAME_BY_KIND[kind]
    except KeyError:
        raise ConfigError(f"no output file name for experiment kind {kind!r}") from None


def format_cell(value: Any) -> str:
    """One CSV cell: repr for floats, plain text for ints and strings."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path: str, rows: Iterable[Mapping[str, Any]],
              columns: Sequence[str]) -> None:
    """Write rows (dicts keyed by column name) as a CSV table with a header."""
    lines = [",".join(columns)]
    for row in rows:
        missing = [c for c in columns if c not in row]
        if missing:
            raise ConfigError(f"record is missing columns {missing}")
        lines.append(",".join(format_cell(row[c]) for c in columns))
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("\n".join(lines) + "\n")


def _jsonable(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, Mapping):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def write_json(path: str, rows: Iterable[Mapping[str, Any]],
               columns: Sequence[str], config: ExperimentConfig) -> None:
    """Write the records plus the resolved config and software version as JSON."""
    document = {
        "version": __version__,
        "config": _jsonable(config.to_mapping()),
        "records": [
            {c: _jsonable(row[c]) for c in columns} for row in rows
        ],
    }
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        json.dump(document, handle, indent=2, allow_nan=False)
        handle.write("\n")
