"""Multi-profile requirement reports for documentation and regression fixtures.

Every cell is produced through the capacity/latency/reliability operations
on registry data; this module adds only ordering and serialization.
"""
from __future__ import annotations

import csv
import io
import json

from .capacity import BitRate
from .profiles import ProfileRegistry, reproduce_summary_table

__all__ = ["requirements_report", "report_to_json", "report_to_csv"]

DEFAULT_FACTORS = (1.0, 20.0, 600.0)


def requirements_report(
    registry: ProfileRegistry,
    profile_keys: tuple[str, ...],
    factors: tuple[float, ...] = DEFAULT_FACTORS,
) -> dict:
    """Per-profile QoS requirements, in the given (deterministic) key order."""
    for key in profile_keys:
        registry.device(key)  # fail fast with the full valid-key list
    return reproduce_summary_table(registry, columns=tuple(profile_keys), factors=factors)


def _jsonable(value):
    if isinstance(value, BitRate):
        return {"bps": value.bps, "binary": value.format("binary"), "decimal": value.format("decimal")}
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (int, float, str, bool)) or value is None:
        return value
    return str(value)


def report_to_json(report: dict) -> str:
    return json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n"


def report_to_csv(report: dict) -> str:
    """Wide CSV: one row per requirement, one column per profile."""
    columns = report["columns"]
    profiles = report["profiles"]
    labels: list[str] = []
    for key in columns:
        for label in profiles[key]:
            if label in ("profile", "bitrates"):
                continue
            if label not in labels:
                labels.append(label)
        for factor in profiles[key]["bitrates"]:
            row = f"bitrate_bps_factor_{factor:g}"
            if row not in labels:
                labels.append(row)

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["requirement", *columns])
    for label in labels:
        row = [label]
        for key in columns:
            profile = profiles[key]
            if label.startswith("bitrate_bps_factor_"):
                factor = float(label.rsplit("_", 1)[1])
                rate = profile["bitrates"].get(factor)
                row.append("" if rate is None else repr(rate.bps))
            else:
                value = profile.get(label, "")
                row.append(str(value))
        writer.writerow(row)
    return buffer.getvalue()
