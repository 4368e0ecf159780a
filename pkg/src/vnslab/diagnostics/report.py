"""CSV output: one row per (rho, quantity)."""

from __future__ import annotations

import csv
import os
from dataclasses import astuple, dataclass

NORM_HEADER = ("quantity", "rho", "value", "covered_fraction", "tolerance_estimate")


@dataclass(frozen=True)
class NormRow:
    quantity: str
    rho: float
    value: float
    covered_fraction: float = 1.0
    tolerance_estimate: float = float("nan")


def write_norm_csv(rows, path: str, append: bool = False) -> None:
    """Write rows with a header; in append mode the header is written only for a new file."""
    fresh = not (append and os.path.exists(path) and os.path.getsize(path) > 0)
    with open(path, "a" if append else "w", newline="") as fh:
        w = csv.writer(fh)
        if fresh:
            w.writerow(NORM_HEADER)
        for r in rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in astuple(r)])


def read_norm_csv(path: str) -> list[NormRow]:
    with open(path, newline="") as fh:
        rd = csv.DictReader(fh)
        return [NormRow(r["quantity"], float(r["rho"]), float(r["value"]), float(r["covered_fraction"]),
                        float(r["tolerance_estimate"])) for r in rd]
