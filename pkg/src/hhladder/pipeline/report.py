"""Reports and their CSV / structured (JSON) serializations.

Both formats carry ``format_version``; JSON is written with sorted keys so
identical inputs give identical bytes. Timings never go into files.
"""

from __future__ import annotations

import csv
import io
import json
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

REPORT_FORMAT_VERSION = 1
SPECTRUM_COLUMNS = ("n", "lambda_au", "energy_hartree", "basis_size", "Kmax")
CONVERGENCE_COLUMNS = ("Kmax", "basis_size", "energy_hartree", "delta_hartree")


@dataclass
class SpectrumReport:
    config: dict
    basis_size: int
    Kmax: int
    states: list[dict] = field(default_factory=list)
    ladder_strictly_increasing: bool = True
    orthonormality_residual: Optional[float] = None
    reference_check: Optional[list[dict]] = None
    flags: list[str] = field(default_factory=list)
    failure: Optional[dict] = None

    def to_dict(self) -> dict:
        return {
            "format_version": REPORT_FORMAT_VERSION,
            "kind": "spectrum",
            "config": self.config,
            "basis_size": self.basis_size,
            "Kmax": self.Kmax,
            "states": self.states,
            "ladder_strictly_increasing": self.ladder_strictly_increasing,
            "orthonormality_residual": self.orthonormality_residual,
            "reference_check": self.reference_check,
            "flags": self.flags,
            "failure": self.failure,
        }

    def to_csv(self) -> str:
        rows = [(s["n"], s["lambda_au"], s["energy_hartree"], self.basis_size, self.Kmax) for s in self.states]
        return _csv(SPECTRUM_COLUMNS, rows)


@dataclass
class ConvergenceReport:
    config: dict
    rows: list[dict] = field(default_factory=list)
    monotone_non_increasing: bool = True
    failure: Optional[dict] = None

    def to_dict(self) -> dict:
        return {
            "format_version": REPORT_FORMAT_VERSION,
            "kind": "convergence",
            "config": self.config,
            "convergence": self.rows,
            "monotone_non_increasing": self.monotone_non_increasing,
            "failure": self.failure,
        }

    def to_csv(self) -> str:
        rows = [tuple("" if r[c] is None else r[c] for c in CONVERGENCE_COLUMNS) for r in self.rows]
        return _csv(CONVERGENCE_COLUMNS, rows)


def _csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def to_json(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def render(report, fmt: str) -> str:
    if fmt == "csv" and hasattr(report, "to_csv"):
        return report.to_csv()
    return to_json(report if isinstance(report, dict) else report.to_dict())


def emit(text: str, path: Optional[str]) -> None:
    """Write atomically to ``path``, or to stdout when no path is given."""
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
