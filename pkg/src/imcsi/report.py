"""Report rows shared by every evaluation path.

One row per evaluated scheme with the fixed column order
``scheme,n_bits,rho,params,flops,wall_seconds``. Codebook schemes carry
zero params/flops; n_bits may be fractional for the variable-overhead
high-resolution codebook (dataset mean).
"""

import csv
import json
from dataclasses import asdict, dataclass
from pathlib import Path

from .errors import ConfigError, DataFormatError

COLUMNS = ("scheme", "n_bits", "rho", "params", "flops", "wall_seconds")


@dataclass
class ReportRow:
    scheme: str
    n_bits: float
    rho: float
    params: int = 0
    flops: int = 0
    wall_seconds: float = 0.0


def write_report(path, rows, fmt: str = "csv") -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(COLUMNS)
            for r in rows:
                writer.writerow([getattr(r, c) for c in COLUMNS])
    elif fmt == "json":
        path.write_text(json.dumps([asdict(r) for r in rows], indent=2) + "\n")
    else:
        raise ConfigError(f"unknown report format {fmt!r}")
    return path


def read_report(path) -> list:
    path = Path(path)
    if not path.exists():
        raise DataFormatError(f"report not found: {path}")
    if path.suffix == ".json":
        return [ReportRow(**row) for row in json.loads(path.read_text())]
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or tuple(reader.fieldnames) != COLUMNS:
            raise DataFormatError(f"{path}: unexpected report columns {reader.fieldnames}")
        for row in reader:
            rows.append(
                ReportRow(
                    scheme=row["scheme"],
                    n_bits=float(row["n_bits"]),
                    rho=float(row["rho"]),
                    params=int(row["params"]),
                    flops=int(row["flops"]),
                    wall_seconds=float(row["wall_seconds"]),
                )
            )
    return rows
