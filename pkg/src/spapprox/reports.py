"""Tagged numeric results and their JSON/CSV serialization.

JSON is the canonical format; CSV rows follow a fixed, versioned column
schema (header line ``#schema=1``) so downstream plotting never has to
guess.  Serialization is deterministic: keys are sorted and floats are
rendered with ``repr`` round-tripping.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

CSV_SCHEMA_VERSION = 1
CSV_COLUMNS = ("quantity", "n", "value", "s_star", "regime", "certificate")


@dataclass
class ExtremalReport:
    quantity: str
    value: float
    n: int | None = None
    s_star: int | None = None
    regime: str = ""
    certificate: dict = field(default_factory=dict)
    warnings: tuple = ()

    def to_json_dict(self) -> dict:
        doc = {
            "quantity": self.quantity,
            "n": self.n,
            "value": self.value,
            "s_star": self.s_star,
            "regime": self.regime,
            "certificate": _plain(self.certificate),
        }
        if self.warnings:
            doc["warnings"] = list(self.warnings)
        return doc

    def csv_row(self) -> list:
        cert = json.dumps(_plain(self.certificate), sort_keys=True)
        return [
            self.quantity,
            "" if self.n is None else self.n,
            repr(float(self.value)),
            "" if self.s_star is None else self.s_star,
            self.regime,
            cert,
        ]


def _plain(obj):
    """Recursively convert numpy scalars/arrays to plain JSON-able types."""
    import numpy as np

    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, int, str)) or obj is None:
        return obj
    if isinstance(obj, float):
        return obj
    return repr(obj)


def reports_to_json(reports, extra: dict | None = None) -> str:
    doc = {"schema": CSV_SCHEMA_VERSION, "reports": [r.to_json_dict() for r in reports]}
    if extra:
        doc.update(_plain(extra))
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    buf.write(f"#schema={CSV_SCHEMA_VERSION}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in reports:
        writer.writerow(r.csv_row())
    return buf.getvalue()


def write_reports(reports, path: str | None, fmt: str = "json", extra: dict | None = None) -> str:
    text = reports_to_json(reports, extra) if fmt == "json" else reports_to_csv(reports)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text
