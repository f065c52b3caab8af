"""Serialization of results: JSON encoding, report CSVs and run manifests."""
from __future__ import annotations

import csv
import dataclasses
import datetime as _dt
import json
import math
import os
import platform
from fractions import Fraction
from importlib import metadata

import numpy as np

from ._util import OFF_SUPPORT, CheckReport

REPORT_COLUMNS = ("instance", "metric", "decoder", "n", "R", "M", "P_e_exact", "P_e_mc", "ci",
                  "union_clip", "sandwich_ratio", "K_n", "slack_per_symbol")


def encode_prob(value, log2=False):
    """Fractions become ``"p/q"``; a float log2-probability becomes ``"2^v"``."""
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if log2:
        return f"2^{float(value)!r}"
    return value


def to_jsonable(obj):
    """Recursively convert results into plain JSON types."""
    if obj is None or isinstance(obj, (bool, str, int)):
        return obj
    if obj is OFF_SUPPORT:
        return "off-support"
    if isinstance(obj, Fraction):
        return encode_prob(obj)
    if isinstance(obj, float):
        if math.isnan(obj):
            return "nan"
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return obj + 0.0  # folds -0.0 into 0.0
    if isinstance(obj, np.generic):
        return to_jsonable(obj.item())
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, CheckReport):
        return to_jsonable(obj.as_dict())
    if hasattr(obj, "as_dict"):
        return to_jsonable(obj.as_dict())
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        return [to_jsonable(v) for v in obj]
    return repr(obj)


def write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(to_jsonable(obj), fh, indent=2)
        fh.write("\n")
    return path


def write_csv(path, rows, columns):
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(columns), extrasaction="ignore")
        w.writeheader()
        for row in rows:
            w.writerow({k: _csv_cell(row.get(k)) for k in columns})
    return path


def _csv_cell(v):
    if v is None:
        return ""
    v = to_jsonable(v)
    return v if not isinstance(v, (list, dict)) else json.dumps(v)


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def parse_number(text):
    """Inverse of the CSV/JSON encoding for numbers: ``p/q``, ``2^v`` or a float."""
    if text is None or text == "":
        return None
    if isinstance(text, (int, float)):
        return float(text)
    text = str(text)
    if text.startswith("2^"):
        return 2.0 ** float(text[2:])
    if "/" in text:
        return float(Fraction(text))
    return float(text)


def package_version():
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


@dataclasses.dataclass
class RunManifest:
    """Provenance for one CLI run."""

    command: str
    config_hash: str | None
    seeds: list
    outputs: list = dataclasses.field(default_factory=list)
    version: str = dataclasses.field(default_factory=package_version)
    started: str = dataclasses.field(default_factory=lambda: _now())
    finished: str | None = None
    status: str | None = None
    argv: list = dataclasses.field(default_factory=list)
    python: str = platform.python_version()
    numpy: str = np.__version__

    def finish(self, status, out_dir=None):
        self.finished = _now()
        self.status = status
        if out_dir is not None:
            path = os.path.join(out_dir, "manifest.json")
            self.outputs.append(path)
            write_json(path, dataclasses.asdict(self))
            return path


def _now():
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
