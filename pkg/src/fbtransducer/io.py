"""Output writers: CSV tables, JSON reports, SVG figures and the run manifest."""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone

import numpy as np


def _plain(v):
    """JSON-safe scalar; NaN and inf become null."""
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, complex):
        return {"re": v.real, "im": v.imag}
    if isinstance(v, np.ndarray):
        return [_plain(x) for x in v.tolist()]
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    return v


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path, header, rows):
    """RFC 4180 table with a header row; floats use their shortest round-trip repr."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(v) for v in row])
    return path


def write_json(path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_plain(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def figure():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def save_svg(fig, path):
    # no date in the metadata so reruns only differ if the data does
    fig.savefig(path, format="svg", metadata={"Date": None})
    figure().close(fig)
    return path


def tool_version() -> str:
    try:
        from importlib.metadata import version
        return version("artifact")
    except Exception:
        from . import __version__
        return __version__


@dataclass
class RunManifest:
    command: str
    params: dict
    outputs: list = field(default_factory=list)
    version: str = field(default_factory=tool_version)
    timestamp: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())
    seed: int | None = None
    options: dict = field(default_factory=dict)

    def add(self, path):
        self.outputs.append(os.fspath(path))
        return path

    def write(self, out_dir):
        path = os.path.join(out_dir, f"manifest_{self.command}.json")
        write_json(path, asdict(self))
        return path
