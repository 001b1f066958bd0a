"""Report serialisation (CSV / JSON lines) and plot-ready column files."""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .capacity import CapacityReport
from .channels import (AmplitudeDampingParams, PauliParams, holevo_capacity_ad,
                       theoretical_axis_capacities, theoretical_detected_capacity)
from .errors import DataError
from .qubit import AXES

AXIS_FIELDS = ("eps0", "eps1", "p0", "C")
REPORT_FIELDS = (
    ["param", "param_std"]
    + [f"{a}_{k}{s}" for a in AXES for k in AXIS_FIELDS for s in ("", "_std")]
    + ["C_D", "C_D_std", "winner"]
)
THEORY_POINTS = 201
PARAM_RANGE = {"ad": (0.0, 1.0), "pd": (0.0, 1.0), "d": (0.0, 1.0 / 3.0)}


def channel_label(kind: str, param: float):
    """Ideal channel of kind 'ad', 'pd' (q_z = q) or 'd' (q_x = q_y = q_z = q)."""
    if kind == "ad":
        return AmplitudeDampingParams(param)
    if kind == "pd":
        return PauliParams.phase_damping(param)
    if kind == "d":
        return PauliParams.depolarizing(param)
    raise DataError(f"unknown channel kind {kind!r}; expected ad, pd or d")


def theory_row(kind: str, param: float) -> dict:
    label = channel_label(kind, param)
    caps = theoretical_axis_capacities(label)
    c_d, winners = theoretical_detected_capacity(label)
    row = {"param": param, "C_x": caps["x"], "C_y": caps["y"], "C_z": caps["z"],
           "C_D": c_d, "winners": "+".join(winners)}
    if kind == "ad":
        row["C_1"] = holevo_capacity_ad(param)
    return row


def theory_curve(kind: str, grid) -> list[dict]:
    return [theory_row(kind, float(p)) for p in grid]


def fmt(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    if isinstance(x, str):
        return x
    return f"{float(x):.6g}"


def report_record(r: CapacityReport) -> dict:
    """Flatten a report into the stable field order of ``REPORT_FIELDS``."""
    rec = {"param": r.param, "param_std": r.extra.get("param_std")}
    for a in AXES:
        ar = r.axes.get(a)
        vals = {"eps0": None, "eps1": None, "p0": None, "C": None}
        if ar is not None:
            vals = {"eps0": ar.errors.eps0, "eps1": ar.errors.eps1,
                    "p0": ar.prior.p0, "C": ar.capacity}
        std = (ar.std if ar is not None else None) or {}
        for k in AXIS_FIELDS:
            rec[f"{a}_{k}"] = vals[k]
            rec[f"{a}_{k}_std"] = std.get(k)
    rec["C_D"] = r.c_d
    rec["C_D_std"] = r.c_d_std
    rec["winner"] = r.winner
    return {k: rec[k] for k in REPORT_FIELDS}


def _round6(x):
    if x is None or isinstance(x, str):
        return x
    return float(f"{float(x):.6g}")


def format_report(reports, fmt_name: str = "csv") -> str:
    records = [report_record(r) for r in reports]
    if fmt_name == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(REPORT_FIELDS)
        for rec in records:
            w.writerow([fmt(rec[k]) for k in REPORT_FIELDS])
        return buf.getvalue()
    if fmt_name == "jsonl":
        lines = [json.dumps({k: _round6(rec[k]) for k in REPORT_FIELDS}) for rec in records]
        return "".join(line + "\n" for line in lines)
    raise ValueError(f"unknown report format {fmt_name!r}")


def emit_report(reports, path, fmt_name: str = "csv") -> Path:
    """Write one record per parameter point. Numbers carry 6 significant digits."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_report(reports, fmt_name), encoding="utf-8")
    return path


def read_report(path, fmt_name: str | None = None) -> list[dict]:
    path = Path(path)
    if fmt_name is None:
        fmt_name = "jsonl" if path.suffix in (".jsonl", ".json") else "csv"
    text = path.read_text(encoding="utf-8")
    if fmt_name == "jsonl":
        return [json.loads(line) for line in text.splitlines() if line.strip()]
    out = []
    for rec in csv.DictReader(io.StringIO(text)):
        row = {}
        for k in REPORT_FIELDS:
            v = rec[k]
            row[k] = v if k == "winner" else (float(v) if v != "" else None)
        out.append(row)
    return out


def _write_columns(path: Path, header: list[str], rows: list[list], comment: str) -> None:
    lines = [f"# {comment}", "# " + " ".join(header)]
    for r in rows:
        lines.append(" ".join(fmt(v) if v is not None else "nan" for v in r))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def emit_plot_data(reports, kind: str, out_dir, theory_points: int = THEORY_POINTS) -> list[Path]:
    """Whitespace-separated column files for the measured points and the theory.

    ``<kind>_points.dat``: param, C_x, sC_x, C_y, sC_y, C_z, sC_z, C_D, sC_D
    ``<kind>_theory.dat``: param, C_xy, C_z (ideal channel, ``theory_points`` samples)
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    pts = []
    for r in reports:
        row = [r.param]
        for a in ("x", "y", "z"):
            ar = r.axes[a]
            row += [ar.capacity, (ar.std or {}).get("C")]
        row += [r.c_d, r.c_d_std]
        pts.append(row)
    p1 = out_dir / f"{kind}_points.dat"
    _write_columns(p1, ["param", "C_x", "sC_x", "C_y", "sC_y", "C_z", "sC_z", "C_D", "sC_D"],
                   pts, f"measured capacities, channel {kind}")
    lo, hi = PARAM_RANGE[kind]
    grid = np.linspace(lo, hi, theory_points)
    th = []
    for p in grid:
        caps = theoretical_axis_capacities(channel_label(kind, float(p)))
        th.append([float(p), caps["x"], caps["z"]])
    p2 = out_dir / f"{kind}_theory.dat"
    _write_columns(p2, ["param", "C_xy", "C_z"], th, f"ideal-channel theory, channel {kind}")
    return [p1, p2]


def format_theory(rows: list[dict]) -> str:
    fields = ["param", "C_x", "C_y", "C_z", "C_D", "winners"]
    if rows and "C_1" in rows[0]:
        fields.append("C_1")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    for r in rows:
        w.writerow([fmt(r[k]) for k in fields])
    return buf.getvalue()


def comparison_rows(reports, kind: str, informational: bool) -> list[dict]:
    """Measured C_D next to the ideal-channel prediction at the same parameter."""
    out = []
    for r in reports:
        c_th, _ = theoretical_detected_capacity(channel_label(kind, r.param))
        diff = r.c_d - c_th
        z = diff / r.c_d_std if r.c_d_std else float("nan")
        out.append({"param": r.param, "C_D": r.c_d, "C_D_std": r.c_d_std, "C_D_theory": c_th,
                    "diff": diff, "z": z,
                    "status": "informational" if informational else "compared"})
    return out


def format_comparison(rows: list[dict]) -> str:
    fields = ["param", "C_D", "C_D_std", "C_D_theory", "diff", "z", "status"]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    for r in rows:
        w.writerow([fmt(r[k]) for k in fields])
    return buf.getvalue()
