"""Published conditional-probability tables: ingestion and recomputation.

Each table lists, per channel parameter, one input column of the transition
matrix for every axis. The other column follows from the complement rule
Q(.|1) = 1 - Q(.|0) under which the tables were published.

CSV schema (UTF-8, '.' decimal separator)::

    param,Qz00,Qz00_err,Qz10,Qz10_err,Qx00,Qx00_err,Qx10,Qx10_err,Qy00,Qy00_err,Qy10,Qy10_err

The y columns map the printed ``L|L`` and ``R|L`` headers to ``Qy00`` and
``Qy10``.
"""
from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .capacity import AxisResult, CapacityReport, detected_capacity
from .errors import DataError
from .qubit import AXES
from .reconstruction import TransitionMatrix, identify_errors, sanitize
from .uncertainty import pipeline_from_q

log = logging.getLogger(__name__)

VALUE_COLUMNS = ("Qz00", "Qz10", "Qx00", "Qx10", "Qy00", "Qy10")
HEADER = ["param"] + [c for v in VALUE_COLUMNS for c in (v, v + "_err")]
EXPECTED_ROWS = {"ad": 13, "pd": 21, "d": 21}
CHANNEL_KINDS = tuple(EXPECTED_ROWS)


@dataclass(frozen=True)
class TableRow:
    param: float
    values: dict[str, float]
    errors: dict[str, float]

    def transition_matrix(self, axis: str) -> TransitionMatrix:
        """Full Q for ``axis``; the unpublished column comes from the complement rule."""
        q00 = self.values[f"Q{axis}00"]
        q10 = self.values[f"Q{axis}10"]
        m = np.array([[q00, 1 - q00], [q10, 1 - q10]])
        return TransitionMatrix(axis, m, "table")

    def consistency_warnings(self) -> list[str]:
        out = []
        for axis in AXES:
            s = self.values[f"Q{axis}00"] + self.values[f"Q{axis}10"]
            sigma = math.hypot(self.errors[f"Q{axis}00"], self.errors[f"Q{axis}10"])
            if abs(s - 1) > 3 * sigma:
                out.append(f"param={self.param:g} axis {axis}: column sums to {s:.4f} "
                           f"(> 3 sigma = {3 * sigma:.4f} from 1)")
        return out


def bundled_table(kind: str) -> Path:
    """Path of the transcribed table shipped with the package."""
    if kind not in CHANNEL_KINDS:
        raise DataError(f"unknown channel kind {kind!r}")
    return Path(str(resources.files("capwitness") / "data" / f"{kind}.csv"))


def parse_table(text: str, kind: str | None = None, source: str = "<table>") -> list[TableRow]:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise DataError(f"{source}: empty file, expected header {','.join(HEADER)}") from None
    if header != HEADER:
        raise DataError(f"{source}: header mismatch; expected {','.join(HEADER)}")
    rows = []
    for lineno, rec in enumerate(reader, start=2):
        if not rec or all(not c.strip() for c in rec):
            continue
        if len(rec) != len(HEADER):
            raise DataError(f"{source}:{lineno}: expected {len(HEADER)} fields, got {len(rec)}")
        try:
            nums = [float(c) for c in rec]
        except ValueError as exc:
            raise DataError(f"{source}:{lineno}: {exc}") from None
        if not all(math.isfinite(x) for x in nums):
            raise DataError(f"{source}:{lineno}: non-finite value")
        vals = {c: nums[1 + 2 * k] for k, c in enumerate(VALUE_COLUMNS)}
        errs = {c: nums[2 + 2 * k] for k, c in enumerate(VALUE_COLUMNS)}
        if any(e < 0 for e in errs.values()):
            raise DataError(f"{source}:{lineno}: negative uncertainty")
        rows.append(TableRow(nums[0], vals, errs))
    params = [r.param for r in rows]
    if any(b <= a for a, b in zip(params, params[1:])):
        raise DataError(f"{source}: parameter column is not strictly increasing")
    if kind is not None:
        if kind not in EXPECTED_ROWS:
            raise DataError(f"unknown channel kind {kind!r}")
        if len(rows) != EXPECTED_ROWS[kind]:
            raise DataError(f"{source}: expected {EXPECTED_ROWS[kind]} rows for {kind}, got {len(rows)}")
    for r in rows:
        for w in r.consistency_warnings():
            log.info("%s: %s", source, w)
    return rows


def ingest_table(path, kind: str | None = None) -> list[TableRow]:
    """Read a table CSV; ``kind`` ('ad', 'pd', 'd') enables the row-count check."""
    path = Path(path)
    return parse_table(path.read_text(encoding="utf-8"), kind, str(path))


def format_table(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    for r in rows:
        rec = [f"{r.param:.6g}"]
        for c in VALUE_COLUMNS:
            rec += [f"{r.values[c]:.6g}", f"{r.errors[c]:.6g}"]
        w.writerow(rec)
    return buf.getvalue()


def write_table(rows, path) -> None:
    Path(path).write_text(format_table(rows), encoding="utf-8")


def _resampled_std(row: TableRow, axis: str, rng, draws: int, mode: str) -> dict[str, np.ndarray]:
    v00, v10 = row.values[f"Q{axis}00"], row.values[f"Q{axis}10"]
    s00, s10 = row.errors[f"Q{axis}00"], row.errors[f"Q{axis}10"]
    q00 = v00 + s00 * rng.standard_normal(draws)
    q10 = v10 + s10 * rng.standard_normal(draws)
    m = np.empty((draws, 2, 2))
    m[:, 0, 0], m[:, 1, 0] = q00, q10
    m[:, 0, 1], m[:, 1, 1] = 1 - q00, 1 - q10
    return pipeline_from_q(m, mode)


def recompute_row(row: TableRow, mode: str = "paper-abs", draws: int = 10_000,
                  rng: np.random.Generator | None = None) -> CapacityReport:
    profiles = {a: identify_errors(sanitize(row.transition_matrix(a), mode)) for a in AXES}
    report = detected_capacity(profiles, param=row.param)
    if draws:
        rng = rng if rng is not None else np.random.default_rng(0)
        caps = []
        for axis in AXES:
            res = _resampled_std(row, axis, rng, draws, mode)
            ar: AxisResult = report.axes[axis]
            ar.std = {k: float(np.std(res[k], ddof=1)) for k in ("eps0", "eps1", "p0", "C")}
            caps.append(res["C"])
        report.c_d_std = float(np.std(np.max(caps, axis=0), ddof=1))
    return report


def recompute_from_table(rows, mode: str = "paper-abs", draws: int = 10_000,
                         seed: int = 0) -> list[CapacityReport]:
    """Capacities per tabulated row, with Gaussian-resampled uncertainties.

    Each row draws from its own child of ``SeedSequence(seed)``.
    """
    children = np.random.SeedSequence(seed).spawn(len(rows))
    return [recompute_row(r, mode, draws, np.random.default_rng(c))
            for r, c in zip(rows, children)]
