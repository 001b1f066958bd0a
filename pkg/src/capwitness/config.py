"""Run configuration as a flat ``key = value`` text file mirroring the CLI flags."""
from __future__ import annotations

import os
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from .errors import DataError
from .reconstruction import SANITIZE_MODES
from .tables import CHANNEL_KINDS

OUT_DIR_ENV = "CAPWITNESS_OUT_DIR"
DEFAULT_OUT_DIR = "capwitness-out"
# Per-axis total of expected coincidences used when no flux is given.
DEFAULT_COUNTS_PER_AXIS = 4e5


def default_out_dir() -> str:
    return os.environ.get(OUT_DIR_ENV, DEFAULT_OUT_DIR)


def parse_grid(text: str) -> list[float]:
    """``start:stop:step`` (inclusive) or a comma-separated list of values."""
    text = text.strip()
    try:
        if ":" in text:
            start, stop, step = (float(x) for x in text.split(":"))
            if step <= 0 or stop < start:
                raise ValueError
            n = int(round((stop - start) / step))
            return [round(start + k * step, 12) for k in range(n + 1)]
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise DataError(f"bad grid specification {text!r}; use start:stop:step or a,b,c") from None


def format_grid(values) -> str:
    return ",".join(repr(float(v)) for v in values)


@dataclass
class RunConfig:
    channel: str = "d"
    grid: str = "0,0.05,0.1,0.15,0.2"
    fidelity: float = 0.979
    counts_per_axis: float = DEFAULT_COUNTS_PER_AXIS
    flux: float = 0.0  # pairs/s; 0 means derive from counts_per_axis
    integration_time: float = 10.0
    eps_opt: float = 0.9
    eps_smf: float = 0.73
    eps_spad: float = 0.7
    eps_channel: float = 0.0  # 0 means the setup default for the channel kind
    sanitize: str = "clamp"
    trials: int = 200
    seed: int = 0
    out_dir: str = ""
    format: str = "csv"

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.channel not in CHANNEL_KINDS:
            raise DataError(f"channel must be one of {CHANNEL_KINDS}, got {self.channel!r}")
        params = self.params
        if not params:
            raise DataError("empty parameter grid")
        hi = 1 / 3 + 1e-12 if self.channel == "d" else 1.0
        if min(params) < 0 or max(params) > hi:
            raise DataError(f"parameter grid outside [0, {hi:.4g}] for channel {self.channel}")
        if not 0 <= self.fidelity <= 1 or abs(4 * self.fidelity - 1) <= 1e-6:
            raise DataError(f"fidelity {self.fidelity} outside [0, 1] or at the singular value 1/4")
        if self.counts_per_axis <= 0 or self.flux < 0 or self.integration_time <= 0:
            raise DataError("counts, flux and integration time must be positive")
        for name in ("eps_opt", "eps_smf", "eps_spad", "eps_channel"):
            if not 0 <= getattr(self, name) <= 1:
                raise DataError(f"{name} outside [0, 1]")
        if self.sanitize not in SANITIZE_MODES:
            raise DataError(f"sanitize must be one of {SANITIZE_MODES}")
        if self.trials < 8:
            raise DataError("trials must be >= 8")
        if self.format not in ("csv", "jsonl"):
            raise DataError("format must be csv or jsonl")

    @property
    def params(self) -> list[float]:
        return parse_grid(self.grid)

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            lines.append(f"{f.name} = {v!r}" if isinstance(v, float) else f"{f.name} = {v}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        types = {f.name: f.type for f in fields(cls)}
        kw = {}
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DataError(f"config line {lineno}: expected key = value")
            key, val = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in types:
                raise DataError(f"config line {lineno}: unknown key {key!r}")
            try:
                kw[key] = {"float": float, "int": int}.get(types[key], str)(val)
            except ValueError:
                raise DataError(f"config line {lineno}: bad value for {key}: {val!r}") from None
        return cls(**kw)

    @classmethod
    def load(cls, path) -> "RunConfig":
        return cls.from_text(Path(path).read_text(encoding="utf-8"))

    def save(self, path) -> None:
        Path(path).write_text(self.to_text(), encoding="utf-8")

    def as_dict(self) -> dict:
        return asdict(self)
