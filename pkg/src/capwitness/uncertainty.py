"""Monte Carlo error propagation and analytic uncertainty helpers."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .capacity import canonical_errors, capacity_from_errors
from .errors import NumericalError
from .protocol import SINGULAR_F_TOL, CoincidenceSet, poisson_draw
from .qubit import AXES
from .reconstruction import deconvolve_counts, sanitize_array

log = logging.getLogger(__name__)

MIN_TRIALS = 8
MAX_EXCLUDED_FRACTION = 0.01
DEFAULT_ANGLE_ERROR_DEG = 0.5


@dataclass(frozen=True)
class Summary:
    mean: float
    std: float
    n: int


@dataclass
class MonteCarloResult:
    """Sample statistics keyed by quantity name.

    Names are ``<axis>.eps0``, ``<axis>.eps1``, ``<axis>.p0``, ``<axis>.C``,
    ``<axis>.Q00``, ``<axis>.Q10``, ``<axis>.Q01``, ``<axis>.Q11`` and ``C_D``.
    """

    stats: dict[str, Summary]
    seed: int | None
    trials: int
    excluded: int = 0
    samples: dict[str, np.ndarray] = field(default_factory=dict, repr=False)

    def __getitem__(self, name: str) -> Summary:
        return self.stats[name]


def summarize(samples: dict[str, np.ndarray]) -> dict[str, Summary]:
    out = {}
    for name, x in samples.items():
        x = np.asarray(x, dtype=float)
        # math.fsum keeps the mean independent of summation order.
        mean = math.fsum(x) / len(x)
        var = math.fsum((x - mean) ** 2) / (len(x) - 1) if len(x) > 1 else 0.0
        out[name] = Summary(mean, math.sqrt(var), len(x))
    return out


def pipeline_from_q(q: np.ndarray, mode: str) -> dict[str, np.ndarray]:
    """Sanitize -> identify -> capacity on a batch of transition matrices (..., 2, 2)."""
    m = sanitize_array(q, mode)
    if mode == "none" and (np.any(m < 0) or np.any(m > 1)):
        raise NumericalError("unsanitized transition matrix has entries outside [0, 1]")
    e0, e1 = canonical_errors(m[..., 1, 0], m[..., 0, 1])
    cap, p0 = capacity_from_errors(e0, e1)
    return {"eps0": e0, "eps1": e1, "p0": p0, "C": cap,
            "Q00": m[..., 0, 0], "Q10": m[..., 1, 0], "Q01": m[..., 0, 1], "Q11": m[..., 1, 1]}


def mc_capacity_distribution(expected: dict[str, CoincidenceSet], fidelity: float,
                             trials: int, seed: int, mode: str = "clamp",
                             keep_samples: bool = False) -> MonteCarloResult:
    """Propagate Poisson count noise through the full reconstruction.

    Every axis gets its own child stream of ``SeedSequence(seed)``, so the
    result is bit-identical for a fixed seed. Trials with an empty or
    negative deconvolved column are dropped and counted; more than 1% of
    them raises ``NumericalError``.
    """
    if trials < MIN_TRIALS:
        raise ValueError(f"need at least {MIN_TRIALS} trials, got {trials}")
    axes = [a for a in AXES if a in expected]
    children = np.random.SeedSequence(seed).spawn(len(axes))
    per_axis = {}
    valid = np.ones(trials, dtype=bool)
    for axis, child in zip(axes, children):
        rng = np.random.default_rng(child)
        mean = np.broadcast_to(expected[axis].counts, (trials, 2, 2))
        counts = poisson_draw(mean, rng)
        q = deconvolve_counts(counts, fidelity, axis)
        valid &= ~np.isnan(q).any(axis=(-2, -1))
        per_axis[axis] = q
    excluded = int((~valid).sum())
    if excluded > MAX_EXCLUDED_FRACTION * trials:
        raise NumericalError(f"{excluded}/{trials} Monte Carlo trials failed reconstruction")
    if excluded:
        log.warning("excluded %d of %d Monte Carlo trials (empty column)", excluded, trials)

    samples = {}
    caps = []
    for axis in axes:
        res = pipeline_from_q(per_axis[axis][valid], mode)
        for k, v in res.items():
            samples[f"{axis}.{k}"] = v
        caps.append(res["C"])
    samples["C_D"] = np.max(np.stack(caps), axis=0)
    return MonteCarloResult(summarize(samples), seed, trials, excluded,
                            samples if keep_samples else {})


def sigma_f_ratio(fidelity: float) -> float:
    """Inflation of the joint-probability std caused by Werner deconvolution."""
    denom = abs(4 * fidelity - 1)
    if denom <= SINGULAR_F_TOL:
        raise NumericalError(f"sigma_F diverges at F = 1/4 (got F = {fidelity})")
    return math.sqrt(8 * fidelity**2 - 4 * fidelity + 5) / denom


def ad_angle_uncertainty(omega_deg: float, delta_omega_deg: float = DEFAULT_ANGLE_ERROR_DEG) -> float:
    """First-order error on eta from an angle error on the damping waveplate.

    eta = 1 - cos^2(2 omega) gives d eta / d omega = 2 sin(4 omega).
    """
    if not 45 - 1e-12 <= omega_deg <= 90 + 1e-12:
        raise ValueError(f"waveplate angle {omega_deg} outside [45, 90] degrees")
    slope = 2 * math.sin(4 * math.radians(omega_deg))
    return abs(slope) * math.radians(delta_omega_deg)
