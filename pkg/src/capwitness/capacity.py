"""Binary-channel capacities, optimal priors and the detected witness.

All logarithms are base 2. The kernels accept scalars or numpy arrays so the
Monte Carlo code can push whole batches through them; the public wrappers
return plain floats.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .qubit import AXES

DEGENERATE_TOL = 1e-9
_CONV_TOL = 1e-12

# Order in which relabelings are tried (swap_output, swap_input).
RELABELINGS = ((False, False), (True, False), (False, True), (True, True))


@dataclass(frozen=True)
class ErrorPair:
    """Error probabilities of a binary channel in canonical labeling.

    ``eps0`` is P(receive 1 | send 0), ``eps1`` is P(receive 0 | send 1).
    Canonical means 0 <= eps0 <= 1/2, eps0 <= eps1 and eps0 <= 1 - eps1.
    ``relabel`` records the (swap_output, swap_input) applied to get here.
    """

    eps0: float
    eps1: float
    relabel: tuple[bool, bool] = (False, False)

    def __post_init__(self):
        e0, e1 = self.eps0, self.eps1
        if not (0 <= e0 and 0 <= e1 <= 1):
            raise ValueError(f"error probabilities out of [0, 1]: ({e0}, {e1})")
        if e0 > 0.5 + _CONV_TOL or e0 > e1 + _CONV_TOL or e0 > 1 - e1 + _CONV_TOL:
            raise ValueError(f"({e0}, {e1}) violates the canonical labeling convention")

    @property
    def symmetric(self) -> bool:
        return abs(self.eps0 - self.eps1) <= _CONV_TOL


@dataclass(frozen=True)
class PriorDistribution:
    p0: float
    degenerate: bool = False

    def __post_init__(self):
        if not 0 <= self.p0 <= 1:
            raise ValueError(f"p0 = {self.p0} outside [0, 1]")

    @property
    def p1(self) -> float:
        return 1.0 - self.p0


@dataclass
class AxisResult:
    errors: ErrorPair
    prior: PriorDistribution
    capacity: float
    std: dict[str, float] | None = None


@dataclass
class CapacityReport:
    """Per-axis capacities plus the witness C_D = max over axes."""

    axes: dict[str, AxisResult]
    c_d: float
    winner: str
    ties: tuple[str, ...]
    param: float | None = None
    c_d_std: float | None = None
    extra: dict = field(default_factory=dict)


def binary_entropy(p):
    """H(p) in bits with 0 log 0 = 0. Works elementwise on arrays."""
    p = np.asarray(p, dtype=float)
    if np.any((p < 0) | (p > 1)) or np.any(np.isnan(p)):
        raise ValueError("binary_entropy argument outside [0, 1]")
    q = 1.0 - p
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -np.where(p > 0, p * np.log2(p), 0.0) - np.where(q > 0, q * np.log2(q), 0.0)
    return float(h) if h.ndim == 0 else h


def _log2z(e0, e1, d):
    """(H(e0) - H(e1)) / d in bits, accurate even as d -> 0.

    With b = 1 - e1 = e0 + d and c = 1 - e0 the entropy difference is
    e0 log(b/e0) + e1 log(e1/c) + d log(b/c) (nats); the O(d) parts of the
    first two terms cancel, which the log1p form keeps exact.
    """
    c = 1 - e0
    b = e0 + d
    pos0 = e0 > 0
    pos1 = e1 > 0
    a_safe = np.where(pos0, e0, 1.0)
    e1_safe = np.where(pos1, e1, 1.0)
    x0 = np.where(pos0, d / np.maximum(a_safe, d), 0.0)
    x1 = -d / c
    # log1p keeps the small-x regime accurate; the log forms cover x0 -> inf, x1 -> -1.
    l0 = np.where(x0 < 1, np.log1p(np.minimum(x0, 1.0)), np.log(b) - np.log(a_safe))
    l1 = np.where(x1 > -0.5, np.log1p(np.maximum(x1, -0.5)), np.log(e1_safe) - np.log(c))
    t0 = np.where(pos0, e0 * l0, 0.0) - d
    t1 = np.where(pos1, e1 * l1, 0.0) + e1 * d / c
    t2 = d * d / c + d * np.log(b / c)
    return (t0 + t1 + t2) / (d * np.log(2))


def _cb_kernel(e0, e1):
    """Capacity and optimal p0 for canonical error arrays; no validation."""
    e0 = np.asarray(e0, dtype=float)
    e1 = np.asarray(e1, dtype=float)
    d = 1.0 - e0 - e1
    degenerate = d < DEGENERATE_TOL
    d_safe = np.where(degenerate, 1.0, d)
    e0s = np.where(degenerate, 0.0, e0)
    e1s = np.where(degenerate, 0.0, e1)
    log2z = _log2z(e0s, e1s, d_safe)
    # log2(1 + z) and 1/(1 + z) without forming z.
    log2_1pz = np.logaddexp2(0.0, log2z)
    inv_1pz = np.exp2(-log2_1pz)
    cap = log2_1pz - e0s * log2z - binary_entropy(e0s)
    p0 = (inv_1pz - e1s) / d_safe
    cap = np.where(degenerate, 0.0, np.clip(cap, 0.0, 1.0))
    p0 = np.where(degenerate, 0.5, p0)
    return cap, p0, degenerate


def optimal_prior(e: ErrorPair) -> PriorDistribution:
    """Capacity-achieving input distribution of a binary asymmetric channel."""
    _, p0, degenerate = _cb_kernel(e.eps0, e.eps1)
    p0 = float(p0)
    if not -1e-9 <= p0 <= 1 + 1e-9:
        raise ArithmeticError(f"optimal prior {p0} far outside [0, 1] for {e}")
    return PriorDistribution(min(max(p0, 0.0), 1.0), bool(degenerate))


def capacity_cb(e: ErrorPair) -> float:
    """Closed-form capacity of the binary channel with errors (eps0, eps1).

    Reduces to 1 - H(eps) for a symmetric channel and to the Z-channel
    capacity when eps0 = 0. Returns 0 when eps0 + eps1 is within 1e-9 of 1.
    """
    cap, _, _ = _cb_kernel(e.eps0, e.eps1)
    return float(cap)


def canonical_errors(q10, q01):
    """Canonical (eps0, eps1) from off-diagonals Q(1|0), Q(0|1) of a stochastic Q.

    Vectorised counterpart of ``identify_errors``: eps0 is the smallest of the
    four candidate error entries and eps1 its partner under that relabeling.
    """
    a = np.asarray(q10, dtype=float)
    b = np.asarray(q01, dtype=float)
    cand0 = np.stack([a, 1 - a, 1 - b, b])
    cand1 = np.stack([b, 1 - b, 1 - a, a])
    k = np.argmin(cand0, axis=0)
    e0 = np.take_along_axis(cand0, k[None], axis=0)[0]
    e1 = np.take_along_axis(cand1, k[None], axis=0)[0]
    return e0, e1


def capacity_from_errors(e0, e1):
    """Batch version of ``capacity_cb``/``optimal_prior`` on canonical arrays."""
    cap, p0, _ = _cb_kernel(e0, e1)
    return cap, p0


def mutual_information(q: np.ndarray, p0) -> np.ndarray | float:
    """I(X;Y) in bits for transition matrix ``q[j, i] = Q(j|i)`` and prior (p0, 1-p0).

    ``p0`` may be an array; the result then has the same shape.
    """
    q = np.asarray(q, dtype=float)
    p0 = np.asarray(p0, dtype=float)
    prior = np.stack([p0, 1 - p0], axis=-1)  # (..., i)
    out_prob = prior @ q.T  # (..., j) = sum_i p_i Q(j|i)
    mi = np.zeros(p0.shape)
    for i in range(2):
        for j in range(2):
            qji = q[j, i]
            if qji <= 0:
                continue
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                term = prior[..., i] * qji * np.log2(qji / out_prob[..., j])
            mi = mi + np.where(prior[..., i] > 0, term, 0.0)
    return float(mi) if mi.ndim == 0 else mi


def brute_force_capacity(q: np.ndarray, resolution: float = 1e-5) -> tuple[float, float]:
    """Grid-maximise the mutual information over p0.

    A coarse pass with step ``sqrt(resolution)`` (at most 1e-3) locates the
    peak, then a second uniform pass with step ``resolution`` covers the two
    neighbouring coarse cells. Independent of the closed form.
    """
    coarse_step = min(1e-3, np.sqrt(resolution))
    grid = np.linspace(0.0, 1.0, int(round(1 / coarse_step)) + 1)
    mi = mutual_information(q, grid)
    k = int(np.argmax(mi))
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, len(grid) - 1)]
    fine = np.linspace(lo, hi, int(round((hi - lo) / resolution)) + 1)
    mi_fine = mutual_information(q, fine)
    kf = int(np.argmax(mi_fine))
    return float(mi_fine[kf]), float(fine[kf])


def detected_capacity(profiles: dict[str, ErrorPair], param: float | None = None,
                      tie_tol: float = 1e-12) -> CapacityReport:
    """Evaluate C^(alpha) on every axis and take the maximum.

    Ties (within ``tie_tol``) are reported in the order z, x, y and the first
    of them is the winner.
    """
    axes = {}
    for axis in AXES:
        if axis not in profiles:
            continue
        e = profiles[axis]
        axes[axis] = AxisResult(e, optimal_prior(e), capacity_cb(e))
    if not axes:
        raise ValueError("no axis profiles given")
    c_d = max(r.capacity for r in axes.values())
    ties = tuple(a for a, r in axes.items() if c_d - r.capacity <= tie_tol)
    return CapacityReport(axes=axes, c_d=c_d, winner=ties[0], ties=ties, param=param)
