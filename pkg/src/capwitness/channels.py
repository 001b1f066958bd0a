"""Kraus models of the Pauli and amplitude-damping qubit channels.

Each channel carries a parameter label next to its Kraus list, so the
closed-form predictions below can dispatch on the label instead of
re-identifying the channel from its matrices.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .capacity import ErrorPair, binary_entropy, capacity_cb
from .errors import NumericalError
from .qubit import AXES, I2, PAULI, TOL, kron, validate_density


@dataclass(frozen=True)
class PauliParams:
    qx: float
    qy: float
    qz: float

    def __post_init__(self):
        qs = (self.qx, self.qy, self.qz)
        if min(qs) < 0 or sum(qs) > 1 + 1e-12:
            raise ValueError(f"invalid Pauli probabilities {qs}")

    @property
    def qi(self) -> float:
        return max(0.0, 1.0 - (self.qx + self.qy + self.qz))

    @classmethod
    def phase_damping(cls, q: float) -> "PauliParams":
        return cls(0.0, 0.0, q)

    @classmethod
    def depolarizing(cls, q: float) -> "PauliParams":
        return cls(q, q, q)

    def weights(self) -> dict[str, float]:
        """Mixture weights keyed by the applied Pauli operator ('i', 'x', 'y', 'z')."""
        return {"i": self.qi, "x": self.qx, "y": self.qy, "z": self.qz}


@dataclass(frozen=True)
class AmplitudeDampingParams:
    eta: float

    def __post_init__(self):
        if not 0 <= self.eta <= 1:
            raise ValueError(f"damping probability eta={self.eta} outside [0, 1]")


ChannelLabel = PauliParams | AmplitudeDampingParams


@dataclass(frozen=True)
class KrausChannel:
    kraus_ops: tuple[np.ndarray, ...]
    label: ChannelLabel | None = None

    def __post_init__(self):
        ops = tuple(np.array(k, dtype=complex) for k in self.kraus_ops)
        for k in ops:
            if k.shape != (2, 2):
                raise ValueError(f"Kraus operator must be 2x2, got {k.shape}")
            k.flags.writeable = False
        object.__setattr__(self, "kraus_ops", ops)
        dev = completeness_deviation(ops)
        if dev > TOL:
            raise ValueError(f"Kraus operators not trace preserving (deviation {dev:.3e})")


def completeness_deviation(ops) -> float:
    total = sum(k.conj().T @ k for k in ops)
    return float(np.max(np.abs(total - I2)))


def make_pauli_channel(p: PauliParams) -> KrausChannel:
    ops = []
    for name, w in p.weights().items():
        if w > 0:
            ops.append(math.sqrt(w) * (I2 if name == "i" else PAULI[name]))
    return KrausChannel(tuple(ops), p)


def make_amplitude_damping(eta: float) -> KrausChannel:
    label = AmplitudeDampingParams(eta)
    k0 = np.array([[1, 0], [0, math.sqrt(1 - eta)]], dtype=complex)
    k1 = np.array([[0, math.sqrt(eta)], [0, 0]], dtype=complex)
    return KrausChannel((k0, k1), label)


def make_channel(label: ChannelLabel) -> KrausChannel:
    if isinstance(label, PauliParams):
        return make_pauli_channel(label)
    if isinstance(label, AmplitudeDampingParams):
        return make_amplitude_damping(label.eta)
    raise TypeError(f"unrecognised channel label {label!r}")


def unitary_channel(op: str) -> KrausChannel:
    """Single Pauli operation ('i', 'x', 'y' or 'z') as a one-element channel."""
    if op != "i" and op not in PAULI:
        raise ValueError(f"unknown Pauli operation {op!r}")
    u = I2 if op == "i" else PAULI[op]
    return KrausChannel((u,))


def _check_trace(out: np.ndarray, rho: np.ndarray) -> None:
    drift = abs(np.trace(out) - np.trace(rho))
    if drift > TOL:
        raise NumericalError(f"channel output trace drifted by {drift:.3e}")


def apply(ch: KrausChannel, rho) -> np.ndarray:
    """sum_k K rho K^dag on a single-qubit state."""
    rho = validate_density(rho)
    if rho.shape != (2, 2):
        raise ValueError("apply expects a 2x2 state; use apply_extended for 4x4")
    out = sum(k @ rho @ k.conj().T for k in ch.kraus_ops)
    _check_trace(out, rho)
    return validate_density(out)


def apply_extended(ch: KrausChannel, rho) -> np.ndarray:
    """(E x I) acting on a system-ancilla state, system factor first."""
    rho = validate_density(rho)
    if rho.shape != (4, 4):
        raise ValueError("apply_extended expects a 4x4 state")
    out = np.zeros((4, 4), dtype=complex)
    for k in ch.kraus_ops:
        kk = kron(k, I2)
        out += kk @ rho @ kk.conj().T
    _check_trace(out, rho)
    return validate_density(out)


def _pauli_flip_probs(p: PauliParams) -> dict[str, float]:
    # An axis is flipped by the two Pauli operators that anticommute with it.
    return {"x": p.qy + p.qz, "y": p.qx + p.qz, "z": p.qx + p.qy}


def theoretical_errors(label: ChannelLabel) -> dict[str, ErrorPair]:
    """Ideal (eps0, eps1) per axis, already in canonical labeling."""
    if isinstance(label, AmplitudeDampingParams):
        eta = label.eta
        e = (1 - math.sqrt(1 - eta)) / 2
        return {"z": ErrorPair(0.0, eta), "x": ErrorPair(e, e), "y": ErrorPair(e, e)}
    if isinstance(label, PauliParams):
        out = {}
        for axis, s in _pauli_flip_probs(label).items():
            e = min(s, 1 - s)
            relabel = (s > 0.5, False)
            out[axis] = ErrorPair(e, e, relabel)
        return {a: out[a] for a in AXES}
    raise TypeError(f"unrecognised channel label {label!r}")


def theoretical_detected_capacity(label: ChannelLabel, tie_tol: float = 1e-12):
    """Closed-form C_D and the set of axes attaining it.

    Returns ``(c_d, winners)`` with winners in z, x, y order.
    """
    if isinstance(label, AmplitudeDampingParams):
        e = (1 - math.sqrt(1 - label.eta)) / 2
        return 1 - binary_entropy(e), ("x", "y")
    if isinstance(label, PauliParams):
        ent = {a: binary_entropy(min(s, 1 - s)) for a, s in _pauli_flip_probs(label).items()}
        best = min(ent.values())
        winners = tuple(a for a in AXES if ent[a] - best <= tie_tol)
        return 1 - best, winners
    raise TypeError(f"unrecognised channel label {label!r}")


def theoretical_axis_capacities(label: ChannelLabel) -> dict[str, float]:
    return {a: capacity_cb(e) for a, e in theoretical_errors(label).items()}


def _golden_max(f, lo: float, hi: float, tol: float = 1e-10) -> float:
    invphi = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return (a + b) / 2


def _holevo_objective(eta: float, t):
    t = np.asarray(t, dtype=float)
    g = 0.5 * (1 + np.sqrt(np.clip(1 - 4 * eta * (1 - eta) * t**2, 0.0, None)))
    return binary_entropy(np.clip(t * (1 - eta), 0, 1)) - binary_entropy(np.clip(g, 0, 1))


def holevo_capacity_ad(eta: float, grid_points: int = 10_000) -> float:
    """One-shot classical capacity of amplitude damping with decay ``eta``.

    The objective is scanned on a ``grid_points`` grid over t in [0, 1]; a
    golden-section search then refines inside the bracketing grid cells to
    |dt| <= 1e-10. The result is never below the grid maximum.
    """
    AmplitudeDampingParams(eta)
    grid = np.linspace(0.0, 1.0, grid_points + 1)
    vals = _holevo_objective(eta, grid)
    k = int(np.argmax(vals))
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, grid_points)]
    t_star = _golden_max(lambda t: float(_holevo_objective(eta, t)), lo, hi)
    return max(float(_holevo_objective(eta, t_star)), float(vals[k]))
