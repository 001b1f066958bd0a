"""Simulation of the entangled-probe detection scheme.

A Werner probe goes through ``E x I``; system and ancilla are then measured
in the same Pauli eigenbasis and two-photon coincidences are counted with the
optical efficiencies of the setup and Poisson noise.

Count matrices are indexed ``counts[j, i]`` with ``j`` the system (channel
output) outcome and ``i`` the ancilla outcome, logical 0 first.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

import numpy as np

from .channels import KrausChannel, PauliParams, apply_extended, unitary_channel
from .qubit import bell_phi_plus, kron, pauli_basis, validate_density

log = logging.getLogger(__name__)

SINGULAR_F_TOL = 1e-6
POISSON_INVERSION_MAX_MEAN = 30.0


@dataclass(frozen=True)
class WernerState:
    fidelity: float
    matrix: np.ndarray
    near_singular: bool


def werner_state(fidelity: float) -> WernerState:
    """rho_F = (4F-1)/3 |Phi+><Phi+| + (1-F)/3 I_4."""
    if not 0 <= fidelity <= 1:
        raise ValueError(f"fidelity {fidelity} outside [0, 1]")
    rho = (4 * fidelity - 1) / 3 * bell_phi_plus() + (1 - fidelity) / 3 * np.eye(4)
    near = fidelity <= 0.25 + SINGULAR_F_TOL
    if near:
        log.warning("Werner fidelity %.6g <= 1/4: noise deconvolution is singular", fidelity)
    return WernerState(fidelity, validate_density(rho), near)


@dataclass(frozen=True)
class EfficiencyModel:
    eps_opt: float = 0.9
    eps_smf: float = 0.73
    eps_spad: float = 0.7
    eps_channel: float = 0.98

    def __post_init__(self):
        for name in ("eps_opt", "eps_smf", "eps_spad", "eps_channel"):
            v = getattr(self, name)
            if not 0 <= v <= 1:
                raise ValueError(f"{name}={v} outside [0, 1]")

    @property
    def system(self) -> float:
        # The system photon crosses two fibre couplings.
        return self.eps_opt * self.eps_channel * self.eps_smf**2 * self.eps_spad

    @property
    def ancilla(self) -> float:
        return self.eps_opt * self.eps_smf * self.eps_spad

    @property
    def coincidence(self) -> float:
        return self.system * self.ancilla


# Channel transmissions of the two interferometric setups.
PAULI_SETUP = EfficiencyModel(eps_channel=0.98)
AD_SETUP = EfficiencyModel(eps_channel=0.6)


@dataclass(frozen=True)
class CoincidenceSet:
    axis: str
    counts: np.ndarray
    integration_time: float = 10.0
    flux: float = 0.0

    def __post_init__(self):
        c = np.array(self.counts, dtype=float)
        if c.shape != (2, 2):
            raise ValueError(f"coincidence counts must be 2x2, got {c.shape}")
        if not np.all(np.isfinite(c)) or np.any(c < 0):
            raise ValueError(f"coincidence counts must be finite and >= 0: {c.tolist()}")
        c.flags.writeable = False
        object.__setattr__(self, "counts", c)

    @property
    def total(self) -> float:
        return float(self.counts.sum())


def joint_probabilities(ch: KrausChannel, fidelity: float, axis: str) -> np.ndarray:
    """p_F(j, i) for the Werner probe after the channel, measured on ``axis``."""
    rho_out = apply_extended(ch, werner_state(fidelity).matrix)
    basis = pauli_basis(axis)
    p = np.empty((2, 2))
    for j in range(2):
        for i in range(2):
            proj = kron(basis.projector(j), basis.projector(i))
            p[j, i] = np.trace(proj @ rho_out).real
    return p


def expected_counts(p: np.ndarray, eff: EfficiencyModel, flux: float, t: float,
                    axis: str = "z") -> CoincidenceSet:
    """Mean coincidence counts flux * t * eps_sa * p(j, i) (real valued)."""
    if flux <= 0 or t <= 0:
        raise ValueError("flux and integration time must be positive")
    return CoincidenceSet(axis, flux * t * eff.coincidence * np.asarray(p), t, flux)


def flux_for_total(total: float, eff: EfficiencyModel, t: float) -> float:
    """Pair flux giving ``total`` expected coincidences per axis."""
    return total / (eff.coincidence * t)


def poisson_draw(mean: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Poisson variates: inversion below mean 30, rounded Gaussian above.

    One uniform and one normal are consumed per element regardless of the
    branch, which keeps streams aligned for a fixed seed.
    """
    mean = np.asarray(mean, dtype=float)
    u = rng.random(mean.shape)
    z = rng.standard_normal(mean.shape)
    out = np.maximum(np.rint(mean + np.sqrt(mean) * z), 0.0)
    small = mean < POISSON_INVERSION_MAX_MEAN
    if np.any(small):
        lam = mean[small]
        uu = u[small]
        k = np.zeros_like(lam)
        term = np.exp(-lam)
        cdf = term.copy()
        active = uu > cdf
        # Tail beyond mean + 12 sqrt(mean) + 20 has probability < 1e-16 here.
        for step in range(1, 120):
            if not active.any():
                break
            term = term * lam / step
            k = np.where(active, k + 1, k)
            cdf = cdf + term
            active = active & (uu > cdf)
        out[small] = k
    return out


def sample_counts(expected: CoincidenceSet, seed) -> CoincidenceSet:
    """Independent Poisson resample of every count; deterministic in ``seed``.

    ``seed`` may be an int, a ``SeedSequence`` or a ``Generator``.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return replace(expected, counts=poisson_draw(expected.counts, rng))


def mixture_counts(components) -> CoincidenceSet:
    """Weighted sum of coincidence sets measured on the same axis."""
    components = list(components)
    if not components:
        raise ValueError("empty mixture")
    weights = np.array([w for w, _ in components], dtype=float)
    if np.any(weights < 0) or abs(weights.sum() - 1) > 1e-12:
        raise ValueError(f"mixture weights must be >= 0 and sum to 1, got {weights.tolist()}")
    first = components[0][1]
    if any(c.axis != first.axis for _, c in components):
        raise ValueError("mixture components measured on different axes")
    total = sum(w * c.counts for w, c in components)
    return replace(first, counts=total)


def pauli_mixture_counts(p: PauliParams, fidelity: float, axis: str, eff: EfficiencyModel,
                         flux: float, t: float) -> CoincidenceSet:
    """Expected counts of a Pauli channel realised as a weighted mix of unitaries."""
    parts = []
    for op, w in p.weights().items():
        if w > 0:
            probs = joint_probabilities(unitary_channel(op), fidelity, axis)
            parts.append((w, expected_counts(probs, eff, flux, t, axis)))
    return mixture_counts(parts)


def ad_angle_map(omega_deg: float) -> float:
    """Damping probability set by a half-wave plate at ``omega_deg`` (45..90 deg)."""
    if not 45 - 1e-12 <= omega_deg <= 90 + 1e-12:
        raise ValueError(f"waveplate angle {omega_deg} outside [45, 90] degrees")
    return 1 - math.cos(2 * math.radians(omega_deg)) ** 2


def ad_angle_inverse(eta: float) -> float:
    """Waveplate angle in degrees producing damping ``eta``."""
    if not 0 <= eta <= 1:
        raise ValueError(f"eta={eta} outside [0, 1]")
    return math.degrees(math.acos(-math.sqrt(1 - eta)) / 2)

