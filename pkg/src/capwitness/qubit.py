"""Small-matrix qubit algebra: Pauli operators, eigenbases, tensor products.

Everything here works on plain ``numpy`` arrays. Validated density matrices
are returned as read-only copies so they can be shared freely.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import DensityMatrixError

TOL = 1e-10
AXES = ("z", "x", "y")

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = {"x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}

_S = 1 / np.sqrt(2)
# First vector is logical 0 on every axis: |H>, |+>, |R>.
_BASES = {
    "z": (np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex)),
    "x": (np.array([_S, _S], dtype=complex), np.array([_S, -_S], dtype=complex)),
    "y": (np.array([_S, -1j * _S], dtype=complex), np.array([_S, 1j * _S], dtype=complex)),
}


class QubitBasis(NamedTuple):
    axis: str
    vectors: tuple[np.ndarray, np.ndarray]

    def projector(self, k: int) -> np.ndarray:
        v = self.vectors[k]
        return np.outer(v, v.conj())


def _check_axis(axis: str) -> str:
    if axis not in _BASES:
        raise ValueError(f"unknown axis {axis!r}; expected one of x, y, z")
    return axis


def pauli_basis(axis: str) -> QubitBasis:
    """Return the ordered eigenbasis of sigma_axis (logical 0 first)."""
    _check_axis(axis)
    v0, v1 = _BASES[axis]
    return QubitBasis(axis, (v0.copy(), v1.copy()))


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with the system factor first, ancilla second."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != (2, 2) or b.shape != (2, 2):
        raise ValueError(f"kron expects two 2x2 matrices, got {a.shape} and {b.shape}")
    return np.kron(a, b)


def bell_phi_plus() -> np.ndarray:
    """|Phi+><Phi+| = (|00> + |11>)(<00| + <11|) / 2."""
    v = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
    return np.outer(v, v.conj())


def is_hermitian(m: np.ndarray, tol: float = TOL) -> bool:
    return bool(np.max(np.abs(m - m.conj().T)) <= tol)


def expectation(obs: np.ndarray, state: np.ndarray, tol: float = TOL) -> float:
    """Tr[obs @ state] for a Hermitian observable.

    Raises
    ------
    DensityMatrixError
        If ``obs`` is not Hermitian or the trace carries an imaginary part
        larger than ``tol``.
    """
    obs = np.asarray(obs)
    state = np.asarray(state)
    if obs.shape != state.shape:
        raise ValueError(f"shape mismatch: {obs.shape} vs {state.shape}")
    if not is_hermitian(obs, tol):
        raise DensityMatrixError("observable is not Hermitian")
    val = np.trace(obs @ state)
    if abs(val.imag) > tol:
        raise DensityMatrixError(f"expectation has imaginary part {val.imag:.3e}")
    return float(val.real)


def density_violations(m: np.ndarray, tol: float = TOL) -> list[str]:
    """List the density-matrix invariants that ``m`` breaks (empty if valid)."""
    problems = []
    herm_dev = float(np.max(np.abs(m - m.conj().T)))
    if herm_dev > tol:
        problems.append(f"hermiticity: max |m - m^dag| = {herm_dev:.3e}")
    tr = np.trace(m)
    if abs(tr - 1) > tol:
        problems.append(f"trace: |Tr m - 1| = {abs(tr - 1):.3e}")
    # eigvalsh only reads one triangle, so symmetrise first.
    eig = np.linalg.eigvalsh((m + m.conj().T) / 2)
    if eig[0] < -tol:
        problems.append(f"positivity: min eigenvalue = {eig[0]:.3e}")
    return problems


def validate_density(m, tol: float = TOL) -> np.ndarray:
    """Check hermiticity, unit trace and positivity; return a read-only copy.

    Raises
    ------
    DensityMatrixError
        Listing every failed invariant and the size of the violation.
    """
    m = np.array(m, dtype=complex)
    if m.shape not in ((2, 2), (4, 4)):
        raise ValueError(f"density matrix must be 2x2 or 4x4, got {m.shape}")
    problems = density_violations(m, tol)
    if problems:
        raise DensityMatrixError("invalid density matrix: " + "; ".join(problems))
    m.flags.writeable = False
    return m
