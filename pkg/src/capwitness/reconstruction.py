"""From coincidence counts to deconvolved transition matrices and error pairs."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .capacity import RELABELINGS, ErrorPair
from .errors import DataError, NumericalError
from .protocol import SINGULAR_F_TOL, CoincidenceSet

SANITIZE_MODES = ("paper-abs", "clamp", "none")
STOCHASTIC_TOL = 1e-9


@dataclass(frozen=True)
class TransitionMatrix:
    """Q(j|i) stored as ``matrix[j, i]``; columns are inputs.

    ``sanitization`` is one of ``raw`` (straight from deconvolution),
    ``table`` (assembled from published half-tables, columns need not sum
    to one) or a sanitize mode name.
    """

    axis: str
    matrix: np.ndarray
    sanitization: str = "raw"

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.shape != (2, 2):
            raise ValueError(f"transition matrix must be 2x2, got {m.shape}")
        if self.sanitization != "table":
            dev = np.max(np.abs(m.sum(axis=0) - 1))
            if dev > STOCHASTIC_TOL:
                raise ValueError(f"columns of Q do not sum to 1 (deviation {dev:.3e})")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    def __getitem__(self, ji):
        return self.matrix[ji]


def _deconvolution_weights(fidelity: float) -> tuple[float, float]:
    if abs(4 * fidelity - 1) <= SINGULAR_F_TOL:
        raise NumericalError(f"fidelity {fidelity} too close to 1/4; deconvolution is singular")
    return 1 + 2 * fidelity, 2 * (1 - fidelity)


def deconvolve_counts(counts, fidelity: float, axis: str) -> np.ndarray:
    """Batched transition matrices from counts of shape (..., 2, 2).

    For the y setting the ancilla index enters swapped, because transposing
    a circular-basis projector exchanges R and L. Rows whose denominator is
    not strictly positive come back as NaN.
    """
    a, b = _deconvolution_weights(fidelity)
    c = np.asarray(counts, dtype=float)
    if axis == "y":
        c = c[..., ::-1]
    c00, c01 = c[..., 0, 0], c[..., 0, 1]
    c10, c11 = c[..., 1, 0], c[..., 1, 1]
    col0 = c00 + c10
    col1 = c01 + c11
    # Denominators carry the sign of 4F - 1; flip so a valid column is > 0.
    sgn = 1.0 if fidelity > 0.25 else -1.0
    num0 = sgn * (a * c00 - b * c01)
    den0 = sgn * (a * col0 - b * col1)
    num1 = sgn * (a * c01 - b * c00)
    den1 = sgn * (a * col1 - b * col0)
    with np.errstate(divide="ignore", invalid="ignore"):
        q00 = np.where(den0 > 0, num0 / den0, np.nan)
        q01 = np.where(den1 > 0, num1 / den1, np.nan)
    q = np.empty(c.shape)
    q[..., 0, 0] = q00
    q[..., 1, 0] = 1 - q00
    q[..., 0, 1] = q01
    q[..., 1, 1] = 1 - q01
    return q


def deconvolve_Q(counts: CoincidenceSet, fidelity: float) -> TransitionMatrix:
    """Noise-corrected transition matrix of one measurement setting.

    Raises
    ------
    NumericalError
        When ``fidelity`` is within 1e-6 of 1/4.
    DataError
        When an input column has no (deconvolved) counts.
    """
    q = deconvolve_counts(counts.counts, fidelity, counts.axis)
    if np.any(np.isnan(q)):
        raise DataError(f"axis {counts.axis}: zero or negative deconvolved column total")
    return TransitionMatrix(counts.axis, q, "raw")


def deconvolve_joint(counts, fidelity: float, total: float | None = None) -> np.ndarray:
    """Unbiased F=1 joint probabilities from Werner-probe counts.

    Counts (shape (..., 2, 2)) are normalised by ``total`` when the expected
    number of coincidences is known, otherwise by their observed sum. The
    ancilla outcome is indexed as measured, with no y-axis swap.
    """
    a, b = _deconvolution_weights(fidelity)
    c = np.asarray(counts, dtype=float)
    p = c / (total if total is not None else c.sum(axis=(-2, -1), keepdims=True))
    return (a * p - b * p[..., ::-1]) / (4 * fidelity - 1)


def sanitize(q: TransitionMatrix, mode: str) -> TransitionMatrix:
    """Bring entries into [0, 1] and renormalise columns.

    ``paper-abs`` flips the sign of negative entries, ``clamp`` zeroes them,
    ``none`` passes the matrix through untouched.
    """
    if mode not in SANITIZE_MODES:
        raise ValueError(f"unknown sanitization mode {mode!r}")
    if mode == "none":
        return q
    m = sanitize_array(q.matrix, mode)
    return TransitionMatrix(q.axis, m, mode)


def sanitize_array(m: np.ndarray, mode: str) -> np.ndarray:
    """Batch ``sanitize`` on arrays of shape (..., 2, 2)."""
    m = np.asarray(m, dtype=float)
    if mode == "paper-abs":
        m = np.abs(m)
    elif mode == "clamp":
        m = np.clip(m, 0.0, None)
    elif mode == "none":
        return m
    else:
        raise ValueError(f"unknown sanitization mode {mode!r}")
    return m / m.sum(axis=-2, keepdims=True)


def relabel(m: np.ndarray, swap_output: bool, swap_input: bool) -> np.ndarray:
    if swap_output:
        m = m[::-1, :]
    if swap_input:
        m = m[:, ::-1]
    return m


def identify_errors(q: TransitionMatrix) -> ErrorPair:
    """Pick the bit relabeling that puts Q into canonical (eps0, eps1) form.

    Relabelings are tried in the order identity, output swap, input swap,
    both; the first that satisfies the convention wins.
    """
    m = q.matrix
    if np.any(m < 0) or np.any(m > 1):
        raise ValueError(f"axis {q.axis}: Q has entries outside [0, 1]; sanitize first")
    tol = 1e-12
    for swap_out, swap_in in RELABELINGS:
        r = relabel(m, swap_out, swap_in)
        e0, e1 = float(r[1, 0]), float(r[0, 1])
        if e0 <= 0.5 + tol and e0 <= e1 + tol and e0 <= 1 - e1 + tol:
            return ErrorPair(e0, e1, (swap_out, swap_in))
    raise ValueError(f"axis {q.axis}: no bit relabeling of {m.tolist()} is canonical")
