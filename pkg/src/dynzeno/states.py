"""Initial states: pseudopure ensembles, apparatus superposition and the pseudo-entangled pair."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .operators import (
    IDENTITY2,
    PAULI,
    SpinAxis,
    ValidationError,
    expm_unitary,
    is_hermitian,
    kron,
    spin_op,
)

__all__ = [
    "PHI_PLUS",
    "HADAMARD",
    "CNOT",
    "EigenCheck",
    "check_density",
    "pps",
    "apparatus_superposition",
    "rotate_apparatus",
    "phi_plus_circuit",
    "prepare_phi_plus",
    "eigencheck_phi_plus",
]

PHI_PLUS = np.array([0, 1, 1, 0], dtype=complex) / np.sqrt(2)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
# control = first factor, target = second factor
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)


def check_density(rho: np.ndarray, atol: float = 1e-12) -> None:
    """Raise :class:`ValidationError` unless ``rho`` is a valid density matrix."""
    rho = np.asarray(rho)
    if abs(np.trace(rho) - 1) > atol:
        raise ValidationError(f"trace {np.trace(rho).real:.15g} != 1")
    if not is_hermitian(rho, atol=atol):
        raise ValidationError("density matrix is not Hermitian")
    if np.linalg.eigvalsh(rho).min() < -1e-10:
        raise ValidationError("density matrix has a negative eigenvalue")


def pps(epsilon: float, num_spins: int = 3) -> np.ndarray:
    """Pseudopure state ``(1 - eps) 1/d + eps |0..0><0..0|``."""
    if not 0.0 <= epsilon <= 1.0:
        raise ValidationError(f"polarization must lie in [0, 1], got {epsilon}")
    d = 2**num_spins
    rho = (1.0 - epsilon) * np.eye(d, dtype=complex) / d
    rho[0, 0] += epsilon
    return rho


def apparatus_superposition() -> np.ndarray:
    """``(|0> + |1>)/sqrt(2)``."""
    return np.array([1, 1], dtype=complex) / np.sqrt(2)


def rotate_apparatus(rho: np.ndarray, num_spins: int = 3) -> np.ndarray:
    """Apply a pi/2 pulse about y to spin 0, taking ``|0>`` to ``(|0> + |1>)/sqrt(2)``."""
    u = expm_unitary(spin_op(num_spins, 0, "y"), np.pi / 2)
    return u @ rho @ u.conj().T


def phi_plus_circuit() -> np.ndarray:
    """Two-qubit circuit NOT(spin 2), Hadamard(spin 1), CNOT(1 -> 2) mapping ``|00>`` to ``|phi+>``."""
    not2 = kron(IDENTITY2, PAULI[SpinAxis.X])
    had1 = kron(HADAMARD, IDENTITY2)
    return CNOT @ had1 @ not2


def prepare_phi_plus(rho: np.ndarray) -> np.ndarray:
    """Conjugate ``rho`` by :func:`phi_plus_circuit` on the two system spins.

    Accepts a 4x4 system state or an 8x8 apparatus+system state (the
    apparatus factor is left untouched).
    """
    rho = np.asarray(rho, dtype=complex)
    gate = phi_plus_circuit()
    if rho.shape == (8, 8):
        gate = np.kron(IDENTITY2, gate)
    elif rho.shape != (4, 4):
        raise ValidationError(f"expected a 4x4 or 8x8 density matrix, got shape {rho.shape}")
    return gate @ rho @ gate.conj().T


class EigenCheck(NamedTuple):
    is_eigen: bool
    eigenvalue: float
    gap: float


def eigencheck_phi_plus(h_s: np.ndarray, atol: float = 1e-9) -> EigenCheck:
    """Is ``|phi+>`` an eigenvector of the two-spin ``h_s``, and how isolated is it?

    ``gap`` is the distance from ``<phi+|h_s|phi+>`` to the nearest other
    eigenvalue; it is 0 for a degenerate level.
    """
    h_s = np.asarray(h_s, dtype=complex)
    if h_s.shape != (4, 4):
        raise ValidationError("h_s must act on the two system spins (4x4)")
    lam = float(np.real(PHI_PLUS.conj() @ h_s @ PHI_PLUS))
    residual = np.linalg.norm(h_s @ PHI_PLUS - lam * PHI_PLUS)
    scale = max(1.0, np.max(np.abs(h_s)))
    is_eigen = bool(residual < atol * scale)
    w = np.linalg.eigvalsh(h_s)
    # drop the single eigenvalue that belongs to phi+ itself
    order = np.argsort(np.abs(w - lam))
    others = w[order[1:]]
    gap = float(np.min(np.abs(others - lam)))
    if gap < atol * scale:
        gap = 0.0
    return EigenCheck(is_eigen, lam, gap)
