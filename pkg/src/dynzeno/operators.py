"""Dense operator algebra for small spin registers.

Spin 0 is always the leftmost tensor factor (most significant bit of the
basis index). ``|0>`` is the ``m = +1/2`` eigenstate of ``I_z`` and spin
operators follow ``I_a = sigma_a / 2`` with hbar = 1.
"""

from __future__ import annotations

import enum
from functools import reduce

import numpy as np

__all__ = [
    "ValidationError",
    "SpinAxis",
    "PAULI",
    "IDENTITY2",
    "HERMITIAN_ATOL",
    "UNITARY_ATOL",
    "spin_op",
    "raising_op",
    "kron",
    "embed",
    "is_hermitian",
    "is_unitary",
    "expm_unitary",
    "apparatus_block",
    "partial_trace",
    "reduced_spin_state",
    "bloch_vector",
    "to_density",
    "state_fidelity",
    "commutator_norm",
    "basis_state",
]

HERMITIAN_ATOL = 1e-12
UNITARY_ATOL = 1e-10


class ValidationError(ValueError):
    """Raised when an input violates a physical precondition."""


class SpinAxis(str, enum.Enum):
    X = "x"
    Y = "y"
    Z = "z"


IDENTITY2 = np.eye(2, dtype=complex)
PAULI = {
    SpinAxis.X: np.array([[0, 1], [1, 0]], dtype=complex),
    SpinAxis.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    SpinAxis.Z: np.array([[1, 0], [0, -1]], dtype=complex),
}


def kron(*mats: np.ndarray) -> np.ndarray:
    """Kronecker product of one or more matrices, left to right."""
    return reduce(np.kron, [np.asarray(m, dtype=complex) for m in mats])


def embed(op: np.ndarray, num_spins: int, target: int) -> np.ndarray:
    """Place a single-spin 2x2 operator on ``target`` inside ``num_spins`` spins."""
    if not 0 <= target < num_spins:
        raise IndexError(f"spin index {target} out of range for {num_spins} spins")
    factors = [IDENTITY2] * num_spins
    factors[target] = np.asarray(op, dtype=complex)
    return kron(*factors)


def spin_op(num_spins: int, target: int, axis: SpinAxis | str) -> np.ndarray:
    """Spin-1/2 operator ``I_axis`` acting on spin ``target``.

    >>> spin_op(1, 0, "z").real
    array([[ 0.5,  0. ],
           [ 0. , -0.5]])
    """
    return embed(0.5 * PAULI[SpinAxis(axis)], num_spins, target)


def raising_op(num_spins: int, target: int) -> np.ndarray:
    """``I_+ = I_x + i I_y`` on spin ``target``."""
    return spin_op(num_spins, target, "x") + 1j * spin_op(num_spins, target, "y")


def basis_state(bits: str | list[int]) -> np.ndarray:
    """Computational basis ket from a bit string such as ``"010"``."""
    bits = [int(b) for b in bits]
    idx = 0
    for b in bits:
        idx = 2 * idx + b
    psi = np.zeros(2 ** len(bits), dtype=complex)
    psi[idx] = 1.0
    return psi


def is_hermitian(a: np.ndarray, atol: float = HERMITIAN_ATOL) -> bool:
    a = np.asarray(a)
    return a.ndim == 2 and a.shape[0] == a.shape[1] and np.max(np.abs(a - a.conj().T), initial=0.0) < atol


def is_unitary(u: np.ndarray, atol: float = UNITARY_ATOL) -> bool:
    u = np.asarray(u)
    eye = np.eye(u.shape[0])
    return np.max(np.abs(u.conj().T @ u - eye), initial=0.0) < atol


def expm_unitary(h: np.ndarray, t: float) -> np.ndarray:
    """Return ``exp(-i h t)`` for Hermitian ``h`` (rad/s) and time ``t`` (s).

    Uses the Hermitian eigendecomposition, which is exact up to rounding for
    the few-spin dimensions handled here.
    """
    h = np.asarray(h, dtype=complex)
    if not is_hermitian(h, atol=1e-9 * max(1.0, np.max(np.abs(h), initial=0.0))):
        raise ValidationError("expm_unitary requires a Hermitian generator")
    if t == 0:
        return np.eye(h.shape[0], dtype=complex)
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def apparatus_block(u_tot: np.ndarray, apparatus_state: int, apparatus_index: int = 0) -> np.ndarray:
    """Return ``<a|U|a>``, the block of ``u_tot`` on the system spins.

    ``apparatus_state`` 0 gives ``U_-`` (m0 = +1/2) and 1 gives ``U_+`` (m0 = -1/2).
    """
    if apparatus_state not in (0, 1):
        raise ValidationError(f"apparatus basis index must be 0 or 1, got {apparatus_state!r}")
    u_tot = np.asarray(u_tot)
    dim = u_tot.shape[0]
    n = int(round(np.log2(dim)))
    if 2**n != dim or n < 2:
        raise ValidationError(f"dimension {dim} is not 2^(n+1) with n >= 1")
    tensor = u_tot.reshape((2,) * (2 * n))
    tensor = np.moveaxis(tensor, (apparatus_index, n + apparatus_index), (0, n))
    sub = dim // 2
    return tensor.reshape(2, sub, 2, sub)[apparatus_state, :, apparatus_state, :].copy()


def partial_trace(rho: np.ndarray, keep: list[int] | tuple[int, ...], num_spins: int) -> np.ndarray:
    """Reduced density matrix on the spins listed in ``keep`` (order preserved)."""
    keep = sorted(keep)
    rho = np.asarray(rho).reshape((2,) * (2 * num_spins))
    traced = [q for q in range(num_spins) if q not in keep]
    # trace out from the highest index down so axis numbers stay valid
    n = num_spins
    for q in reversed(traced):
        rho = np.trace(rho, axis1=q, axis2=q + n)
        n -= 1
    d = 2 ** len(keep)
    return rho.reshape(d, d)


def to_density(state: np.ndarray) -> np.ndarray:
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1:
        return np.outer(state, state.conj())
    return state


def reduced_spin_state(state: np.ndarray, target: int, num_spins: int) -> np.ndarray:
    return partial_trace(to_density(state), [target], num_spins)


def bloch_vector(rho1: np.ndarray) -> np.ndarray:
    """Bloch vector ``(<sx>, <sy>, <sz>)`` of a single-spin density matrix."""
    rho1 = np.asarray(rho1)
    return np.array([np.real(np.trace(rho1 @ PAULI[a])) for a in SpinAxis])


def _psd_sqrt(rho: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(rho)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def _check_density(rho: np.ndarray, name: str, atol: float = 1e-9) -> None:
    if abs(np.trace(rho) - 1.0) > atol:
        raise ValidationError(f"{name} must have unit trace, got {np.trace(rho):.6g}")
    if not is_hermitian(rho, atol=atol):
        raise ValidationError(f"{name} must be Hermitian")
    if np.linalg.eigvalsh(rho).min() < -atol:
        raise ValidationError(f"{name} must be positive semidefinite")


def state_fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Uhlmann fidelity ``(Tr sqrt(sqrt(rho) sigma sqrt(rho)))**2``.

    Kets are accepted and promoted to projectors.
    """
    rho, sigma = to_density(rho), to_density(sigma)
    _check_density(rho, "rho")
    _check_density(sigma, "sigma")
    s = _psd_sqrt(rho)
    inner = s @ sigma @ s
    inner = 0.5 * (inner + inner.conj().T)
    w = np.clip(np.linalg.eigvalsh(inner), 0.0, None)
    return float(min(1.0, max(0.0, np.sum(np.sqrt(w)) ** 2)))


def commutator_norm(a: np.ndarray, b: np.ndarray) -> float:
    """Largest entry magnitude of ``ab - ba``."""
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a @ b - b @ a), initial=0.0))
