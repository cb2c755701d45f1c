"""Hamiltonian builders for the NMR measurement register.

All frequencies are in Hz and every builder returns angular Hamiltonians
(rad/s), i.e. with the explicit ``2*pi`` factors. Spin 0 is the measuring
(apparatus) qubit; spins 1..n are the system.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .operators import ValidationError, spin_op

__all__ = [
    "CouplingKind",
    "SpinSystem",
    "RfDrive",
    "MeasurementHamiltonian",
    "NATURAL_COUPLINGS",
    "h_nmr",
    "h_free",
    "h_meas_single",
    "h_meas_pps",
    "h_s_xxx",
    "h_meas_xxx",
    "ising_term",
    "exchange_term",
]

TWO_PI = 2.0 * np.pi

# natural J couplings of the 13C / 19F / 1H register, Hz
NATURAL_COUPLINGS = {(1, 2): 48.3, (0, 2): 160.7, (0, 1): -194.4}


class CouplingKind(str, enum.Enum):
    ISING_ZZ = "ising"
    XXX = "xxx"


@dataclass(frozen=True)
class SpinSystem:
    """Apparatus spin 0 plus ``num_system_spins`` system spins.

    ``shifts`` lists one frequency per spin (apparatus first). ``couplings``
    maps an index pair ``(j, k)`` to a strength in Hz; ``kinds`` optionally
    tags a pair as :attr:`CouplingKind.XXX` (default Ising z-z).
    """

    num_system_spins: int
    shifts: tuple[float, ...] = ()
    couplings: dict[tuple[int, int], float] = field(default_factory=dict)
    kinds: dict[tuple[int, int], CouplingKind] = field(default_factory=dict)
    apparatus_index: int = 0

    def __post_init__(self):
        n = self.num_spins
        if self.num_system_spins < 1:
            raise ValidationError("need at least one system spin")
        if self.apparatus_index != 0:
            raise ValidationError("the apparatus must be spin 0")
        shifts = tuple(float(s) for s in self.shifts) or (0.0,) * n
        if len(shifts) != n:
            raise ValidationError(f"expected {n} shifts, got {len(shifts)}")
        object.__setattr__(self, "shifts", shifts)
        couplings, kinds = {}, {}
        for (j, k), value in self.couplings.items():
            if j == k:
                raise ValidationError("self-coupling is not allowed")
            if not (0 <= j < n and 0 <= k < n):
                raise IndexError(f"coupling ({j}, {k}) out of range")
            key = (min(j, k), max(j, k))
            if key in couplings and couplings[key] != value:
                raise ValidationError(f"asymmetric coupling table at {key}")
            couplings[key] = float(value)
        for (j, k), kind in self.kinds.items():
            kinds[(min(j, k), max(j, k))] = CouplingKind(kind)
        object.__setattr__(self, "couplings", couplings)
        object.__setattr__(self, "kinds", kinds)

    @property
    def num_spins(self) -> int:
        return self.num_system_spins + 1

    @property
    def dim(self) -> int:
        return 2**self.num_spins

    def kind(self, j: int, k: int) -> CouplingKind:
        return self.kinds.get((min(j, k), max(j, k)), CouplingKind.ISING_ZZ)

    def coupling(self, j: int, k: int) -> float:
        return self.couplings.get((min(j, k), max(j, k)), 0.0)

    def coupling_matrix(self) -> np.ndarray:
        n = self.num_spins
        table = np.zeros((n, n))
        for (j, k), value in self.couplings.items():
            table[j, k] = table[k, j] = value
        return table

    def max_coupling(self) -> float:
        return max((abs(v) for v in self.couplings.values()), default=0.0)


@dataclass(frozen=True)
class RfDrive:
    """RF amplitudes ``P_j`` and rotating-frame offsets ``delta_j`` (Hz), one per system spin."""

    amplitudes: tuple[float, ...]
    shifts: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "amplitudes", tuple(float(p) for p in self.amplitudes))
        object.__setattr__(self, "shifts", tuple(float(d) for d in self.shifts))
        if len(self.amplitudes) != len(self.shifts):
            raise ValidationError("one amplitude and one shift per system spin")


class MeasurementHamiltonian(NamedTuple):
    """``H_M`` split into system, apparatus and interaction parts (full space)."""

    system: np.ndarray
    apparatus: np.ndarray
    interaction: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return self.system + self.apparatus + self.interaction


def ising_term(num_spins: int, j: int, k: int) -> np.ndarray:
    return spin_op(num_spins, j, "z") @ spin_op(num_spins, k, "z")


def exchange_term(num_spins: int, j: int, k: int) -> np.ndarray:
    """Isotropic ``I^j . I^k``."""
    return sum(spin_op(num_spins, j, a) @ spin_op(num_spins, k, a) for a in "xyz")


def h_nmr(sys: SpinSystem) -> np.ndarray:
    """Natural weak-coupling Hamiltonian, diagonal in the Zeeman basis."""
    if any(sys.kind(j, k) is CouplingKind.XXX for j, k in sys.couplings):
        raise ValidationError("the natural NMR Hamiltonian has Ising couplings only")
    n = sys.num_spins
    h = np.zeros((sys.dim, sys.dim), dtype=complex)
    for j, nu in enumerate(sys.shifts):
        h += TWO_PI * nu * spin_op(n, j, "z")
    for (j, k), value in sys.couplings.items():
        h += TWO_PI * value * ising_term(n, j, k)
    return h


def h_free(sys: SpinSystem, drive: RfDrive) -> np.ndarray:
    """RF-driven free evolution on the system spins; identity on the apparatus."""
    n = sys.num_spins
    if len(drive.amplitudes) != sys.num_system_spins:
        raise ValidationError("drive must list one amplitude per system spin")
    h = np.zeros((sys.dim, sys.dim), dtype=complex)
    for j, (p, d) in enumerate(zip(drive.amplitudes, drive.shifts), start=1):
        h += TWO_PI * (d * spin_op(n, j, "z") + p * spin_op(n, j, "x"))
    return h


def h_meas_single(delta1: float, j01: float, parts: bool = False):
    """``2 pi (delta1 I_z^1 + J01 I_z^0 I_z^1)`` on apparatus + one system spin."""
    system = TWO_PI * delta1 * spin_op(2, 1, "z")
    interaction = TWO_PI * j01 * ising_term(2, 0, 1)
    split = MeasurementHamiltonian(system, np.zeros_like(system), interaction)
    return split if parts else split.total


def h_meas_pps(sys: SpinSystem, parts: bool = False):
    """Three-spin Ising measurement Hamiltonian with the apparatus shift forced to zero."""
    if sys.num_system_spins != 2:
        raise ValidationError("the product-state measurement needs two system spins")
    if any(sys.kind(j, k) is CouplingKind.XXX for j, k in sys.couplings):
        raise ValidationError("the product-state measurement uses Ising couplings only")
    n = sys.num_spins
    system = np.zeros((sys.dim, sys.dim), dtype=complex)
    interaction = np.zeros_like(system)
    for j in range(1, n):
        system += TWO_PI * sys.shifts[j] * spin_op(n, j, "z")
    for (j, k), value in sys.couplings.items():
        term = TWO_PI * value * ising_term(n, j, k)
        if j == 0:
            interaction += term
        else:
            system += term
    split = MeasurementHamiltonian(system, np.zeros_like(system), interaction)
    return split if parts else split.total


def _symmetric(value, name: str) -> float:
    if np.ndim(value) == 0:
        return float(value)
    a, b = (float(v) for v in value)
    if a != b:
        raise ValidationError(
            f"{name} must be equal on both system spins for [H_S, H_int] = 0, got {a} and {b}"
        )
    return a


def h_s_xxx(delta, j12: float) -> np.ndarray:
    """System part ``2 pi [delta (I_z^1 + I_z^2) + J12 I^1.I^2]`` on the two system spins alone."""
    delta = _symmetric(delta, "delta")
    sz = spin_op(2, 0, "z") + spin_op(2, 1, "z")
    return TWO_PI * (delta * sz + j12 * exchange_term(2, 0, 1))


def h_meas_xxx(delta, j12_xxx: float, j0_coupling, parts: bool = False):
    """Heisenberg-XXX measurement Hamiltonian on apparatus + two system spins.

    ``delta`` and ``j0_coupling`` may be scalars or equal pairs; unequal pairs
    break the QND condition and are rejected.
    """
    delta = _symmetric(delta, "delta")
    j0 = _symmetric(j0_coupling, "apparatus coupling")
    system = np.kron(np.eye(2), h_s_xxx(delta, j12_xxx))
    interaction = TWO_PI * j0 * (ising_term(3, 0, 1) + ising_term(3, 0, 2))
    split = MeasurementHamiltonian(system, np.zeros_like(system), interaction)
    return split if parts else split.total
