"""Measurement-interleaved evolution ``[M(tau_m) U(tau)]^N`` and its readout."""

from __future__ import annotations

import dataclasses
import enum
from dataclasses import dataclass, field

import numpy as np

from .hamiltonians import RfDrive, SpinSystem, h_free
from .operators import (
    ValidationError,
    apparatus_block,
    bloch_vector,
    commutator_norm,
    expm_unitary,
    partial_trace,
    spin_op,
)
from .states import apparatus_superposition

__all__ = [
    "ZenoProtocol",
    "ZenoTrace",
    "Regime",
    "RegimeThresholds",
    "RegimeResult",
    "STRONG_DRIVE_RATIO",
    "run_protocol",
    "coherence_series",
    "cycle_propagator",
    "total_propagator",
    "coherence",
    "critical_time_single",
    "critical_time_pps",
    "critical_time_xxx",
    "phase_shift",
    "classify_regime",
    "apply_decay",
    "find_extrema",
]

# P_j must exceed this multiple of the largest |J| for the U/M separation to hold
STRONG_DRIVE_RATIO = 50.0


@dataclass(frozen=True)
class ZenoProtocol:
    """Timing, drive and initial state of one Zeno run.

    ``tau`` and ``tau_m`` are in seconds. ``system_initial`` is a ket on the
    system spins; ``apparatus_initial`` defaults to ``(|0> + |1>)/sqrt(2)``.
    ``decay_k`` (1/s) adds the phenomenological ``exp(-k tau_m)`` loss per
    measurement to the reported signal.
    """

    tau: float
    tau_m: float
    n_cycles: int
    drive: RfDrive
    system_initial: np.ndarray
    apparatus_initial: np.ndarray = field(default_factory=apparatus_superposition)
    decay_k: float | None = None

    def __post_init__(self):
        if not self.tau > 0:
            raise ValidationError(f"tau must be positive, got {self.tau}")
        if self.tau_m < 0:
            raise ValidationError(f"tau_m must be non-negative, got {self.tau_m}")
        if self.n_cycles < 0 or int(self.n_cycles) != self.n_cycles:
            raise ValidationError(f"n_cycles must be a non-negative integer, got {self.n_cycles}")
        if self.decay_k is not None and self.decay_k < 0:
            raise ValidationError("decay constant must be non-negative")
        for name in ("system_initial", "apparatus_initial"):
            v = np.asarray(getattr(self, name), dtype=complex)
            if v.ndim != 1:
                raise ValidationError(f"{name} must be a ket")
            if abs(np.linalg.norm(v) - 1.0) > 1e-12:
                raise ValidationError(f"{name} is not normalized (norm {np.linalg.norm(v):.15g})")
            object.__setattr__(self, name, v)
        if self.apparatus_initial.shape != (2,):
            raise ValidationError("the apparatus is a single qubit")


@dataclass
class ZenoTrace:
    """Per-cycle record, rows ``k = 0..N``.

    ``bloch`` has shape ``(N + 1, n_system, 3)``; ``system_states`` holds the
    reduced system density matrix after each cycle and ``fidelity`` its
    overlap with the initial system ket.
    """

    tau: float
    tau_m: float
    coherence: np.ndarray
    signal: np.ndarray
    bloch: np.ndarray
    fidelity: np.ndarray
    system_states: np.ndarray
    decay_k: float | None = None

    @property
    def cycles(self) -> np.ndarray:
        return np.arange(len(self.coherence))

    @property
    def n_cycles(self) -> int:
        return len(self.coherence) - 1

    @property
    def num_system_spins(self) -> int:
        return self.bloch.shape[1]


def coherence(u_plus: np.ndarray, u_minus: np.ndarray, s: np.ndarray) -> float:
    """Apparatus coherence ``|<s| U_+^dag U_- |s>|``."""
    s = np.asarray(s, dtype=complex)
    return float(abs(np.vdot(u_plus @ s, u_minus @ s)))


def _check_qnd(sys: SpinSystem, h_meas: np.ndarray) -> None:
    iz0 = spin_op(sys.num_spins, 0, "z")
    scale = max(1.0, float(np.max(np.abs(h_meas))))
    c = commutator_norm(h_meas, iz0)
    if c > 1e-10 * scale:
        raise ValidationError(
            f"[H_M, I_z^0] = {c:.3e}: the measurement Hamiltonian must commute with the apparatus I_z"
        )


def _check_drive(sys: SpinSystem, drive: RfDrive) -> None:
    j_max = sys.max_coupling()
    for j, p in enumerate(drive.amplitudes, start=1):
        if abs(p) < STRONG_DRIVE_RATIO * j_max:
            raise ValidationError(
                f"RF amplitude P_{j} = {p} Hz is not >> max|J| = {j_max} Hz "
                f"(need at least {STRONG_DRIVE_RATIO:g}x)"
            )


def cycle_propagator(
    sys: SpinSystem, h_meas: np.ndarray, drive: RfDrive, tau: float, tau_m: float
) -> np.ndarray:
    """One cycle ``M(tau_m) U(tau)`` on the full register."""
    return expm_unitary(h_meas, tau_m) @ expm_unitary(h_free(sys, drive), tau)


def total_propagator(
    sys: SpinSystem, h_meas: np.ndarray, drive: RfDrive, tau: float, tau_m: float, n_cycles: int
) -> np.ndarray:
    """Exact ``[M(tau_m) U(tau)]^N``."""
    return np.linalg.matrix_power(cycle_propagator(sys, h_meas, drive, tau, tau_m), n_cycles)


def run_protocol(
    sys: SpinSystem,
    h_meas: np.ndarray,
    proto: ZenoProtocol,
    *,
    enforce_strong_drive: bool = True,
) -> ZenoTrace:
    """Iterate ``U_tot <- M(tau_m) U(tau) U_tot`` exactly and record every cycle."""
    h_meas = np.asarray(h_meas, dtype=complex)
    if h_meas.shape != (sys.dim, sys.dim):
        raise ValidationError(f"h_meas has shape {h_meas.shape}, expected {(sys.dim, sys.dim)}")
    _check_qnd(sys, h_meas)
    if enforce_strong_drive:
        _check_drive(sys, proto.drive)
    s = proto.system_initial
    if s.shape != (2**sys.num_system_spins,):
        raise ValidationError("system_initial does not match the number of system spins")

    step = cycle_propagator(sys, h_meas, proto.drive, proto.tau, proto.tau_m)
    psi0 = np.kron(proto.apparatus_initial, s)
    n_sys = sys.num_system_spins
    n = proto.n_cycles

    d_vals = np.empty(n + 1)
    bloch = np.empty((n + 1, n_sys, 3))
    fid = np.empty(n + 1)
    rho_s = np.empty((n + 1, 2**n_sys, 2**n_sys), dtype=complex)

    u_tot = np.eye(sys.dim, dtype=complex)
    for k in range(n + 1):
        if k:
            u_tot = step @ u_tot
        d_vals[k] = coherence(apparatus_block(u_tot, 1), apparatus_block(u_tot, 0), s)
        psi = u_tot @ psi0
        rho = np.outer(psi, psi.conj())
        for j in range(n_sys):
            bloch[k, j] = bloch_vector(partial_trace(rho, [j + 1], sys.num_spins))
        rho_s[k] = partial_trace(rho, list(range(1, sys.num_spins)), sys.num_spins)
        fid[k] = np.real(np.vdot(s, rho_s[k] @ s))

    trace = ZenoTrace(proto.tau, proto.tau_m, d_vals, d_vals.copy(), bloch, fid, rho_s)
    if proto.decay_k is not None:
        trace = apply_decay(trace, proto.decay_k)
    return trace


def coherence_series(sys: SpinSystem, h_meas: np.ndarray, proto: ZenoProtocol) -> np.ndarray:
    """``D_k`` for ``k = 0..N`` without the Bloch and reduced-state bookkeeping."""
    _check_qnd(sys, h_meas)
    step = cycle_propagator(sys, h_meas, proto.drive, proto.tau, proto.tau_m)
    s = proto.system_initial
    u_plus, u_minus = apparatus_block(step, 1), apparatus_block(step, 0)
    a, b = s.copy(), s.copy()
    out = np.empty(proto.n_cycles + 1)
    out[0] = abs(np.vdot(a, b))
    for k in range(1, proto.n_cycles + 1):
        a, b = u_plus @ a, u_minus @ b
        out[k] = abs(np.vdot(a, b))
    return out


def apply_decay(trace: ZenoTrace, k: float) -> ZenoTrace:
    """Signal ``S_j = D_j exp(-k j tau_m)`` after ``j`` completed measurements."""
    if k < 0:
        raise ValidationError("decay constant must be non-negative")
    signal = trace.coherence * np.exp(-k * trace.cycles * trace.tau_m)
    return dataclasses.replace(trace, signal=signal, decay_k=float(k))


def _check_m0(m0: float) -> None:
    if m0 not in (0.5, -0.5):
        raise ValidationError(f"m0 must be +1/2 or -1/2, got {m0}")


def _critical(n: int, denom: float) -> float:
    if n < 0 or int(n) != n:
        raise ValidationError(f"n must be a non-negative integer, got {n}")
    if denom == 0:
        raise ValidationError("zero branch frequency: the measurement phase never winds, no critical time")
    t = n / denom
    if t < 0:
        raise ValidationError(f"negative critical time {t:.6g} s for this branch")
    return t


def critical_time_single(delta1: float, j01: float, m0: float, n: int) -> float:
    """``n / (delta1 + J01 m0)`` in seconds."""
    _check_m0(m0)
    return _critical(n, delta1 + j01 * m0)


def critical_time_pps(delta_j: float, j0j: float, m0: float, j12: float, n: int) -> float:
    """``n / (delta_j + J0j m0 + J12/2)`` in seconds (partner spin in ``|0>``)."""
    _check_m0(m0)
    return _critical(n, delta_j + j0j * m0 + 0.5 * j12)


def critical_time_xxx(delta_j: float, script_j0j: float, sign, n: int) -> float:
    """``n / (delta_j +- J0j/2)`` in seconds; ``sign`` is ``'+'``/``'-'`` or +-1."""
    s = {"+": 1, "-": -1, 1: 1, -1: -1}.get(sign)
    if s is None:
        raise ValidationError(f"sign must be '+' or '-', got {sign!r}")
    return _critical(n, delta_j + s * 0.5 * script_j0j)


def phase_shift(delta1: float, j01: float, m0: float, tau_m: float) -> float:
    """Relative phase ``2 pi (delta1 + J01 m0) tau_m`` imparted by one measurement (not wrapped)."""
    _check_m0(m0)
    return 2 * np.pi * (delta1 + j01 * m0) * tau_m


class Regime(str, enum.Enum):
    RESONANT = "resonant"
    BANG_BANG = "bang-bang"
    ZENO = "zeno"
    INTERMEDIATE = "intermediate"


@dataclass(frozen=True)
class RegimeThresholds:
    """Multiples of ``P1 tau`` separating the regimes."""

    c_lo: float = 0.25
    c_hi: float = 4.0


@dataclass(frozen=True)
class RegimeResult:
    regime: Regime
    xi: float
    detuning: float  # |(delta1 + J01 m0) xi|
    drive_scale: float  # P1 tau
    phase: float


def classify_regime(
    delta1: float,
    j01: float,
    m0: float,
    tau_m: float,
    p1: float,
    tau: float,
    thresholds: RegimeThresholds = RegimeThresholds(),
) -> RegimeResult:
    """Label the single-qubit dynamics for one apparatus branch.

    ``xi`` is the offset of ``tau_m`` from the nearest critical time of the
    branch. Checks run in order resonant, bang-bang, zeno, intermediate.
    """
    _check_m0(m0)
    scale = p1 * tau
    if not scale > 0:
        raise ValidationError("P1 * tau must be positive")
    omega = delta1 + j01 * m0
    phase = phase_shift(delta1, j01, m0, tau_m)
    if omega == 0:
        # no phase winding at all: every tau_m is effectively critical
        return RegimeResult(Regime.RESONANT, 0.0, 0.0, scale, phase)
    # a phase of 2 pi n is equally transparent for either sign of omega
    w = abs(omega)
    n = round(w * tau_m)
    xi = tau_m - n / w
    detuning = w * abs(xi)
    # distance of the phase from the nearest odd multiple of pi
    odd = abs((phase - np.pi) - 2 * np.pi * np.round((phase - np.pi) / (2 * np.pi)))
    if detuning <= thresholds.c_lo * scale:
        regime = Regime.RESONANT
    elif odd <= thresholds.c_lo * 2 * np.pi * scale:
        regime = Regime.BANG_BANG
    elif detuning >= thresholds.c_hi * scale:
        regime = Regime.ZENO
    else:
        regime = Regime.INTERMEDIATE
    return RegimeResult(regime, float(xi), float(detuning), float(scale), float(phase))


def find_extrema(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Indices of strict interior local minima and maxima."""
    v = np.asarray(values)
    if len(v) < 3:
        return np.array([], dtype=int), np.array([], dtype=int)
    mid = v[1:-1]
    minima = np.where((mid < v[:-2]) & (mid <= v[2:]))[0] + 1
    maxima = np.where((mid > v[:-2]) & (mid >= v[2:]))[0] + 1
    return minima, maxima
