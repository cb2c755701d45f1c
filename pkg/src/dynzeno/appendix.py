"""First-order (small ``tau``) closed forms for ``[M U]^N`` and their Dirichlet kernels.

Each apparatus branch ``m0 = +-1/2`` sees the system spin precess at a
branch frequency ``omega`` during a measurement. The ``N`` drive kicks then
add up through the Dirichlet kernel

    f(N, tau_m, omega) = exp(-i pi (N+1) tau_m omega) sin(pi N tau_m omega) / sin(pi tau_m omega)

which reaches ``|f| = N`` exactly when ``omega tau_m`` is an integer (the
critical measurement times) and stays O(1) elsewhere.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .engine import critical_time_pps, critical_time_single, total_propagator
from .hamiltonians import NATURAL_COUPLINGS, RfDrive, SpinSystem, h_meas_pps, h_meas_single
from .operators import ValidationError, expm_unitary, raising_op, spin_op

__all__ = [
    "DirichletFactor",
    "dirichlet_factor",
    "branch_frequency_single",
    "branch_frequency_pps",
    "approx_u_tot_single",
    "approx_u_tot_pps",
    "approx_error",
    "resonant_tau_m",
    "single_branch_criticals",
    "pps_branch_criticals",
    "SweepRow",
    "appendix_sweep",
]

# below this |sin(pi tau_m omega)| the kernel is evaluated through its limit
SINGULAR_TOL = 1e-9
APPARATUS_M0 = (0.5, -0.5)  # apparatus |0>, |1>


@dataclass(frozen=True)
class DirichletFactor:
    n_cycles: int
    tau_m: float
    omega: float
    value: complex

    @property
    def magnitude_over_n(self) -> float:
        return abs(self.value) / self.n_cycles


def dirichlet_factor(n_cycles: int, tau_m: float, omega: float) -> complex:
    """Complex kernel ``f`` for ``N`` kicks separated by branch phase ``2 pi omega tau_m``."""
    if n_cycles < 1:
        raise ValidationError("the Dirichlet factor needs at least one cycle")
    x = np.pi * tau_m * omega
    s = np.sin(x)
    if abs(s) < SINGULAR_TOL:
        # L'Hopital at x = m pi: sin(Nx)/sin(x) -> N cos(Nx)/cos(x)
        ratio = n_cycles * np.cos(n_cycles * x) / np.cos(x)
    else:
        ratio = np.sin(n_cycles * x) / s
    return complex(np.exp(-1j * (n_cycles + 1) * x) * ratio)


def branch_frequency_single(delta1: float, j01: float, m0: float) -> float:
    return delta1 + j01 * m0


def branch_frequency_pps(delta_j: float, j0j: float, m0: float, j12: float) -> float:
    """``eta_j + J12/2`` with ``eta_j = delta_j + J0j m0``."""
    return delta_j + j0j * m0 + 0.5 * j12


def _kicked_block(
    shifts: list[float],
    amplitudes: list[float],
    kernels: list[complex],
    tau: float,
    n_cycles: int,
) -> np.ndarray:
    """``exp(-i sum_j [2 pi delta_j I_z^j t + pi P_j tau (f_j I_+^j + h.c.)])`` on the system spins."""
    n = len(shifts)
    t = n_cycles * tau
    g = np.zeros((2**n, 2**n), dtype=complex)
    for j, (d, p, f) in enumerate(zip(shifts, amplitudes, kernels)):
        ip = raising_op(n, j)
        g += 2 * np.pi * d * t * spin_op(n, j, "z")
        g += np.pi * p * tau * (f * ip + np.conj(f) * ip.conj().T)
    return expm_unitary(g, 1.0)


def _block_diag(b0: np.ndarray, b1: np.ndarray) -> np.ndarray:
    d = b0.shape[0]
    out = np.zeros((2 * d, 2 * d), dtype=complex)
    out[:d, :d] = b0
    out[d:, d:] = b1
    return out


def approx_u_tot_single(
    delta1: float, j01: float, p1: float, tau: float, tau_m: float, n_cycles: int
) -> np.ndarray:
    """First-order propagator for the single-qubit protocol (4x4, apparatus first).

    The operator-valued ``I_z^0`` inside the kernel is resolved branch by
    branch, so the result is block diagonal in the apparatus basis before
    the trailing ``M(N tau_m)``.
    """
    blocks = []
    for m0 in APPARATUS_M0:
        f = dirichlet_factor(n_cycles, tau_m, branch_frequency_single(delta1, j01, m0))
        blocks.append(_kicked_block([delta1], [p1], [f], tau, n_cycles))
    m_total = expm_unitary(h_meas_single(delta1, j01), n_cycles * tau_m)
    return _block_diag(*blocks) @ m_total


def approx_u_tot_pps(
    deltas: tuple[float, float] = (400.0, 400.0),
    amplitudes: tuple[float, float] = (18000.0, 18000.0),
    tau: float = 1e-6,
    tau_m: float = 3.5e-3,
    n_cycles: int = 100,
    j01: float = NATURAL_COUPLINGS[(0, 1)],
    j02: float = NATURAL_COUPLINGS[(0, 2)],
    j12: float = NATURAL_COUPLINGS[(1, 2)],
) -> np.ndarray:
    """First-order propagator for the two-spin Ising protocol (8x8).

    Each kernel uses ``eta_j + J12/2``, i.e. the partner spin sits in
    ``|0>``; the form is therefore accurate on states reached from ``|00>``
    to first order in ``tau``.
    """
    blocks = []
    for m0 in APPARATUS_M0:
        fs = [
            dirichlet_factor(n_cycles, tau_m, branch_frequency_pps(d, j0, m0, j12))
            for d, j0 in zip(deltas, (j01, j02))
        ]
        blocks.append(_kicked_block(list(deltas), list(amplitudes), fs, tau, n_cycles))
    sys = SpinSystem(2, shifts=(0.0, *deltas), couplings={(0, 1): j01, (0, 2): j02, (1, 2): j12})
    m_total = expm_unitary(h_meas_pps(sys), n_cycles * tau_m)
    return _block_diag(*blocks) @ m_total


def approx_error(exact: np.ndarray, approx: np.ndarray) -> float:
    """``min_phi max_ij |exact - exp(i phi) approx|``, the global-phase-free distance."""
    a = np.asarray(exact, dtype=complex).ravel()
    b = np.asarray(approx, dtype=complex).ravel()
    if a.shape != b.shape:
        raise ValidationError("operators must have equal shapes")

    def cost(phi: float) -> float:
        return float(np.max(np.abs(a - np.exp(1j * phi) * b)))

    grid = np.linspace(0.0, 2 * np.pi, 721)
    vals = np.max(np.abs(a[None, :] - np.exp(1j * grid)[:, None] * b[None, :]), axis=1)
    i = int(np.argmin(vals))
    step = grid[1] - grid[0]
    res = minimize_scalar(cost, bounds=(grid[i] - step, grid[i] + step), method="bounded",
                          options={"xatol": 1e-12})
    return float(min(res.fun, vals[i]))


def single_branch_criticals(delta1: float, j01: float, t_lo: float, t_hi: float) -> list[tuple[float, float]]:
    """All ``(tau_m*, omega)`` pairs with ``t_lo <= tau_m* <= t_hi`` over both branches."""
    out = []
    for m0 in APPARATUS_M0:
        w = branch_frequency_single(delta1, j01, m0)
        if w <= 0:
            continue
        n = 1
        while (t := critical_time_single(delta1, j01, m0, n)) <= t_hi:
            if t >= t_lo:
                out.append((t, w))
            n += 1
    return sorted(out)


def pps_branch_criticals(
    delta_j: float, j0j: float, j12: float, t_lo: float, t_hi: float
) -> list[tuple[float, float]]:
    out = []
    for m0 in APPARATUS_M0:
        w = branch_frequency_pps(delta_j, j0j, m0, j12)
        if w <= 0:
            continue
        n = 1
        while (t := critical_time_pps(delta_j, j0j, m0, j12, n)) <= t_hi:
            if t >= t_lo:
                out.append((t, w))
            n += 1
    return sorted(out)


def resonant_tau_m(
    tau_m_grid: np.ndarray, omegas: list[float], n_cycles: int, threshold: float = 0.9
) -> np.ndarray:
    """Grid points where any branch kernel satisfies ``|f|/N >= threshold``."""
    tau_m_grid = np.asarray(tau_m_grid, dtype=float)
    hit = np.zeros(len(tau_m_grid), dtype=bool)
    for w in omegas:
        mags = np.array([abs(dirichlet_factor(n_cycles, t, w)) for t in tau_m_grid]) / n_cycles
        hit |= mags >= threshold
    return tau_m_grid[hit]


@dataclass(frozen=True)
class SweepRow:
    tau_m: float
    omega_branch: float
    dirichlet_mag_over_n: float
    approx_error: float


def appendix_sweep(
    tau_m_grid,
    delta1: float = 300.0,
    j01: float = NATURAL_COUPLINGS[(0, 1)],
    p1: float = 18000.0,
    tau: float = 1e-6,
    n_cycles: int = 60,
) -> list[SweepRow]:
    """Kernel magnitude per branch and first-order error at each ``tau_m`` (single qubit)."""
    sys = SpinSystem(1, couplings={(0, 1): j01})
    drive = RfDrive((p1,), (delta1,))
    h_m = h_meas_single(delta1, j01)
    rows = []
    for tm in tau_m_grid:
        err = approx_error(
            total_propagator(sys, h_m, drive, tau, tm, n_cycles),
            approx_u_tot_single(delta1, j01, p1, tau, tm, n_cycles),
        )
        for m0 in APPARATUS_M0:
            w = branch_frequency_single(delta1, j01, m0)
            mag = abs(dirichlet_factor(n_cycles, tm, w)) / n_cycles
            rows.append(SweepRow(float(tm), w, mag, err))
    return rows
