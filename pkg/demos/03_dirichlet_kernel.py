"""Where the first-order picture says the Zeno effect breaks down.

To first order in tau, the N drive kicks seen by one apparatus branch add
up through a Dirichlet kernel f. |f|/N is 1 on the critical times and
small everywhere else. The script scans tau_m, lists the resonances and
compares the first-order propagator with the exact product.

    python demos/03_dirichlet_kernel.py
"""

import numpy as np

from dynzeno import appendix, engine
from dynzeno.scenarios import single_qubit

grid = 2e-3 + 1e-6 * np.arange(3001)
crit = appendix.single_branch_criticals(300, -194.4, grid[0], grid[-1])
for t, w in crit:
    print(f"critical time {t * 1e3:.4f} ms on the {w:.1f} Hz branch")

hits = appendix.resonant_tau_m(grid, sorted({w for _, w in crit}), 60)
print(f"{len(hits)} grid points with |f|/N >= 0.9, spanning", end=" ")
print(", ".join(f"{h * 1e3:.3f}" for h in hits[[0, -1]]), "ms")

# Shrinking tau at fixed total drive time t = N tau halves the error each time.
sc = single_qubit()
for tau in (4e-6, 2e-6, 1e-6, 0.5e-6):
    n = int(round(120e-6 / tau))
    exact = engine.total_propagator(sc.system, sc.h_meas, sc.drive, tau, 3.5e-3, n)
    approx = appendix.approx_u_tot_single(300, -194.4, 18000, tau, 3.5e-3, n)
    print(f"tau={tau * 1e6:.1f} us  N={n:3d}  phase-free distance {appendix.approx_error(exact, approx):.4f}")

for n in (1, 10, 60, 100):
    f = appendix.dirichlet_factor(n, engine.critical_time_single(300, -194.4, -0.5, 1), 397.2)
    print(f"N={n:3d}: |f| at the 397.2 Hz critical = {abs(f):.3f}")
