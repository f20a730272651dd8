"""Undriven limit cycle, then a weak drive, numeric against closed form.

Run: python3 demos/01_limit_cycle_and_analytic.py
"""

import numpy as np

from qvdp import SystemParams, analytic_steady_state, solve

# Without drive and with strong two-photon loss the oscillator settles into
# a mixture of |0> and |1> with no phase preference.
rho, res = solve(SystemParams(detuning=0.0, drive=0.0, kappa2=1e3, dim=8))
print("undriven populations:", np.round(np.real(np.diag(rho))[:3], 5), f"(residual {res:.1e})")

# A weak drive builds up the vacuum/one-quantum coherence rho_01.
for k2 in (1e2, 1e3, 1e4):
    p = SystemParams(detuning=2.0, drive=1.0, kappa2=k2)
    rho, _ = solve(p)
    exact = analytic_steady_state(p).density_matrix(p.fock_dim)
    print(f"kappa2={k2:8.0f}  rho01={rho[0, 1]:.5f}  three-level ansatz={exact[0, 1]:.5f}"
          f"  max|diff|={np.max(np.abs(rho - exact)):.2e}")
# the gap shrinks like 1/kappa2: the ansatz is the kappa2 -> infinity solution
