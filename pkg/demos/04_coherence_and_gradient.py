"""Where coherence peaks: the critical drive and the sign change of dS/dF.

Run: python3 demos/04_coherence_and_gradient.py
"""

import math

from qvdp import SystemParams, coherence, coherence_gradient, critical_drive, solve

for D in (0.0, 2.0, 5.0):
    Fc = critical_drive(D)
    print(f"Delta={D}: F_c={Fc:.5f}  S(F_c)={coherence(SystemParams(D, Fc, math.inf)):.5f}"
          f"  (1/(6 sqrt 2) = {1 / (6 * math.sqrt(2)):.5f})")
    for F in (0.5 * Fc, Fc, 2 * Fc):
        p = SystemParams(D, F, 1e4)
        rho, _ = solve(p)
        print(f"   F={F:6.3f}  dS/dF={coherence_gradient(p):+.4f}  numeric |rho01|={abs(rho[0, 1]):.5f}")
