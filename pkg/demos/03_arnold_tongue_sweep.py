"""A coarse Arnold tongue of the nonclassical area in the deep-quantum regime.

Run: python3 demos/03_arnold_tongue_sweep.py
"""

import numpy as np

from qvdp import SweepConfig, arnold_map, plan, run
from qvdp.sweep import default_parallelism

config = SweepConfig(drive_values=np.linspace(0, 10, 11), detuning_values=np.linspace(-5, 5, 11),
                     kappa2_values=(1e3,), dim=12, metrics=("delta", "g2"))
records = run(plan(config), config, parallelism=default_parallelism())
amap = arnold_map(records, "delta")

np.set_printoptions(precision=2, suppress=True, linewidth=120)
print("rows: detuning", amap.detuning)
print("cols: drive   ", amap.drive)
print(amap.values)
print("even in detuning:", np.allclose(amap.values, amap.values[::-1], atol=1e-8))
print("max g2:", max(r.value("g2") for r in records if np.isfinite(r.value("g2"))))
