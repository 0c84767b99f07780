"""
Spatial spectrum efficiency and energy efficiency
=================================================

Throughput per cell is (1 - p_b) * bandwidth * capacity * E[m]. Scaling by
BS density gives bit/s/km^2; dividing the lifetime bits by embodied plus
operating energy gives bit/J. Both peak at a moderate traffic load.
"""

import numpy as np

from pvtcell.experiments import LAMBDA_GRID, Evaluator, efficiency_rows
from pvtcell.params import DEFAULTS

ev = Evaluator()

# Sweep the arrival rate at the default 10 dB threshold.
res = efficiency_rows([DEFAULTS.replace(lam=lam) for lam in LAMBDA_GRID], ev)
sse, ee = res.column("sse"), res.column("ee")
for lam, s, e in zip(LAMBDA_GRID[::3], sse[::3], ee[::3]):
    print(f"lambda = {lam:>4}: SSE {s:10.4g} bit/s/km^2   EE {e:8.4g} bit/J")
k = int(np.argmax(sse))
print(f"SSE peaks at lambda = {LAMBDA_GRID[k]} calls/min")

# Steeper path loss isolates cells from each other.
for b in (3.0, 3.5, 4.0, 5.0, 6.0):
    row = efficiency_rows([DEFAULTS.replace(b=b)], ev).rows[0]
    print(f"b = {b}: capacity {row['link_capacity']:.3f} bit/s/Hz, SSE {row['sse']:.4g}")

# Denser deployments raise SSE, and in this model EE as well: shorter
# serving links lift the SNR while per-BS energy stays the same.
for lb in (0.2, 0.5, 1.0):
    row = efficiency_rows([DEFAULTS.replace(lambda_B=lb)], ev).rows[0]
    print(f"lambda_B = {lb}: SSE {row['sse']:.4g}, EE {row['ee']:.4g}")
