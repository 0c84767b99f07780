"""
Outage with a known number of interferers
=========================================

The user is served by its nearest base station; Delta interferers sit
uniformly on a disk around it. The analytic outage comes from a Parseval
inversion of the interference transform and is checked here against a
direct simulation of the same disk model.
"""

import numpy as np

from pvtcell.interference import outage_probabilities
from pvtcell.montecarlo import MCConfig, mc_outage_disk, mc_outage_pvt
from pvtcell.oracles import disk_success, noise_only_success
from pvtcell.params import DEFAULTS, db_to_linear

link = DEFAULTS.link()
print(f"density {link.lambda_B} /km^2, b = {link.b}, disk radius {link.radius:.1f} km")

# Outage at a 10 dB threshold as interferers are added.
g = db_to_linear(10.0)
deltas = [0, 1, 2, 5, 10, 20]
p_out = outage_probabilities(g, deltas, link)
for d, p in zip(deltas, p_out):
    print(f"Delta = {d:>2}: p_out = {p:.5f}   (1-D oracle {1 - disk_success(g, d, link):.5f})")

# With no interferers, only thermal noise matters.
print("noise only:", 1 - p_out[0], "vs", noise_only_success(g, link))

# The same numbers from simulation (200k trials each).
cfg = MCConfig(trials=200_000, seed=1)
for d in (1, 2, 5):
    est = mc_outage_disk(g, d, link, cfg=cfg)
    z = (est.mean - outage_probabilities(g, [d], link)[0]) / est.std_error
    print(f"Delta = {d}: MC {est.mean:.5f} +- {est.std_error:.5f} ({z:+.2f} SE)")

# A full Poisson network, where every other BS interferes, is much harsher.
pvt = mc_outage_pvt(np.array([1.0, g]), link, cfg=MCConfig(trials=20_000, seed=2))
print("PPP network outage at 0 / 10 dB:", [round(e.mean, 4) for e in pvt])
