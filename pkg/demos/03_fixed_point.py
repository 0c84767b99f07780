"""
Coupling the chain to the radio layer
=====================================

Channel availability depends on outage, outage depends on how many
neighbouring channels are busy, and that depends on the chain. A damped
fixed-point iteration on the busy probability p closes the loop.
"""

from pvtcell.coupling import OutageCache, SolverConfig, solve_fixed_point
from pvtcell.markov import blocking_probability, mean_sojourn_time
from pvtcell.oracles import bisection_fixed_point
from pvtcell.params import DEFAULTS, db_to_linear

link = DEFAULTS.link()
chain = (DEFAULTS.C, DEFAULTS.lam, DEFAULTS.eta)
cache = OutageCache(link)

sol = solve_fixed_point(chain, link, cache=cache)
print(f"p = {sol.p_busy:.8f}, epsilon = {sol.epsilon:.6f}, "
      f"alpha/beta = {sol.alpha_beta_ratio:.3f}, {sol.iterations} iterations")
print(sol.trace_csv().splitlines()[:4])

# Bisection on the same map lands on the same root.
print("bisection:", bisection_fixed_point(chain, cache))

# The answer does not depend on the damping factor.
for d in (0.3, 0.5, 1.0):
    s = solve_fixed_point(chain, link, cache=cache, cfg=SolverConfig(damping=d))
    print(f"damping {d}: p = {s.p_busy:.12f} after {s.iterations} iterations")

# Stricter thresholds mean more outage, fewer available channels, more blocking.
for g_db in (0, 5, 10, 15, 20):
    p = DEFAULTS.replace(gamma0=db_to_linear(g_db))
    s = solve_fixed_point(chain, p.link(), cache=OutageCache(p.link()))
    print(f"{g_db:>2} dB: blocking {blocking_probability(s.dist):.4f}, "
          f"sojourn {mean_sojourn_time(s.dist, p.lam):.2f} min")
