"""
Channel access as a two-dimensional Markov chain
================================================

A cell has C channels. Each one drops in and out of availability (rates
alpha and beta) and carries at most one call. The state (m, n) counts busy
calls m and available channels n.
"""

import numpy as np

from pvtcell.markov import (
    ChainParams,
    blocking_probability,
    build_generator,
    mean_sojourn_time,
    solve_generator,
    state_space,
    stationary_distribution,
)
from pvtcell.numerics import erlang_b

# A small chain: 4 channels, load 2 Erlang, channels available 80% of the time.
chain = ChainParams(C=4, lam=2.0, eta=1.0, alpha=4.0, beta=1.0)
dist = stationary_distribution(chain)
for (m, n), p in zip(state_space(chain.C), dist.probs):
    print(f"pi({m},{n}) = {p:.5f}")

# The closed form agrees with a brute-force solve of the generator.
dense = solve_generator(build_generator(chain))
print("max gap to generator solve:", np.max(np.abs(dense.probs - dist.probs)))

# A call is blocked when every available channel is busy (m = n).
print("blocking:", blocking_probability(dist))
print("mean sojourn (min):", mean_sojourn_time(dist, chain.lam))

# Channels that never fail turn the chain into a plain loss system.
always_up = ChainParams(C=4, lam=2.0, eta=1.0, alpha=1e6, beta=1.0)
print("near-Erlang blocking:", blocking_probability(stationary_distribution(always_up)),
      "Erlang B:", erlang_b(4, 2.0))

# Blocking climbs as availability falls.
for ratio in (0.5, 1, 2, 4, 16, 64):
    d = stationary_distribution(ChainParams(4, 2.0, 1.0, ratio, 1.0))
    print(f"alpha/beta = {ratio:>4}: blocking {blocking_probability(d):.4f}")
