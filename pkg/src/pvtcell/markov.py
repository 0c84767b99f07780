"""Two-dimensional channel-access chain of a typical cell.

A state ``(m, n)`` holds the number of occupied channels ``m`` and the number
of currently available channels ``n`` with ``0 <= m <= n <= C``. Calls arrive
at rate ``lam`` and are admitted while ``m < n``; each call leaves at rate
``eta``; each unavailable channel recovers at rate ``alpha``; while idle
capacity exists (``m < n``) each available channel fails at rate ``beta``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

__all__ = [
    "ChainParams",
    "StateDistribution",
    "state_space",
    "stationary_distribution",
    "build_generator",
    "solve_generator",
    "blocking_probability",
    "busy_probability",
    "mean_occupancy",
    "mean_sojourn_time",
]


@dataclass(frozen=True)
class ChainParams:
    C: int
    lam: float
    eta: float
    alpha: float
    beta: float

    def __post_init__(self):
        if int(self.C) != self.C or self.C < 1:
            raise ValueError("C must be a positive integer")
        for name in ("lam", "eta", "alpha", "beta"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @property
    def load(self) -> float:
        return self.lam / self.eta

    @property
    def availability_ratio(self) -> float:
        return self.alpha / self.beta


def state_space(C: int) -> list[tuple[int, int]]:
    """Triangular state list ordered by ``n`` then ``m``."""
    return [(m, n) for n in range(C + 1) for m in range(n + 1)]


def _state_arrays(C):
    n = np.repeat(np.arange(C + 1), np.arange(1, C + 2))
    m = np.concatenate([np.arange(k + 1) for k in range(C + 1)])
    return m, n


@dataclass(frozen=True)
class StateDistribution:
    """Probabilities over the triangular state space.

    ``probs[i]`` belongs to ``state_space(C)[i]``.
    """

    C: int
    probs: np.ndarray

    def __post_init__(self):
        expected = (self.C + 1) * (self.C + 2) // 2
        if self.probs.shape != (expected,):
            raise ValueError("probability vector does not match the state space")

    @property
    def m(self) -> np.ndarray:
        return _state_arrays(self.C)[0]

    @property
    def n(self) -> np.ndarray:
        return _state_arrays(self.C)[1]

    def __getitem__(self, state):
        m, n = state
        if not 0 <= m <= n <= self.C:
            raise KeyError(state)
        return float(self.probs[n * (n + 1) // 2 + m])

    def as_dict(self) -> dict[tuple[int, int], float]:
        return {s: float(p) for s, p in zip(state_space(self.C), self.probs)}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["m", "n", "probability"])
        for (m, n), p in zip(state_space(self.C), self.probs):
            w.writerow([m, n, repr(float(p))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "StateDistribution":
        rows = list(csv.reader(io.StringIO(text)))[1:]
        C = max(int(r[1]) for r in rows)
        probs = np.zeros((C + 1) * (C + 2) // 2)
        for m, n, p in rows:
            m, n = int(m), int(n)
            probs[n * (n + 1) // 2 + m] = float(p)
        return cls(C, probs)


def stationary_distribution(params: ChainParams) -> StateDistribution:
    """Product-form stationary law.

    ``pi(m, n) ~ (lam/eta)**m / m! * binom(C, n) * (alpha/beta)**n``, built
    in log space and normalised after a max shift so that ``C`` in the
    hundreds and extreme rate ratios do not overflow.
    """
    C = int(params.C)
    m, n = _state_arrays(C)
    log_binom = gammaln(C + 1) - gammaln(n + 1) - gammaln(C - n + 1)
    logw = m * math.log(params.load) - gammaln(m + 1) + log_binom + n * math.log(
        params.availability_ratio
    )
    if not np.all(np.isfinite(logw)):
        raise OverflowError("log-weights are not finite")
    w = np.exp(logw - logw.max())
    return StateDistribution(C, w / w.sum())


def build_generator(params: ChainParams) -> np.ndarray:
    """Dense transition-rate matrix over ``state_space(C)``.

    Channel loss is only possible from states with idle capacity; on the
    diagonal ``m == n`` the occupied channels are held. This matches the
    balance equations of the diagonal states, where no loss outflow
    appears.
    """
    C = int(params.C)
    states = state_space(C)
    idx = {s: i for i, s in enumerate(states)}
    Q = np.zeros((len(states), len(states)))
    for (m, n), i in idx.items():
        if m < n:
            Q[i, idx[(m + 1, n)]] += params.lam
            Q[i, idx[(m, n - 1)]] += n * params.beta
        if m > 0:
            Q[i, idx[(m - 1, n)]] += m * params.eta
        if n < C:
            Q[i, idx[(m, n + 1)]] += (C - n) * params.alpha
    np.fill_diagonal(Q, -Q.sum(axis=1))
    return Q


def solve_generator(gen: np.ndarray) -> StateDistribution:
    """Stationary vector of a conservative generator by a dense solve.

    The last balance equation is replaced by the normalisation row.
    """
    gen = np.asarray(gen, float)
    size = gen.shape[0]
    C = int(round((math.sqrt(8 * size + 1) - 3) / 2))
    if (C + 1) * (C + 2) // 2 != size:
        raise ValueError("generator size is not triangular")
    A = gen.T.copy()
    A[-1, :] = 1.0
    rhs = np.zeros(size)
    rhs[-1] = 1.0
    try:
        v = np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError("generator is reducible") from exc
    return StateDistribution(C, v)


def blocking_probability(dist: StateDistribution) -> float:
    """Mass of the states where every available channel is occupied."""
    return float(dist.probs[dist.m == dist.n].sum())


def mean_occupancy(dist: StateDistribution) -> float:
    return float(np.dot(dist.m, dist.probs))


def busy_probability(dist: StateDistribution) -> float:
    """Expected fraction of the ``C`` channels that carry a call."""
    return mean_occupancy(dist) / dist.C


def mean_sojourn_time(dist: StateDistribution, lam: float) -> float:
    """Little's law: mean number of calls in service over the arrival rate."""
    if not lam > 0:
        raise ValueError("arrival rate must be positive")
    return mean_occupancy(dist) / lam
