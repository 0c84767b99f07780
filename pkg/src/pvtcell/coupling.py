"""Mutual fixed point between channel availability and channel occupancy.

One sweep of the scalar map ``p -> p_new`` reads:

1. ``epsilon = sum_{delta>=1} p_out(gamma0, delta) * Binom(pool, p)(delta)``
2. ``alpha/beta = (1 - epsilon) / epsilon``
3. stationary law of the channel-access chain at that ratio
4. ``p_new`` = expected fraction of busy channels.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.stats import binom

from .interference import RAYLEIGH, FadingModel, LinkParams, outage_probabilities
from .markov import ChainParams, StateDistribution, busy_probability, stationary_distribution
from .numerics import DEFAULT_QUADRATURE, QuadratureSpec

__all__ = [
    "SolverConfig",
    "FixedPointSolution",
    "OutageCache",
    "OutageTable",
    "outage_table",
    "sweep_map",
    "solve_fixed_point",
    "busy_probability_bracket",
]

EPS_FLOOR = 1e-12


@dataclass(frozen=True)
class SolverConfig:
    """Fixed-point solver settings.

    Attributes:
        tol: Convergence threshold on ``|p_new - p|``.
        max_iters: Iteration budget.
        damping: Relaxation weight ``d`` in ``p <- (1-d) p + d p_new``.
        n_max: Initial truncation of the interferer count ``N_I``; extended
            while the binomial tail beyond it exceeds ``tol/10``.
        interferer_pool: Number of potential co-channel interferers, i.e. the
            number of binomial trials.
        outage_cache_resolution: Outage-table grid points per 10 dB.
    """

    tol: float = 1e-10
    max_iters: int = 500
    damping: float = 0.5
    n_max: int = 24
    interferer_pool: int = 24
    outage_cache_resolution: int = 5

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not 0 < self.damping <= 1:
            raise ValueError("damping must lie in (0, 1]")
        if self.n_max < 1 or self.interferer_pool < 1:
            raise ValueError("n_max and interferer_pool must be positive")
        if self.outage_cache_resolution < 1:
            raise ValueError("outage_cache_resolution must be positive")


@dataclass
class FixedPointSolution:
    epsilon: float
    p_busy: float
    alpha_beta_ratio: float
    dist: StateDistribution
    iterations: int
    residual: float
    converged: bool = True
    epsilon_clamped: bool = False
    n_max: int = 0
    trace: list = field(default_factory=list)

    def trace_csv(self) -> str:
        """Iteration trace as CSV (iteration, p, epsilon, residual)."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["iteration", "p", "epsilon", "residual"])
        for row in self.trace:
            w.writerow([row[0]] + [repr(float(v)) for v in row[1:]])
        return buf.getvalue()


class OutageCache:
    """Memoised ``p_out(gamma0, delta)`` for one threshold, grown on demand."""

    def __init__(self, link: LinkParams, model: FadingModel = RAYLEIGH,
                 spec: QuadratureSpec = DEFAULT_QUADRATURE, values=None):
        self.link, self.model, self.spec = link, model, spec
        self._values = None if values is None else np.asarray(values, float)

    def upto(self, n: int) -> np.ndarray:
        """Outage values for ``delta = 0..n``."""
        have = -1 if self._values is None else len(self._values) - 1
        if n > have:
            # Grow geometrically so repeated extensions stay cheap.
            target = max(n, 2 * have + 1)
            self._values = outage_probabilities(
                self.link.gamma0, np.arange(target + 1), self.link, self.model, self.spec
            )
        return self._values[: n + 1]

    @classmethod
    def constant(cls, link: LinkParams, value: float):
        """Cache returning ``value`` for every ``delta >= 1`` (0 at ``delta=0``)."""
        cache = cls(link)
        cache.upto = lambda n: np.r_[0.0, np.full(n, float(value))]
        return cache


def _truncation(p: float, cfg: SolverConfig) -> int:
    """Smallest ``n >= cfg.n_max`` whose binomial tail is below ``tol/10``."""
    n = min(cfg.n_max, cfg.interferer_pool)
    while n < cfg.interferer_pool and binom.sf(n, cfg.interferer_pool, p) >= cfg.tol / 10:
        n = min(2 * n, cfg.interferer_pool)
    return n


def sweep_map(p: float, chain: ChainParams | tuple, cache: OutageCache, cfg: SolverConfig):
    """One sweep of the coupled equations.

    Args:
        p: Current busy probability.
        chain: ``ChainParams`` (only ``C``, ``lam`` and ``eta`` are read) or
            a ``(C, lam, eta)`` tuple.
        cache: Outage values at the operating threshold.
        cfg: Solver settings.

    Returns:
        ``(p_new, epsilon, ratio, dist, clamped, n)``.
    """
    C, lam, eta = _chain_triple(chain)
    n = _truncation(p, cfg)
    deltas = np.arange(1, n + 1)
    p_out = cache.upto(n)[1:]
    eps = float(np.dot(p_out, binom.pmf(deltas, cfg.interferer_pool, p)))
    clamped = not EPS_FLOOR <= eps <= 1 - EPS_FLOOR
    eps = min(max(eps, EPS_FLOOR), 1 - EPS_FLOOR)
    ratio = (1 - eps) / eps
    dist = stationary_distribution(ChainParams(C, lam, eta, ratio, 1.0))
    return busy_probability(dist), eps, ratio, dist, clamped, n


def _chain_triple(chain):
    if isinstance(chain, ChainParams):
        return chain.C, chain.lam, chain.eta
    C, lam, eta = chain
    return int(C), float(lam), float(eta)


def solve_fixed_point(
    chain,
    link: LinkParams,
    model: FadingModel = RAYLEIGH,
    cfg: SolverConfig = SolverConfig(),
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
    cache: OutageCache | None = None,
    p0: float | None = None,
) -> FixedPointSolution:
    """Damped Picard iteration on the busy probability.

    The seed is the offered load per channel clamped to ``[0.01, 0.99]``.
    When the budget runs out the last iterate is returned with
    ``converged=False``.
    """
    C, lam, eta = _chain_triple(chain)
    cache = cache or OutageCache(link, model, spec)
    p = p0 if p0 is not None else min(max(lam / eta / C, 0.01), 0.99)
    trace = []
    d = cfg.damping
    for it in range(1, cfg.max_iters + 1):
        p_new, eps, ratio, dist, clamped, n = sweep_map(p, (C, lam, eta), cache, cfg)
        resid = abs(p_new - p)
        trace.append((it, p, eps, resid))
        if resid < cfg.tol:
            return FixedPointSolution(eps, p_new, ratio, dist, it, resid, True, clamped, n, trace)
        p = (1 - d) * p + d * p_new
    return FixedPointSolution(eps, p_new, ratio, dist, cfg.max_iters, resid, False, clamped, n, trace)


@dataclass
class OutageTable:
    """Outage values on a grid of thresholds (dB) for a range of ``delta``.

    Off-grid lookups use monotone piecewise-cubic interpolation in dB.
    Below the grid the small-threshold power law ``gamma ** (2/b)`` is
    used; above it, the last value is held.
    """

    gamma_db: np.ndarray
    deltas: np.ndarray
    values: np.ndarray
    b: float

    def __post_init__(self):
        self.gamma_db = np.asarray(self.gamma_db, float)
        self.deltas = np.asarray(self.deltas, int)
        self.values = np.asarray(self.values, float)
        self._interp = {
            int(dl): PchipInterpolator(self.gamma_db, self.values[:, j], extrapolate=False)
            for j, dl in enumerate(self.deltas)
        }

    def column(self, delta: int) -> np.ndarray:
        return self.values[:, int(np.flatnonzero(self.deltas == delta)[0])]

    def __call__(self, gamma, delta: int):
        """Outage at linear threshold(s) ``gamma``."""
        gamma = np.asarray(gamma, float)
        col = self.column(delta)
        with np.errstate(divide="ignore"):
            gdb = 10 * np.log10(gamma)
        out = np.empty_like(gdb)
        lo, hi = self.gamma_db[0], self.gamma_db[-1]
        inside = (gdb >= lo) & (gdb <= hi)
        out[inside] = self._interp[int(delta)](gdb[inside])
        below = gdb < lo
        out[below] = col[0] * 10 ** ((gdb[below] - lo) / 10 * (2 / self.b))
        out[gdb > hi] = col[-1]
        out = np.clip(out, 0.0, 1.0)
        return out[()] if out.ndim == 0 else out


def outage_table(
    link: LinkParams,
    model: FadingModel = RAYLEIGH,
    deltas=range(0, 25),
    gamma_grid_db=None,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
    resolution: int = 5,
) -> OutageTable:
    """Fill an :class:`OutageTable`.

    The default grid spans -30 dB to 160 dB with ``resolution`` points per
    10 dB, wide enough for the success probability to fall below 1e-6 at
    the default parameters.
    """
    if gamma_grid_db is None:
        gamma_grid_db = np.linspace(-30.0, 160.0, 19 * resolution + 1)
    grid = np.asarray(gamma_grid_db, float)
    if grid.size == 0 or np.any(np.diff(grid) <= 0):
        raise ValueError("threshold grid must be non-empty and increasing")
    deltas = np.asarray(list(deltas), int)
    rows = [
        outage_probabilities(10 ** (g / 10), deltas, link, model, spec) for g in grid
    ]
    return OutageTable(grid, deltas, np.array(rows), link.b)


def busy_probability_bracket(chain, cache: OutageCache, cfg: SolverConfig):
    """``(p_new(0), p_new(1))``; a solution lies in between by continuity."""
    return sweep_map(0.0, chain, cache, cfg)[0], sweep_map(1.0, chain, cache, cfg)[0]

