"""Throughput, ergodic capacity, spatial spectrum efficiency and energy
efficiency of a typical cell."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np
from scipy.stats import binom

from .coupling import FixedPointSolution
from .markov import blocking_probability, mean_occupancy
from .numerics import QuadratureSpec, integrate_adaptive

__all__ = [
    "RadioEconomics",
    "EfficiencyReport",
    "CapacityResult",
    "link_capacity",
    "link_capacity_detail",
    "weighted_link_capacity",
    "cell_throughput",
    "spatial_spectrum_efficiency",
    "operation_energy",
    "energy_efficiency",
    "efficiency_report",
]

SECONDS_PER_YEAR = 365 * 24 * 3600.0

# Capacity integrand cut-off and the largest rate (bit/s/Hz) ever scanned.
SUCCESS_FLOOR = 1e-6
MAX_RATE = 256.0

_CAPACITY_SPEC = QuadratureSpec(abs_tol=1e-7, rel_tol=1e-7, max_subdivisions=4000)


@dataclass(frozen=True)
class RadioEconomics:
    """Bandwidth and energy model of one base station.

    Attributes:
        bandwidth: Channel bandwidth (Hz).
        E_embodied: Initial plus maintenance embodied energy (J).
        P_chl: Transmit power per occupied channel (W).
        h: Slope of the load-dependent power draw.
        k: Load-independent power draw (W).
        t_lifetime: Operating lifetime (s).
    """

    bandwidth: float = 1e5
    E_embodied: float = 85e9
    P_chl: float = 1.0
    h: float = 7.84
    k: float = 71.5
    t_lifetime: float = SECONDS_PER_YEAR

    def __post_init__(self):
        for name, value in asdict(self).items():
            if value < 0:
                raise ValueError(f"{name} must be non-negative")


@dataclass
class EfficiencyReport:
    throughput: float
    link_capacity: float
    sse: float
    ee: float
    mean_occupancy: float
    blocking: float = float("nan")
    p_busy: float = float("nan")
    epsilon: float = float("nan")


@dataclass
class CapacityResult:
    value: float
    truncation: float
    error: float


OutageFn = Callable[[np.ndarray, int], np.ndarray]


def _success(outage: OutageFn, t, delta):
    gamma = np.expm1(np.asarray(t, float) * math.log(2.0))
    return 1.0 - np.asarray(outage(gamma, delta), float)


def link_capacity_detail(delta: int, outage: OutageFn) -> CapacityResult:
    """Ergodic capacity ``int_0^inf [1 - p_out(2**t - 1, delta)] dt``.

    Args:
        delta: Interferer count.
        outage: Callable ``(gamma_linear_array, delta) -> p_out``, typically
            an :class:`~pvtcell.coupling.OutageTable`.

    The upper limit ``T*`` is the first point of a doubling scan at which
    the success probability is below 1e-6.
    """
    t_star = 0.5
    while t_star < MAX_RATE and float(_success(outage, [t_star], delta)[0]) >= SUCCESS_FLOOR:
        t_star *= 2
    res = integrate_adaptive(
        lambda t: _success(outage, t, delta), 0.0, t_star, _CAPACITY_SPEC, initial=16
    )
    return CapacityResult(float(res.value), t_star, res.error)


def link_capacity(delta: int, outage: OutageFn) -> float:
    """Ergodic link capacity (bit/s/Hz) with exactly ``delta`` interferers."""
    return link_capacity_detail(delta, outage).value


def weighted_link_capacity(p_busy: float, outage: OutageFn, pool: int = 24,
                           n_max: int | None = None) -> float:
    """Capacity averaged over a ``Binom(pool, p_busy)`` interferer count."""
    n_max = pool if n_max is None else n_max
    deltas = np.arange(n_max + 1)
    w = binom.pmf(deltas, pool, p_busy)
    caps = np.array([link_capacity(int(d), outage) if wi > 0 else 0.0 for d, wi in zip(deltas, w)])
    return float(np.dot(w, caps))


def cell_throughput(fp: FixedPointSolution, cap: float, econ: RadioEconomics) -> float:
    """``(1 - p_b) * B * cap * E[m]`` in bit/s."""
    return (1 - blocking_probability(fp.dist)) * econ.bandwidth * cap * mean_occupancy(fp.dist)


def spatial_spectrum_efficiency(throughput: float, lambda_B: float) -> float:
    """Throughput per unit area (bit/s/km^2)."""
    return lambda_B * throughput


def operation_energy(mean_occupancy: float, econ: RadioEconomics) -> float:
    """Lifetime operating energy (J) of the load-dependent power model."""
    return (econ.h * econ.P_chl * mean_occupancy + econ.k) * econ.t_lifetime


def energy_efficiency(throughput: float, econ: RadioEconomics, mean_occupancy: float) -> float:
    """Bits delivered over the lifetime per joule of embodied plus operating energy."""
    energy = econ.E_embodied + operation_energy(mean_occupancy, econ)
    if energy <= 0:
        raise ZeroDivisionError("total energy is zero")
    return econ.t_lifetime * throughput / energy


def efficiency_report(
    fp: FixedPointSolution,
    outage: OutageFn,
    lambda_B: float,
    econ: RadioEconomics = RadioEconomics(),
    delta: int | None = None,
    pool: int = 24,
) -> EfficiencyReport:
    """Assemble every efficiency figure for one operating point.

    ``delta=None`` uses the binomially weighted capacity at the solved busy
    probability; an integer fixes the interferer count.
    """
    if delta is None:
        cap = weighted_link_capacity(fp.p_busy, outage, pool)
    else:
        cap = link_capacity(delta, outage)
    occ = mean_occupancy(fp.dist)
    thr = cell_throughput(fp, cap, econ)
    return EfficiencyReport(
        throughput=thr,
        link_capacity=cap,
        sse=spatial_spectrum_efficiency(thr, lambda_B),
        ee=energy_efficiency(thr, econ, occ),
        mean_occupancy=occ,
        blocking=blocking_probability(fp.dist),
        p_busy=fp.p_busy,
        epsilon=fp.epsilon,
    )
