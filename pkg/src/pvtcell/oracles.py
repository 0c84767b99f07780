"""Independent reference computations used to cross-check the main
evaluation paths. They use scipy's QUADPACK and hypergeometric routines so
they share no numerical code with the library."""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate, special

from .coupling import OutageCache, SolverConfig, sweep_map
from .interference import LinkParams

__all__ = [
    "noise_only_success",
    "disk_success",
    "disk_interferer_real",
    "ppp_coverage",
    "bisection_fixed_point",
]


def noise_only_success(gamma0: float, link: LinkParams) -> float:
    """Success probability without interferers.

    ``int 2 pi lambda_B r exp(-pi lambda_B r^2) exp(-gamma0 sigma^2 r^b / K') dr``.
    """
    lam, b = link.lambda_B, link.b
    c = gamma0 * link.noise_power / link.K_prime

    def f(r):
        return 2 * math.pi * lam * r * math.exp(-math.pi * lam * r * r - c * r**b)

    scale = 1.0 / math.sqrt(lam)
    head, _ = integrate.quad(f, 0, 10 * scale, epsabs=1e-13, epsrel=1e-12, limit=200)
    tail, _ = integrate.quad(f, 10 * scale, np.inf, epsabs=1e-13, epsrel=1e-12)
    return head + tail


def disk_interferer_real(q: float, beta: float) -> float:
    """``int_0^1 v^beta/(q + v^beta) dv`` at real ``q > 0``.

    With ``w = v^beta`` this is ``1 - 2F1(1, 1/beta; 1 + 1/beta; -1/q)``.
    """
    return 1.0 - special.hyp2f1(1.0, 1.0 / beta, 1.0 + 1.0 / beta, -1.0 / q)


def disk_success(gamma0: float, delta: int, link: LinkParams) -> float:
    """Success probability with ``delta`` Rayleigh interferers on the disk,
    by a one-dimensional real integral over the serving distance.

    ``E_r[exp(-gamma0 sigma^2 r^b/K') * L(gamma0 (r/a)^b) ** delta]`` where
    ``L`` is the real-argument per-interferer transform.
    """
    lam, b, a = link.lambda_B, link.b, link.radius
    beta = b / 2

    def f(x):
        if x == 0.0:
            return 1.0
        r = math.sqrt(x / (math.pi * lam))
        q = gamma0 * (r / a) ** b
        noise = math.exp(-gamma0 * link.noise_power * r**b / link.K_prime)
        per = disk_interferer_real(q, beta) if delta else 1.0
        return math.exp(-x) * noise * per**delta

    val = 0.0
    for lo, hi in ((0, 1), (1, 10), (10, 60)):
        part, _ = integrate.quad(f, lo, hi, epsabs=1e-13, epsrel=1e-11, limit=200)
        val += part
    return val


def ppp_coverage(gamma0: float, b: float = 4.0) -> float:
    """Interference-limited nearest-BS coverage of a Rayleigh PPP network,
    ``1/(1 + rho)`` with ``rho = sqrt(g) (pi/2 - arctan(1/sqrt(g)))`` at b = 4."""
    if b != 4:
        raise ValueError("closed form available for b = 4 only")
    s = math.sqrt(gamma0)
    return 1.0 / (1.0 + s * (math.pi / 2 - math.atan(1.0 / s)))


def bisection_fixed_point(chain, cache: OutageCache, cfg: SolverConfig = SolverConfig(),
                          steps: int = 64) -> float:
    """Root of ``p_new(p) - p`` on [0, 1] by plain bisection."""
    lo, hi = 0.0, 1.0
    if sweep_map(lo, chain, cache, cfg)[0] - lo <= 0:
        return lo
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        if sweep_map(mid, chain, cache, cfg)[0] - mid > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
