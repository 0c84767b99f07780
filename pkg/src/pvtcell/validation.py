"""Oracle comparisons, each producing named pass/fail checks.

These back the ``validate`` command and the acceptance suite. Trial counts
are parameters so quick smoke runs and full-size runs share the code.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .interference import RAYLEIGH, limit_transform_tail_exponent, outage_probabilities
from .markov import (
    ChainParams,
    blocking_probability,
    build_generator,
    solve_generator,
    stationary_distribution,
)
from .montecarlo import MCConfig, mc_chain_blocking, mc_outage_disk, mc_outage_pvt
from .numerics import erlang_b
from .oracles import noise_only_success, ppp_coverage
from .params import DEFAULTS, NetworkParams, db_to_linear

__all__ = ["Check", "SUITES", "run_suite", "markov_checks", "erlang_checks", "outage_checks",
           "noise_only_checks", "chain_mc_checks", "pvt_mc_checks", "disk_radius_drift",
           "limit_form_report"]


@dataclass
class Check:
    name: str
    passed: bool
    measured: float
    bound: float
    note: str = ""

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        extra = f" ({self.note})" if self.note else ""
        return f"{tag} {self.name}: measured {self.measured:.3g}, bound {self.bound:.3g}{extra}"


def markov_checks(draws: int = 50, seed: int = 7) -> list[Check]:
    """Product form against a dense solve of the generator."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for C in range(1, 9):
        for _ in range(draws):
            lam, eta, alpha, beta = np.exp(rng.uniform(np.log(0.05), np.log(20.0), 4))
            p = ChainParams(C, lam, eta, alpha, beta)
            gap = np.max(np.abs(stationary_distribution(p).probs
                                - solve_generator(build_generator(p)).probs))
            worst = max(worst, float(gap))
    return [Check("product form vs generator solve", worst < 1e-9, worst, 1e-9,
                  f"C=1..8, {draws} draws each")]


ERLANG_CASES = [(C, a) for C in (1, 5, 10, 20) for a in (0.5, 1.0, 5.0)]


def erlang_checks() -> list[Check]:
    """Always-available channels reduce the chain to a loss system."""
    worst = 0.0
    for C, a in ERLANG_CASES:
        dist = stationary_distribution(ChainParams(C, a, 1.0, 1e6, 1.0))
        worst = max(worst, abs(blocking_probability(dist) - erlang_b(C, a)))
    return [Check("Erlang-B limit", worst < 1e-4, worst, 1e-4, f"{len(ERLANG_CASES)} cases")]


def outage_checks(params: NetworkParams = DEFAULTS, trials: int = 1_000_000, seed: int = 1,
                  gammas_db=(0.0, 5.0, 10.0), deltas=(1, 2, 5), k: float = 2.0) -> list[Check]:
    """Analytic conditional outage against the disk-model simulation."""
    link = params.link()
    checks = []
    for d in deltas:
        g_lin = [db_to_linear(g) for g in gammas_db]
        est = mc_outage_disk(np.array(g_lin), d, link, RAYLEIGH, MCConfig(trials, seed + d))
        for g_db, g, e in zip(gammas_db, g_lin, est):
            analytic = float(outage_probabilities(g, [d], link)[0])
            z = abs(analytic - e.mean) / e.std_error if e.std_error else float("inf")
            checks.append(Check(f"outage {g_db:g} dB, delta={d}", z <= k, z, k,
                                f"analytic {analytic:.4g}, MC {e.mean:.4g} +- {e.std_error:.2g}"))
    return checks


def limit_form_report(deltas=(1, 2, 5), b: float = 4.0) -> list[str]:
    """Why the infinite-radius limit transform cannot stand in for the
    finite-disk one: the Parseval integrand then grows like |s|**e."""
    lines = []
    for d in deltas:
        e = limit_transform_tail_exponent(d, b)
        lines.append(f"INFO limit transform, delta={d}: integrand ~ |s|^{e:g}, "
                     f"{'integrable' if e < -1 else 'not integrable'}")
    return lines


def disk_radius_drift(params: NetworkParams = DEFAULTS, trials: int = 1_000_000, seed: int = 3,
                      gamma_db: float = 10.0, deltas=(1, 2, 5)) -> list[Check]:
    """Change of the disk-model estimate when the disk radius doubles."""
    link = params.link()
    g = db_to_linear(gamma_db)
    checks = []
    for d in deltas:
        a = link.radius
        e1 = mc_outage_disk(g, d, link, RAYLEIGH, MCConfig(trials, seed, disk_radius=a))
        e2 = mc_outage_disk(g, d, link, RAYLEIGH, MCConfig(trials, seed, disk_radius=2 * a))
        se = float(np.hypot(e1.std_error, e2.std_error))
        drift = abs(e1.mean - e2.mean) / se
        checks.append(Check(f"disk radius doubling, delta={d}", drift < 1.0, drift, 1.0,
                            f"{e1.mean:.4g} -> {e2.mean:.4g}"))
    return checks


def noise_only_checks(params: NetworkParams = DEFAULTS, points: int = 20) -> list[Check]:
    link = params.link()
    worst = 0.0
    for g_db in np.linspace(-10.0, 40.0, points):
        g = db_to_linear(g_db)
        analytic = 1.0 - float(outage_probabilities(g, [0], link)[0])
        worst = max(worst, abs(analytic - noise_only_success(g, link)))
    return [Check("noise-only success vs 1-D reduction", worst < 1e-6, worst, 1e-6,
                  f"{points} thresholds")]


def chain_mc_checks(sets: int = 10, seed: int = 11, arrivals: float = 2e5,
                    k: float = 3.0) -> list[Check]:
    rng = np.random.default_rng(seed)
    checks = []
    for i in range(sets):
        C = int(rng.integers(1, 9))
        load = float(rng.uniform(0.3, 1.5) * C)
        ratio = float(np.exp(rng.uniform(np.log(0.5), np.log(20.0))))
        chain = ChainParams(C, load, 1.0, ratio, 1.0)
        exact = blocking_probability(stationary_distribution(chain))
        est = mc_chain_blocking(chain, arrivals / load, MCConfig(seed=seed + i))
        z = abs(est.mean - exact) / est.std_error
        checks.append(Check(f"chain simulation set {i} (C={C})", z <= k, z, k,
                            f"exact {exact:.4g}, MC {est.mean:.4g} +- {est.std_error:.2g}"))
    return checks


def pvt_mc_checks(trials: int = 1_000_000, seed: int = 5, gammas_db=(0.0, 5.0, 10.0),
                  k: float = 3.0) -> list[Check]:
    """Interference-limited PPP network against its closed-form coverage."""
    link = DEFAULTS.replace(noise_power=0.0, b=4.0).link()
    g_lin = np.array([db_to_linear(g) for g in gammas_db])
    est = mc_outage_pvt(g_lin, link, RAYLEIGH, MCConfig(trials, seed))
    checks = []
    for g_db, g, e in zip(gammas_db, g_lin, est):
        exact = 1.0 - ppp_coverage(g)
        z = abs(e.mean - exact) / e.std_error
        checks.append(Check(f"PPP coverage {g_db:g} dB", z <= k, z, k,
                            f"closed form {exact:.4g}, MC {e.mean:.4g} +- {e.std_error:.2g}"))
    return checks


SUITES = {
    "markov": lambda trials: markov_checks() + erlang_checks(),
    "outage": lambda trials: noise_only_checks() + outage_checks(trials=trials),
    "chain-mc": lambda trials: chain_mc_checks(),
    "pvt-mc": lambda trials: pvt_mc_checks(trials=trials),
}


def run_suite(name: str, trials: int = 1_000_000) -> list[Check]:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}")
    return SUITES[name](trials)
