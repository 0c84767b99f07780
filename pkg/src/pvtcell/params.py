"""Default network parameters and unit conversions.

The library works in linear units throughout; decibel values are converted
here, at the boundary.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

from .efficiency import SECONDS_PER_YEAR, RadioEconomics
from .interference import LinkParams
from .markov import ChainParams

__all__ = ["db_to_linear", "linear_to_db", "dbm_to_watt", "NetworkParams", "DEFAULTS"]


def db_to_linear(db):
    return 10.0 ** (db / 10.0)


def linear_to_db(x):
    return 10.0 * math.log10(x)


def dbm_to_watt(dbm):
    return 10.0 ** ((dbm - 30.0) / 10.0)


@dataclass(frozen=True)
class NetworkParams:
    """Every scalar of the model, in linear units.

    Distances are km, densities km^-2, rates per minute, powers W.
    ``K_prime`` is antenna gain times transmit power. ``eta`` is the
    channel release rate (call completion plus hand-off).
    """

    lambda_B: float = 0.2
    C: int = 20
    lam: float = 1.0
    eta: float = 0.1
    K_prime: float = db_to_linear(31.54) * dbm_to_watt(30.0)
    noise_power: float = dbm_to_watt(0.0)
    b: float = 4.0
    gamma0: float = db_to_linear(10.0)
    disk_radius: float | None = None
    bandwidth: float = 1e5
    E_embodied: float = 85e9
    P_chl: float = 1.0
    h: float = 7.84
    k: float = 71.5
    t_lifetime: float = SECONDS_PER_YEAR

    def replace(self, **changes) -> "NetworkParams":
        return dataclasses.replace(self, **changes)

    def link(self) -> LinkParams:
        return LinkParams(self.lambda_B, self.b, self.K_prime, self.noise_power, self.gamma0,
                          self.disk_radius)

    def chain(self, ratio: float = 1.0) -> ChainParams:
        """Chain parameters with availability ratio ``alpha/beta = ratio``."""
        return ChainParams(self.C, self.lam, self.eta, ratio, 1.0)

    def economics(self) -> RadioEconomics:
        return RadioEconomics(self.bandwidth, self.E_embodied, self.P_chl, self.h, self.k,
                              self.t_lifetime)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


DEFAULTS = NetworkParams()
