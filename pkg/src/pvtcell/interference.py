"""Propagation scenarios, Laplace transforms and conditional outage.

All quantities are linear (watts, linear SINR). Distances are in km and
densities in km^-2.

The conditional outage ``p_out(gamma0, delta)`` is the probability that the
SINR of a user served by its nearest base station falls below ``gamma0``
when exactly ``delta`` co-channel interferers are active, the interferers
being placed independently and uniformly on a disk of radius ``a`` around
the user. It is evaluated through a Parseval integral along the imaginary
axis of the Laplace variable.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import binom

from .numerics import (
    DEFAULT_QUADRATURE,
    QuadratureSpec,
    complex_power,
    gamma_real,
    integrate_adaptive,
    integrate_semi_infinite,
)

__all__ = [
    "FadingKind",
    "FadingModel",
    "RAYLEIGH",
    "NO_FADING",
    "LinkParams",
    "UnsupportedModelError",
    "OutageResult",
    "laplace_noise",
    "laplace_fading",
    "fading_fractional_moment",
    "laplace_interference",
    "laplace_interferer_disk",
    "laplace_interference_disk",
    "limit_transform_tail_exponent",
    "outage_detail",
    "outage_probabilities",
    "outage_probability",
    "success_probability",
    "unavailable_probability",
]

# Clamp excursions beyond this are treated as numerical failure.
MAX_EXCURSION = 1e-3


class UnsupportedModelError(NotImplementedError):
    """The requested fading scenario has no closed-form path."""


class FadingKind(enum.Enum):
    NONE = "none"
    RAYLEIGH = "rayleigh"
    NAKAGAMI = "nakagami"
    LOGNORMAL = "lognormal"
    NAKAGAMI_LOGNORMAL = "nakagami-lognormal"


@dataclass(frozen=True)
class FadingModel:
    """Distribution of the unit-mean-scale power factor ``S``.

    ``m`` is the Nakagami shape, ``sigma`` the shadowing coefficient in
    ``exp(2*sigma*G)`` with standard normal ``G``.
    """

    kind: FadingKind
    m: float | None = None
    sigma: float | None = None

    def __post_init__(self):
        if self.kind in (FadingKind.NAKAGAMI, FadingKind.NAKAGAMI_LOGNORMAL):
            if self.m is None or self.m < 0.5:
                raise ValueError("Nakagami shape m must be >= 0.5")
        if self.kind in (FadingKind.LOGNORMAL, FadingKind.NAKAGAMI_LOGNORMAL):
            if self.sigma is None or self.sigma <= 0:
                raise ValueError("shadowing sigma must be positive")

    @classmethod
    def parse(cls, text: str) -> "FadingModel":
        """Parse ``none``, ``rayleigh``, ``nakagami:M``, ``lognormal:S`` or
        ``nakagami-lognormal:M:S``."""
        head, *args = text.strip().lower().split(":")
        kind = FadingKind(head)
        vals = [float(v) for v in args]
        if kind is FadingKind.NAKAGAMI:
            return cls(kind, m=vals[0])
        if kind is FadingKind.LOGNORMAL:
            return cls(kind, sigma=vals[0])
        if kind is FadingKind.NAKAGAMI_LOGNORMAL:
            return cls(kind, m=vals[0], sigma=vals[1])
        return cls(kind)

    def __str__(self):
        parts = [self.kind.value]
        if self.m is not None:
            parts.append(f"{self.m:g}")
        if self.sigma is not None:
            parts.append(f"{self.sigma:g}")
        return ":".join(parts)


RAYLEIGH = FadingModel(FadingKind.RAYLEIGH)
NO_FADING = FadingModel(FadingKind.NONE)


@dataclass(frozen=True)
class LinkParams:
    """Link-level parameters.

    ``disk_radius`` is the radius (km) of the disk carrying the conditioned
    interferers; ``None`` selects ``50 / sqrt(lambda_B)``.
    """

    lambda_B: float
    b: float
    K_prime: float
    noise_power: float
    gamma0: float
    disk_radius: float | None = None

    def __post_init__(self):
        if not self.lambda_B > 0:
            raise ValueError("lambda_B must be positive")
        if not self.b > 2:
            raise ValueError(
                "path-loss exponent must exceed 2: Gamma(-2/b) has a pole at b = 2 "
                "and the far-field interference integral diverges for b <= 2"
            )
        if not self.K_prime > 0:
            raise ValueError("K_prime must be positive")
        if self.noise_power < 0:
            raise ValueError("noise power must be non-negative")
        if not self.gamma0 > 0:
            raise ValueError("gamma0 must be positive")
        if self.disk_radius is not None and not self.disk_radius > 0:
            raise ValueError("disk_radius must be positive")

    @property
    def radius(self) -> float:
        if self.disk_radius is not None:
            return self.disk_radius
        return 50.0 / math.sqrt(self.lambda_B)


def _require(model: FadingModel, *kinds: FadingKind):
    if model.kind not in kinds:
        raise UnsupportedModelError(
            f"{model.kind.value} fading has no closed-form transform; "
            "use the Monte Carlo estimators"
        )


def laplace_noise(s, noise_power: float):
    """Transform of the deterministic noise power: ``exp(-noise_power*s)``."""
    return np.exp(-noise_power * np.asarray(s, dtype=complex))[()]


def laplace_fading(s, model: FadingModel):
    """Laplace transform of the fading power ``S``."""
    _require(model, FadingKind.NONE, FadingKind.RAYLEIGH)
    s = np.asarray(s, dtype=complex)
    if model.kind is FadingKind.NONE:
        return np.exp(-s)[()]
    if np.any(s == -1):
        raise ZeroDivisionError("Rayleigh transform has a pole at s = -1")
    return (1.0 / (1.0 + s))[()]


def fading_fractional_moment(model: FadingModel, delta: int, b: float) -> float:
    """``E[S ** (2*delta/b)]``."""
    if not b > 0:
        raise ValueError("b must be positive")
    _require(model, FadingKind.NONE, FadingKind.RAYLEIGH)
    if model.kind is FadingKind.NONE:
        return 1.0
    return gamma_real(1.0 + 2.0 * delta / b)


def laplace_interference(s, delta: int, link: LinkParams, model: FadingModel = RAYLEIGH):
    """Limit form of the conditioned aggregate-interference transform.

    ``((1/b) (s K')**(2/b) Gamma(-2/b))**delta * E[S**(2 delta/b)]``.

    This is the infinite-radius limit of the per-interferer disk average with
    the ``2/a**2`` area normalisation dropped. It is not the transform of a
    probability law (it vanishes at ``s = 0`` for ``delta > 0`` and grows
    with ``|s|``); it appears here as the leading correction of the exact
    finite-disk transform, see :func:`laplace_interferer_disk`.
    """
    if delta == 0:
        return np.ones_like(np.asarray(s, dtype=complex))[()]
    b = link.b
    if b <= 2:
        raise ValueError("b must exceed 2")
    s = np.asarray(s, dtype=complex)
    if np.any(s == 0):
        raise ValueError("s must be non-zero when delta > 0")
    base = complex_power(s * link.K_prime, 2.0 / b) * gamma_real(-2.0 / b) / b
    out = base**delta * fading_fractional_moment(model, delta, b)
    return out[()] if isinstance(out, np.ndarray) else out


def limit_transform_tail_exponent(delta: int, b: float) -> float:
    """Large-``|s|`` growth exponent of the outage integrand built on the limit
    transform: the integrand behaves like ``|s| ** (2 delta / b - 1)``.

    The inner integral converges absolutely only when this is below -1,
    which never happens for ``delta >= 1``.
    """
    return 2.0 * delta / b - 1.0


_GL_W, _GL_X = None, None


def _gauss_legendre_01(n=64):
    global _GL_W, _GL_X
    if _GL_X is None or len(_GL_X) != n:
        x, w = np.polynomial.legendre.leggauss(n)
        _GL_X, _GL_W = 0.5 * (x + 1.0), 0.5 * w
    return _GL_X, _GL_W


def _disk_kernel(q, beta: float, terms: int = 60):
    """``int_0^1 v**beta / (q + v**beta) dv`` for complex ``q`` off the
    negative real axis.

    Series about ``q = 0`` (with the exact half-line integral split off) and
    about ``q = inf`` cover ``|q| <= 1/2`` and ``|q| >= 2``; Gauss-Legendre
    handles the annulus in between.
    """
    q = np.asarray(q, dtype=complex)
    out = np.empty_like(q)
    aq = np.abs(q)
    k = np.arange(terms)

    small = aq <= 0.5
    if np.any(small):
        qs = q[small]
        # int_1^inf q/(q + v**beta) dv as a power series in q.
        coef = (-1.0) ** k / (beta * (k + 1) - 1.0)
        powers = qs[:, None] ** (k + 1)[None, :]
        tail = powers @ coef
        head = complex_power(qs, 1.0 / beta) * (math.pi / beta) / math.sin(math.pi / beta)
        out[small] = 1.0 - (head - tail)

    large = aq >= 2.0
    if np.any(large):
        ql = q[large]
        coef = (-1.0) ** k / (beta * (k + 1) + 1.0)
        powers = (1.0 / ql)[:, None] ** (k + 1)[None, :]
        out[large] = powers @ coef

    mid = ~(small | large)
    if np.any(mid):
        x, w = _gauss_legendre_01()
        v = x**2
        vb = v**beta
        integrand = 2.0 * x[None, :] * vb[None, :] / (q[mid][:, None] + vb[None, :])
        out[mid] = integrand @ w
    return out


def laplace_interferer_disk(s, link: LinkParams, model: FadingModel = RAYLEIGH):
    """Exact transform of one Rayleigh-faded interferer uniform on the disk.

    ``E[exp(-s K' S r**-b)]`` with ``r`` having density ``2r/a**2`` on
    ``[0, a]``. For small ``|s K'| / a**b`` it equals
    ``1 + (2/a**2) * laplace_interference(s, 1, ...) + O(s K' / a**b)``.
    """
    _require(model, FadingKind.RAYLEIGH)
    a = link.radius
    q = np.asarray(s, dtype=complex) * link.K_prime / a**link.b
    return _disk_kernel(q, link.b / 2.0)[()]


def laplace_interference_disk(s, delta: int, link: LinkParams, model: FadingModel = RAYLEIGH):
    """Transform of ``delta`` i.i.d. interferers on the disk."""
    if delta == 0:
        return np.ones_like(np.asarray(s, dtype=complex))[()]
    return laplace_interferer_disk(s, link, model) ** delta


@dataclass
class OutageResult:
    gamma0: float
    deltas: np.ndarray
    outage: np.ndarray
    raw_success: np.ndarray
    excursion: float
    error: float
    meta: dict = field(default_factory=dict)


def outage_detail(
    gamma0: float,
    deltas,
    link: LinkParams,
    model: FadingModel = RAYLEIGH,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> OutageResult:
    """Conditional outage for several interferer counts at once.

    For exponential desired-signal power the success probability given the
    serving distance ``r`` is a Parseval integral along the imaginary axis,

        p_suc(r) = L_noise(c) * (1/pi) int Re[L_I(-j c t)] * 2/(1+t^2) dt,

    with ``c = gamma0 r**b / K'``. The kernel ``2/(1+t^2)`` is the Fourier
    transform of the even extension of the exponential CCDF; the even
    extension is exact because the noise-plus-interference is positive, and
    it makes the integral absolutely convergent. Writing ``t = exp(v)/y``
    with ``y = gamma0 (r/a)**b`` turns the disk transform into a function of
    ``v`` alone, so the inner integral becomes a convolution with
    ``1/cosh(v - ln y)`` that is shared by every serving distance. The outer
    integral runs over ``x = pi lambda_B r**2``, which is Exp(1).
    """
    _require(model, FadingKind.RAYLEIGH)
    deltas = np.atleast_1d(np.asarray(deltas, dtype=int))
    if np.any(deltas < 0):
        raise ValueError("delta must be non-negative")
    if not gamma0 > 0:
        raise ValueError("gamma0 must be positive")
    b = link.b
    beta = b / 2.0
    lam = link.lambda_B
    area_scale = math.pi * lam * link.radius**2
    noise_coef = gamma0 * link.noise_power / link.K_prime / (math.pi * lam) ** beta
    active = deltas > 0
    d_active = deltas[active]
    envelope_span = math.log(200.0 / spec.abs_tol)
    inner_spec = QuadratureSpec(
        abs_tol=spec.abs_tol / 10, rel_tol=spec.rel_tol, max_subdivisions=spec.max_subdivisions
    )
    meta = {"truncation": []}

    def conditional_success(x):
        x = np.asarray(x, float)
        noise = laplace_noise(noise_coef * x**beta, 1.0).real
        out = np.repeat(noise[:, None], len(deltas), axis=1)
        if d_active.size == 0:
            return out
        log_y = math.log(gamma0) + beta * (np.log(x) - math.log(area_scale))
        lo = float(log_y.min()) - envelope_span
        hi = float(log_y.max()) + envelope_span
        meta["truncation"].append((lo, hi))

        def inner(v):
            L1 = _disk_kernel(-1j * np.exp(v), beta)
            G = 1.0 - np.real(L1[:, None] ** d_active[None, :])
            sech = 1.0 / np.cosh(v[:, None] - log_y[None, :])
            return G[:, None, :] * sech[:, :, None] / math.pi

        J = integrate_adaptive(inner, lo, hi, inner_spec, initial=8).value
        out[:, active] *= 1.0 - np.real(J)
        return out

    res = integrate_semi_infinite(lambda x: np.exp(-x)[:, None] * conditional_success(x), spec)
    raw = np.real(np.atleast_1d(res.value))
    excursion = float(max(0.0, np.max(raw - 1.0), np.max(-raw)))
    if excursion > MAX_EXCURSION:
        raise ArithmeticError(f"outage quadrature left [0, 1] by {excursion:.3g}")
    outage = np.clip(1.0 - raw, 0.0, 1.0)
    lohi = meta.pop("truncation")
    meta["log_s_range"] = (min(l for l, _ in lohi), max(h for _, h in lohi)) if lohi else None
    meta.update(res.meta)
    return OutageResult(gamma0, deltas, outage, raw, excursion, res.error, meta)


def outage_probabilities(gamma0, deltas, link, model=RAYLEIGH, spec=DEFAULT_QUADRATURE) -> np.ndarray:
    return outage_detail(gamma0, deltas, link, model, spec).outage


def outage_probability(
    gamma0: float,
    delta: int,
    link: LinkParams,
    model: FadingModel = RAYLEIGH,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """Outage probability with exactly ``delta`` interferers on the disk."""
    return float(outage_detail(gamma0, [delta], link, model, spec).outage[0])


def success_probability(gamma0, delta, link, model=RAYLEIGH, spec=DEFAULT_QUADRATURE) -> float:
    return 1.0 - outage_probability(gamma0, delta, link, model, spec)


def unavailable_probability(
    p_busy: float,
    link: LinkParams,
    model: FadingModel = RAYLEIGH,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
    n_max: int = 24,
    pool: int | None = None,
    outage=None,
) -> float:
    """Probability that a channel is unusable at ``link.gamma0``.

    ``sum_{delta=1}^{n_max} p_out(gamma0, delta) * Binom(pool, p_busy)(delta)``.
    ``pool`` is the number of potential co-channel interferers (binomial
    trials); it defaults to ``n_max``. The ``delta = 0`` term is excluded.
    ``outage`` may supply precomputed values indexed by ``delta``.
    """
    if not 0.0 <= p_busy <= 1.0:
        raise ValueError("p_busy must lie in [0, 1]")
    pool = n_max if pool is None else pool
    deltas = np.arange(1, n_max + 1)
    if outage is None:
        p_out = outage_probabilities(link.gamma0, deltas, link, model, spec)
    else:
        p_out = np.asarray(outage, float)[deltas]
    weights = binom.pmf(deltas, pool, p_busy)
    return float(np.dot(p_out, weights))
