"""Special functions and quadrature shared by the analytical modules.

The quadrature routines are vectorised: the integrand receives a 1-D array
of abscissae and may return either an array of the same length or an array
whose leading axis is the abscissa axis (vector-valued integrands). Error
control for vector-valued integrands uses the max-norm over components.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "QuadratureSpec",
    "QuadResult",
    "QuadratureError",
    "PoleError",
    "DEFAULT_QUADRATURE",
    "gamma_real",
    "complex_power",
    "integrate_adaptive",
    "integrate_semi_infinite",
    "erlang_b",
]


class PoleError(ValueError):
    """Raised when a function is evaluated at one of its poles."""


class QuadratureError(ArithmeticError):
    """Adaptive quadrature ran out of subdivisions.

    The best estimate and its error bound are kept on the exception so
    callers can decide whether the result is still usable.
    """

    def __init__(self, message, value, error):
        super().__init__(message)
        self.value = value
        self.error = error


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-9
    rel_tol: float = 1e-7
    max_subdivisions: int = 2000
    truncation_radius: float = 1e12

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValueError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")
        if self.truncation_radius <= 0:
            raise ValueError("truncation_radius must be positive")


DEFAULT_QUADRATURE = QuadratureSpec()


@dataclass
class QuadResult:
    value: complex | np.ndarray
    error: float
    subdivisions: int
    meta: dict = field(default_factory=dict)


def gamma_real(x: float) -> float:
    """Gamma function of a real argument.

    ``math.gamma`` already uses a Lanczos approximation with the reflection
    formula for negative arguments; this wrapper only turns the poles into a
    dedicated error.
    """
    x = float(x)
    if x <= 0 and x == math.floor(x):
        raise PoleError(f"Gamma has a pole at {x:g}")
    return math.gamma(x)


def complex_power(z, a: float):
    """Principal-branch power ``z**a`` with ``Arg z`` in (-pi, pi].

    Accepts Python scalars or numpy arrays.
    """
    if np.ndim(z) == 0:
        z = complex(z)
        if z == 0:
            if a <= 0:
                raise ValueError("0 ** a is undefined for a <= 0")
            return 0j
        return cmath.exp(a * cmath.log(z))
    z = np.asarray(z, dtype=complex)
    zero = z == 0
    if a <= 0 and np.any(zero):
        raise ValueError("0 ** a is undefined for a <= 0")
    out = np.zeros_like(z)
    nz = ~zero
    out[nz] = np.exp(a * np.log(z[nz]))
    return out


# Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
_KWEIGHTS = np.concatenate([_WK[:-1], _WK[::-1]])
# Gauss points are the odd-indexed Kronrod points (1, 3, 5, 7 from the end).
_GWEIGHTS = np.zeros(15)
_GWEIGHTS[[1, 3, 5]] = _WG[:3]
_GWEIGHTS[[9, 11, 13]] = _WG[2::-1]
_GWEIGHTS[7] = _WG[3]


def _gk15(f, a, b):
    """Apply GK15 on every interval [a_i, b_i] in a single integrand call."""
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    x = (mid[:, None] + half[:, None] * _NODES[None, :]).ravel()
    y = np.asarray(f(x))
    y = y.reshape((len(a), 15) + y.shape[1:])
    yk = np.moveaxis(y, 1, -1)
    scale = half.reshape((-1,) + (1,) * (yk.ndim - 2))
    k = (yk @ _KWEIGHTS) * scale
    g = (yk @ _GWEIGHTS) * scale
    err = np.abs(k - g).reshape(len(a), -1).max(axis=1)
    return k, err


def integrate_adaptive(
    f: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
    initial: int = 1,
    breakpoints=None,
) -> QuadResult:
    """Globally adaptive Gauss-Kronrod (7/15) quadrature of ``f`` on [lo, hi].

    Intervals are bisected, largest error first, until the summed error
    estimate is within ``max(abs_tol, rel_tol * |result|)``. Bisection is
    done in batches so every refinement step is a single vectorised call
    of ``f``.

    Raises:
        QuadratureError: if more than ``spec.max_subdivisions`` intervals
            would be needed. The exception carries the best estimate.
    """
    if breakpoints is not None:
        edges = np.unique(np.concatenate([[lo, hi], np.asarray(breakpoints, float)]))
        edges = edges[(edges >= lo) & (edges <= hi)]
    else:
        edges = np.linspace(lo, hi, int(initial) + 1)
    a, b = edges[:-1].copy(), edges[1:].copy()
    est, err = _gk15(f, a, b)
    while True:
        total = est.sum(axis=0)
        total_err = float(err.sum())
        target = max(spec.abs_tol, spec.rel_tol * float(np.max(np.abs(total))))
        if total_err <= target:
            break
        if len(a) >= spec.max_subdivisions:
            raise QuadratureError(
                f"no convergence after {len(a)} subdivisions "
                f"(error {total_err:.3g} > {target:.3g})",
                total,
                total_err,
            )
        # Refine the worst intervals that together carry most of the error.
        order = np.argsort(err)[::-1]
        cum = np.cumsum(err[order])
        n_split = int(np.searchsorted(cum, 0.5 * total_err)) + 1
        n_split = min(n_split, spec.max_subdivisions - len(a), len(a))
        n_split = max(n_split, 1)
        pick = order[:n_split]
        keep = np.ones(len(a), bool)
        keep[pick] = False
        pa, pb = a[pick], b[pick]
        pm = 0.5 * (pa + pb)
        na = np.concatenate([pa, pm])
        nb = np.concatenate([pm, pb])
        nest, nerr = _gk15(f, na, nb)
        a = np.concatenate([a[keep], na])
        b = np.concatenate([b[keep], nb])
        est = np.concatenate([est[keep], nest])
        err = np.concatenate([err[keep], nerr])
    value = total if np.ndim(total) else total.item()
    return QuadResult(value=value, error=total_err, subdivisions=len(a))


def integrate_semi_infinite(
    f: Callable[[np.ndarray], np.ndarray],
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
    scale: float = 1.0,
) -> QuadResult:
    """Integrate ``f`` over [0, inf) through the map ``x = scale*u/(1-u)``.

    ``scale`` should be of the order of the integrand's decay length; the
    abscissae of GK15 never touch u = 1 so the endpoint is never evaluated.
    """

    def g(u):
        one_minus = 1.0 - u
        x = scale * u / one_minus
        jac = scale / one_minus**2
        y = np.asarray(f(x))
        return y * jac.reshape((-1,) + (1,) * (y.ndim - 1))

    res = integrate_adaptive(g, 0.0, 1.0, spec, initial=4)
    res.meta["substitution"] = f"x = {scale:g}*u/(1-u)"
    return res


def erlang_b(C: int, a: float) -> float:
    """Erlang-B blocking probability of an M/M/C/C loss system."""
    if a <= 0:
        raise ValueError("offered load must be positive")
    if int(C) != C or C < 1:
        raise ValueError("C must be a positive integer")
    b = 1.0
    for k in range(1, int(C) + 1):
        b = a * b / (k + a * b)
    return b
