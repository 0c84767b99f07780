"""Parameter sweeps and the recipes behind each result figure.

A sweep is a list of :class:`~pvtcell.params.NetworkParams`; every point is
solved independently and rows come back in sweep order.
"""

from __future__ import annotations

import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .coupling import OutageCache, OutageTable, SolverConfig, outage_table, solve_fixed_point
from .efficiency import efficiency_report
from .interference import RAYLEIGH, FadingModel
from .markov import blocking_probability, mean_sojourn_time
from .montecarlo import MCConfig, mc_outage_grid_table
from .numerics import DEFAULT_QUADRATURE, QuadratureSpec
from .params import DEFAULTS, NetworkParams, db_to_linear, linear_to_db

__all__ = ["Evaluator", "SweepResult", "blocking_rows", "sojourn_rows", "efficiency_rows",
           "FIGURES", "run_figure"]

MODELS = ("pvt", "grid-mc")


@dataclass
class SweepResult:
    columns: list
    rows: list
    meta: dict = field(default_factory=dict)

    def column(self, name, **where):
        """Values of ``name`` over the rows matching ``where``, in order."""
        out = []
        for row in self.rows:
            if all(row[k] == v for k, v in where.items()):
                out.append(row[name])
        return np.asarray(out)


class Evaluator:
    """Solves operating points, memoising outage caches and tables.

    Args:
        model: ``"pvt"`` for the analytic disk model, ``"grid-mc"`` for
            Monte Carlo estimates on a hexagonal grid.
        mc: Monte Carlo settings for ``grid-mc`` tables.
    """

    def __init__(self, model: str = "pvt", fading: FadingModel = RAYLEIGH,
                 solver: SolverConfig = SolverConfig(), spec: QuadratureSpec = DEFAULT_QUADRATURE,
                 mc: MCConfig = MCConfig(trials=20_000)):
        if model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}")
        self.model, self.fading, self.solver, self.spec, self.mc = model, fading, solver, spec, mc
        self._tables: dict = {}
        self._caches: dict = {}
        self._lock = threading.Lock()

    @staticmethod
    def _link_key(p: NetworkParams):
        return (p.lambda_B, p.b, p.K_prime, p.noise_power, p.disk_radius)

    def table(self, p: NetworkParams) -> OutageTable:
        key = self._link_key(p)
        with self._lock:
            if key not in self._tables:
                self._tables[key] = self._build_table(p)
            return self._tables[key]

    def _build_table(self, p: NetworkParams) -> OutageTable:
        link = p.link()
        deltas = np.arange(self.solver.interferer_pool + 1)
        res = self.solver.outage_cache_resolution
        grid = np.linspace(-30.0, 160.0, 19 * res + 1)
        if self.model == "pvt":
            return outage_table(link, self.fading, deltas, grid, self.spec, res)
        est = mc_outage_grid_table(db_to_linear(grid), deltas, link, self.fading, self.mc,
                                   radius=link.radius)
        values = np.array([[e.mean for e in row] for row in est])
        return OutageTable(grid, deltas, values, link.b)

    def cache(self, p: NetworkParams) -> OutageCache:
        key = self._link_key(p) + (p.gamma0,)
        with self._lock:
            if key in self._caches:
                return self._caches[key]
        if self.model == "pvt":
            cache = OutageCache(p.link(), self.fading, self.spec)
        else:
            tab = self.table(p)
            cache = OutageCache(p.link(), values=[tab(p.gamma0, int(d)) for d in tab.deltas])
        with self._lock:
            return self._caches.setdefault(key, cache)

    def solve(self, p: NetworkParams):
        return solve_fixed_point((p.C, p.lam, p.eta), p.link(), self.fading, self.solver,
                                 self.spec, cache=self.cache(p))

    def chain_row(self, p: NetworkParams) -> dict:
        """Blocking, sojourn and solver diagnostics at one point."""
        try:
            fp = self.solve(p)
        except Exception as exc:  # reported per row, the sweep carries on
            return {"status": f"error: {exc}"}
        return {
            "blocking": blocking_probability(fp.dist),
            "sojourn": mean_sojourn_time(fp.dist, p.lam),
            "p_busy": fp.p_busy,
            "epsilon": fp.epsilon,
            "iterations": fp.iterations,
            "status": "ok" if fp.converged else "not-converged",
        }

    def efficiency_row(self, p: NetworkParams, delta: int | None = None) -> dict:
        try:
            fp = self.solve(p)
            rep = efficiency_report(fp, self.table(p), p.lambda_B, p.economics(), delta,
                                    self.solver.interferer_pool)
        except Exception as exc:
            return {"status": f"error: {exc}"}
        return {
            "sse": rep.sse,
            "ee": rep.ee,
            "throughput": rep.throughput,
            "link_capacity": rep.link_capacity,
            "mean_occupancy": rep.mean_occupancy,
            "blocking": rep.blocking,
            "p_busy": rep.p_busy,
            "epsilon": rep.epsilon,
            "status": "ok" if fp.converged else "not-converged",
        }


def _map(fn, items, workers):
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(workers) as pool:
        return list(pool.map(fn, items))


def _point_columns(p: NetworkParams) -> dict:
    return {
        "gamma0_db": round(linear_to_db(p.gamma0), 12),
        "b": p.b,
        "lambda_B": p.lambda_B,
        "C": p.C,
        "lam": p.lam,
    }


CHAIN_COLUMNS = ["gamma0_db", "b", "lambda_B", "C", "lam", "blocking", "sojourn", "p_busy",
                 "epsilon", "iterations", "status"]
EFF_COLUMNS = ["model", "gamma0_db", "b", "lambda_B", "C", "lam", "delta", "sse", "ee",
               "throughput", "link_capacity", "mean_occupancy", "blocking", "p_busy",
               "epsilon", "status"]


def blocking_rows(points, evaluator: Evaluator | None = None, workers: int = 1) -> SweepResult:
    ev = evaluator or Evaluator()
    rows = _map(lambda p: {**_point_columns(p), **ev.chain_row(p)}, points, workers)
    return SweepResult(CHAIN_COLUMNS, rows, {"model": ev.model})


sojourn_rows = blocking_rows


def efficiency_rows(points, evaluator: Evaluator | None = None, delta: int | None = None,
                    workers: int = 1) -> SweepResult:
    """SSE and EE at every point. ``delta=None`` selects the binomially
    weighted capacity."""
    ev = evaluator or Evaluator()
    tag = "weighted" if delta is None else str(delta)

    def one(p):
        return {"model": ev.model, **_point_columns(p), "delta": tag, **ev.efficiency_row(p, delta)}

    # Tables are shared between points; build them before fanning out.
    for p in points:
        ev.table(p)
    rows = _map(one, points, workers)
    return SweepResult(EFF_COLUMNS, rows, {"model": ev.model, "delta": tag})


GAMMA_GRID_DB = list(np.linspace(-10.0, 30.0, 11))
B_GRID = list(np.round(np.linspace(3.0, 6.0, 10), 12))
LAMBDA_GRID = list(np.round(np.linspace(0.2, 5.0, 25), 12))


def _grid(base, **axes):
    """Cartesian product of axes (outer to inner, in keyword order)."""
    points = [base]
    for name, values in axes.items():
        points = [p.replace(**{name: v}) for p in points for v in values]
    return points


def _gammas(values_db):
    return [db_to_linear(g) for g in values_db]


def fig3(base=DEFAULTS, **kw):
    """Blocking probability versus threshold for several channel counts."""
    pts = _grid(base, C=[10, 15, 20], gamma0=_gammas(GAMMA_GRID_DB))
    return blocking_rows(pts, kw.get("evaluator"), workers=kw.get("workers", 1))


def fig4(base=DEFAULTS, **kw):
    """Blocking probability versus threshold for several path-loss exponents."""
    pts = _grid(base, b=[3.5, 4.0, 4.5], gamma0=_gammas(GAMMA_GRID_DB))
    return blocking_rows(pts, kw.get("evaluator"), workers=kw.get("workers", 1))


def fig5(base=DEFAULTS, **kw):
    """Mean sojourn time versus threshold for several arrival rates."""
    pts = _grid(base, lam=[1.0, 2.0, 4.0], gamma0=_gammas(GAMMA_GRID_DB))
    return sojourn_rows(pts, kw.get("evaluator"), workers=kw.get("workers", 1))


def _eff(points, kw):
    models = kw.get("models", ("pvt",))
    parts = []
    for m in models:
        ev = kw.get("evaluator") if kw.get("evaluator") and kw["evaluator"].model == m else None
        ev = ev or Evaluator(m, mc=kw.get("mc", MCConfig(trials=20_000)))
        parts.append(efficiency_rows(points, ev, kw.get("delta"), kw.get("workers", 1)))
    rows = [r for part in parts for r in part.rows]
    return SweepResult(EFF_COLUMNS, rows, {"models": ",".join(models), **parts[0].meta})


def fig6(base=DEFAULTS, **kw):
    """SSE versus path-loss exponent for two BS densities."""
    return _eff(_grid(base, lambda_B=[0.2, 0.5], b=B_GRID), kw)


def fig7(base=DEFAULTS, **kw):
    """SSE versus path-loss exponent for arrival rates past the SSE peak."""
    return _eff(_grid(base, lam=[2.5, 3.5, 5.0], b=B_GRID), kw)


def fig8(base=DEFAULTS, **kw):
    """SSE versus arrival rate for three thresholds."""
    return _eff(_grid(base, gamma0=_gammas([5.0, 10.0, 15.0]), lam=LAMBDA_GRID), kw)


def fig9(base=DEFAULTS, **kw):
    """EE versus arrival rate for three thresholds."""
    return fig8(base, **kw)


def fig10(base=DEFAULTS, **kw):
    """EE versus path-loss exponent for two BS densities."""
    return _eff(_grid(base, lambda_B=[0.2, 0.5], b=B_GRID), kw)


FIGURES = {3: fig3, 4: fig4, 5: fig5, 6: fig6, 7: fig7, 8: fig8, 9: fig9, 10: fig10}


def run_figure(number: int, base: NetworkParams = DEFAULTS, **kw) -> SweepResult:
    if number not in FIGURES:
        raise ValueError(f"no recipe for figure {number}; choose from {sorted(FIGURES)}")
    res = FIGURES[number](base, **kw)
    res.meta["figure"] = number
    return res
