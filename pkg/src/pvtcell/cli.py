"""Command-line experiment runner.

Every command writes a CSV table (to ``--out`` or stdout). With ``--out``
a JSON run manifest is written next to it; ``pvtcell --replay MANIFEST``
repeats that run.

Exit codes: 0 success, 1 usage error, 2 validation failure.
"""

from __future__ import annotations

import argparse
import datetime as dt
import json
import os
import sys

import numpy as np

from . import __version__
from .coupling import SolverConfig
from .experiments import Evaluator, blocking_rows, efficiency_rows, run_figure
from .interference import FadingModel, outage_detail
from .markov import ChainParams, blocking_probability, stationary_distribution
from .montecarlo import (
    MCConfig,
    mc_chain_blocking,
    mc_outage_disk,
    mc_outage_grid,
    mc_outage_pvt,
)
from .params import DEFAULTS, dbm_to_watt, db_to_linear
from .records import CsvTable, manifest, to_csv
from .validation import SUITES, limit_form_report, run_suite

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _float_list(text: str) -> list[float]:
    items = [t for t in text.replace(",", " ").split() if t]
    if not items:
        raise argparse.ArgumentTypeError("empty sweep list")
    try:
        return [float(t) for t in items]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _int_list(text: str) -> list[int]:
    vals = _float_list(text)
    if any(v != int(v) for v in vals):
        raise argparse.ArgumentTypeError("expected integers")
    return [int(v) for v in vals]


def _network_flags(p, sweep=False):
    """Scalar network parameters; ``sweep`` turns the main ones into lists."""
    kind = _float_list if sweep else float
    p.add_argument("--gamma0-db", type=_float_list, default=[10.0],
                   help="SINR threshold(s) in dB")
    p.add_argument("--path-loss", type=kind, default=[4.0] if sweep else 4.0,
                   help="path-loss exponent b (> 2)")
    p.add_argument("--bs-density", type=kind, default=[0.2] if sweep else 0.2,
                   help="BS density per km^2")
    p.add_argument("--channels", type=_int_list, default=[20], help="channels per cell C")
    p.add_argument("--arrival-rate", type=kind, default=[1.0] if sweep else 1.0,
                   help="call arrival rate per minute")
    p.add_argument("--eta", type=float, default=DEFAULTS.eta, help="channel release rate per minute")
    p.add_argument("--tx-power-dbm", type=float, default=30.0)
    p.add_argument("--noise-dbm", type=float, default=0.0)
    p.add_argument("--gain-db", type=float, default=31.54)
    p.add_argument("--disk-radius", type=float, default=None, help="km; default 50/sqrt(density)")
    p.add_argument("--fading", default="rayleigh", help="none|rayleigh|nakagami:M|lognormal:S|...")


def _output_flags(p):
    p.add_argument("--out", help="output CSV path (default stdout)")
    p.add_argument("--format", choices=["csv"], default="csv")
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)


def _mc_flags(p, trials=100_000):
    p.add_argument("--trials", type=int, default=trials)
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="pvtcell", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("--replay", metavar="MANIFEST", help="repeat the run recorded in a manifest")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)

    for name, help_ in (("blocking", "blocking probability sweep"),
                        ("sojourn", "mean sojourn time sweep")):
        p = sub.add_parser(name, help=help_)
        _network_flags(p, sweep=True)
        p.add_argument("--verbose", action="store_true", help="append solver traces as metadata")
        _output_flags(p)

    for name in ("sse", "ee"):
        p = sub.add_parser(name, help=f"{name.upper()} sweep")
        _network_flags(p, sweep=True)
        p.add_argument("--model", choices=["pvt", "grid-mc"], default="pvt")
        g = p.add_mutually_exclusive_group()
        g.add_argument("--delta", type=int, help="fixed interferer count")
        g.add_argument("--weighted-delta", action="store_true",
                       help="binomially weighted capacity (default)")
        _mc_flags(p, trials=20_000)
        _output_flags(p)

    p = sub.add_parser("outage", help="conditional outage table")
    _network_flags(p)
    p.add_argument("--delta", type=_int_list, default=[0, 1, 2, 5])
    _output_flags(p)

    p = sub.add_parser("mc", help="Monte Carlo estimators")
    _network_flags(p)
    p.add_argument("--estimator", choices=["disk", "pvt", "grid", "chain"], default="disk")
    p.add_argument("--delta", type=int, default=1)
    p.add_argument("--rings", type=int, default=8)
    p.add_argument("--availability-ratio", type=float, default=1.0, help="alpha/beta for chain")
    p.add_argument("--horizon", type=float, default=None, help="chain horizon in minutes")
    _mc_flags(p)
    _output_flags(p)

    p = sub.add_parser("validate", help="oracle comparisons")
    p.add_argument("suite", choices=sorted(SUITES))
    _mc_flags(p, trials=1_000_000)
    _output_flags(p)

    p = sub.add_parser("figure", help="reproduce a result figure sweep")
    p.add_argument("number", type=int, choices=range(3, 11), metavar="{3..10}")
    p.add_argument("--model", choices=["pvt", "grid-mc", "both"], default="pvt")
    p.add_argument("--delta", type=int, default=None)
    _mc_flags(p, trials=20_000)
    _output_flags(p)
    return ap


def _base_params(args):
    k_prime = db_to_linear(args.gain_db) * dbm_to_watt(args.tx_power_dbm)
    return DEFAULTS.replace(K_prime=k_prime, noise_power=dbm_to_watt(args.noise_dbm),
                            eta=args.eta, disk_radius=args.disk_radius)


def _as_list(v):
    return v if isinstance(v, list) else [v]


def _points(args):
    """Sweep points, outermost axis first: density, b, C, arrival rate, threshold."""
    base = _base_params(args)
    pts = []
    for lb in _as_list(args.bs_density):
        for b in _as_list(args.path_loss):
            for C in args.channels:
                for lam in _as_list(args.arrival_rate):
                    for g in args.gamma0_db:
                        pts.append(base.replace(lambda_B=lb, b=b, C=C, lam=lam,
                                                gamma0=db_to_linear(g)))
    return pts


def _check_points(pts):
    for p in pts:
        if p.b <= 2:
            raise UsageError("path-loss exponent must exceed 2 (Gamma(-2/b) pole, divergent "
                             "interference)")
        if p.lam <= 0:
            raise UsageError("arrival rate must be positive (sojourn time divides by it)")
        if p.lambda_B <= 0 or p.C < 1:
            raise UsageError("density and channel count must be positive")


def cmd_chain(args):
    pts = _points(args)
    _check_points(pts)
    ev = Evaluator()
    res = blocking_rows(pts, ev, workers=args.workers)
    meta = {"command": args.command}
    if args.verbose:
        meta["traces"] = [ev.solve(p).trace_csv() for p in pts]
    return CsvTable.from_records(res.columns, res.rows, {**res.meta, **meta}), EXIT_OK


def cmd_efficiency(args):
    pts = _points(args)
    _check_points(pts)
    ev = Evaluator(args.model, FadingModel.parse(args.fading),
                   mc=MCConfig(trials=args.trials, seed=args.seed))
    res = efficiency_rows(pts, ev, args.delta, workers=args.workers)
    meta = {**res.meta, "command": args.command, "seed": args.seed,
            "capacity": "binomially weighted" if args.delta is None else f"delta={args.delta}"}
    return CsvTable.from_records(res.columns, res.rows, meta), EXIT_OK


def cmd_outage(args):
    p = _points(args)[0]
    _check_points([p])
    link = p.link()
    model = FadingModel.parse(args.fading)
    rows = []
    for g in args.gamma0_db:
        r = outage_detail(db_to_linear(g), args.delta, link, model)
        for d, po in zip(r.deltas, r.outage):
            rows.append({"gamma0_db": g, "delta": int(d), "outage": float(po),
                         "quad_error": r.error, "excursion": r.excursion})
    cols = ["gamma0_db", "delta", "outage", "quad_error", "excursion"]
    return CsvTable.from_records(cols, rows, {"command": "outage", "disk_radius": link.radius}), EXIT_OK


def cmd_mc(args):
    p = _points(args)[0]
    _check_points([p])
    link = p.link()
    model = FadingModel.parse(args.fading)
    cfg = MCConfig(trials=args.trials, seed=args.seed, disk_radius=args.disk_radius,
                   workers=max(1, args.workers))
    gammas = np.array([db_to_linear(g) for g in args.gamma0_db])
    rows = []
    if args.estimator == "chain":
        chain = ChainParams(p.C, p.lam, p.eta, args.availability_ratio, 1.0)
        horizon = args.horizon or 2e5 / p.lam
        est = mc_chain_blocking(chain, horizon, cfg)
        exact = blocking_probability(stationary_distribution(chain))
        rows.append({"estimate": est.mean, "std_error": est.std_error, "trials": est.trials,
                     "seed": args.seed, "config": cfg.digest(), "analytic": exact})
    else:
        if args.estimator == "disk":
            ests = mc_outage_disk(gammas, args.delta, link, model, cfg)
        elif args.estimator == "pvt":
            ests = mc_outage_pvt(gammas, link, model, cfg)
        else:
            ests = mc_outage_grid(gammas, link, model, cfg, rings=args.rings)
        for g, e in zip(args.gamma0_db, ests):
            rows.append({"gamma0_db": g, "estimate": e.mean, "std_error": e.std_error,
                         "trials": e.trials, "seed": e.seed, "config": cfg.digest()})
    cols = list(rows[0])
    return CsvTable.from_records(cols, rows, {"command": "mc", "estimator": args.estimator}), EXIT_OK


def cmd_validate(args):
    checks = run_suite(args.suite, trials=args.trials)
    for c in checks:
        print(c.line(), file=sys.stderr)
    if args.suite == "outage":
        for line in limit_form_report():
            print(line, file=sys.stderr)
    rows = [{"check": c.name, "passed": c.passed, "measured": c.measured, "bound": c.bound,
             "note": c.note} for c in checks]
    ok = all(c.passed for c in checks)
    table = CsvTable.from_records(["check", "passed", "measured", "bound", "note"], rows,
                                  {"command": "validate", "suite": args.suite})
    return table, EXIT_OK if ok else EXIT_VALIDATION


def cmd_figure(args):
    models = ("pvt", "grid-mc") if args.model == "both" else (args.model,)
    res = run_figure(args.number, DEFAULTS, models=models, delta=args.delta,
                     mc=MCConfig(trials=args.trials, seed=args.seed), workers=args.workers,
                     evaluator=Evaluator(models[0], solver=SolverConfig(),
                                         mc=MCConfig(trials=args.trials, seed=args.seed)))
    return CsvTable.from_records(res.columns, res.rows, res.meta), EXIT_OK


COMMANDS = {
    "blocking": cmd_chain,
    "sojourn": cmd_chain,
    "sse": cmd_efficiency,
    "ee": cmd_efficiency,
    "outage": cmd_outage,
    "mc": cmd_mc,
    "validate": cmd_validate,
    "figure": cmd_figure,
}


def _now():
    return dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds")


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors, --help and --version
        return int(exc.code or 0)
    if args.replay:
        with open(args.replay) as fh:
            recorded = json.load(fh)["argv"]
        return main(recorded)
    if not args.command:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    started = _now()
    try:
        table, code = COMMANDS[args.command](args)
    except (UsageError, ValueError) as exc:
        print(f"pvtcell: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = to_csv(table)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
        params = {k: v for k, v in vars(args).items() if k not in ("replay",)}
        man = manifest(argv, params, __version__, getattr(args, "seed", None), started, _now(),
                       [args.out])
        with open(args.out + ".manifest.json", "w") as fh:
            json.dump(man, fh, indent=2, sort_keys=True, default=str)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
