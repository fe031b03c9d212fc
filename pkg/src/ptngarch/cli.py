"""Command-line entry point tying the toolkit together.

Subcommands: gen-net (network generators), simulate (panel from the DGP),
fit (two-step MLE), test (Wald hypotheses on a saved fit), mc (replication
study).  Exit codes: 0 success, 1 validation/usage error, 2 numerical
failure.  PTNGARCH_SEED and PTNGARCH_THREADS act as environment defaults
for seeds and the mc worker pool.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import dataio
from ._linalg import SingularMatrixError
from .dgp import IntensityExplosionError, simulate
from .estimate import FitOptions, SingularInformationError, fit
from .inference import (GARCH_SPEC, NETWORK_SPEC, THRESHOLD_SPEC, WaldSpec,
                        wald_test)
from .montecarlo import qq_data, run_experiment
from .network import generate, load_edge_list, save_edge_list


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _env_seed(value: int | None) -> int:
    if value is not None:
        return value
    return int(os.environ.get("PTNGARCH_SEED", "0"))


def _build_parser() -> _Parser:
    parser = _Parser(prog="ptngarch",
                     description="Poisson threshold network GARCH toolkit")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("gen-net", help="generate a network and save its edge list")
    p.add_argument("--kind", required=True,
                   choices=["band", "random", "powerlaw", "block"])
    p.add_argument("--n", required=True, type=int, help="number of nodes")
    p.add_argument("--d", type=int, help="band width (kind=band)")
    p.add_argument("--k", type=int, help="number of blocks (kind=block)")
    p.add_argument("--d-max", type=float, default=5.0,
                   help="out-degree cap for random/powerlaw kinds")
    p.add_argument("--a", type=float, default=2.5,
                   help="power-law scaling (kind=powerlaw)")
    p.add_argument("--p-in", type=float, default=0.5,
                   help="within-block edge probability (kind=block)")
    p.add_argument("--p-out-scale", type=float, default=0.001,
                   help="cross-block probability scale (kind=block)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)

    p = sub.add_parser("simulate", help="simulate a counts panel from the model")
    p.add_argument("--net", required=True, help="edge-list file")
    p.add_argument("--params", required=True,
                   help="JSON file with omega, alpha1, alpha2, xi, beta, r")
    p.add_argument("--t", required=True, type=int, help="panel length")
    p.add_argument("--burn", type=int, default=500)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True, help="panel CSV path")

    p = sub.add_parser("fit", help="two-step maximum likelihood fit")
    p.add_argument("--panel", required=True)
    p.add_argument("--net", required=True)
    p.add_argument("--rmin", type=int, default=None)
    p.add_argument("--rmax", type=int, default=None)
    p.add_argument("--delta", type=float, default=1e-6)
    p.add_argument("--out", required=True, help="fit JSON path")

    p = sub.add_parser("test", help="Wald test on a saved fit")
    p.add_argument("--fit", required=True, help="fit JSON from the fit subcommand")
    p.add_argument("--hypothesis", choices=["threshold", "garch", "network"])
    p.add_argument("--gamma",
                   help="restriction rows, e.g. '0,1,-1,0,0' or rows joined by ';'")
    p.add_argument("--eta", help="comma-separated target vector")
    p.add_argument("--out", help="optional JSON output path (also printed)")

    p = sub.add_parser("mc", help="Monte Carlo replication study")
    p.add_argument("--config", required=True, help="experiment config JSON")
    p.add_argument("--out", required=True, help="report JSON path")
    p.add_argument("--qq", help="optional Q-Q CSV path")
    p.add_argument("--threads", type=int, default=None)
    return parser


def _cmd_gen_net(args) -> int:
    kwargs = {}
    if args.kind == "band":
        if args.d is None:
            raise _UsageError("gen-net --kind band requires --d")
        kwargs["d"] = args.d
    elif args.kind == "block":
        if args.k is None:
            raise _UsageError("gen-net --kind block requires --k")
        kwargs.update(k=args.k, p_in=args.p_in, p_out_scale=args.p_out_scale)
    elif args.kind == "random":
        kwargs["d_max"] = args.d_max
    elif args.kind == "powerlaw":
        kwargs.update(a=args.a, d_max=args.d_max)
    net = generate(args.kind, args.n, seed=_env_seed(args.seed), **kwargs)
    save_edge_list(net, args.out)
    return 0


def _cmd_simulate(args) -> int:
    net = load_edge_list(args.net)
    with open(args.params) as fh:
        params = dataio.params_from_dict(json.load(fh))
    panel = simulate(params, net, args.t, burn_in=args.burn,
                     seed=_env_seed(args.seed))
    dataio.save_panel(panel, args.out)
    return 0


def _cmd_fit(args) -> int:
    panel = dataio.load_panel(args.panel)
    net = load_edge_list(args.net)
    if panel.n_nodes != net.n_nodes:
        raise ValueError(
            f"panel has {panel.n_nodes} nodes but network has {net.n_nodes}")
    opts = FitOptions(r_min=args.rmin, r_max=args.rmax, delta=args.delta)
    result = fit(panel, net, opts)
    dataio.write_json(dataio.fit_result_to_dict(result, panel.node_ids), args.out)
    return 0


def _parse_gamma(text: str) -> np.ndarray:
    rows = [row for row in text.split(";") if row.strip()]
    return np.array([[float(v) for v in row.split(",")] for row in rows])


def _cmd_test(args) -> int:
    with open(args.fit) as fh:
        result = dataio.fit_result_from_dict(json.load(fh))
    if args.hypothesis and args.gamma:
        raise _UsageError("give either --hypothesis or --gamma/--eta, not both")
    if args.hypothesis:
        spec = {"threshold": THRESHOLD_SPEC, "garch": GARCH_SPEC,
                "network": NETWORK_SPEC}[args.hypothesis]
    elif args.gamma:
        if args.eta is None:
            raise _UsageError("--gamma requires --eta")
        gamma = _parse_gamma(args.gamma)
        eta = np.array([float(v) for v in args.eta.split(",")])
        spec = WaldSpec(gamma=gamma, eta=eta, label="custom restriction")
    else:
        raise _UsageError("test requires --hypothesis or --gamma/--eta")
    wald = wald_test(result, spec)
    payload = {"statistic": wald.statistic, "df": wald.df,
               "p_value": wald.p_value, "label": wald.label,
               "warnings": list(wald.warnings)}
    text = json.dumps(payload, indent=2, sort_keys=True)
    print(text)
    if args.out:
        dataio.write_json(payload, args.out)
    return 0


def _cmd_mc(args) -> int:
    with open(args.config) as fh:
        raw = json.load(fh)
    if "base_seed" not in raw:
        raw["base_seed"] = _env_seed(None)
    config = dataio.experiment_config_from_dict(raw)
    report = run_experiment(config, n_workers=args.threads)
    dataio.write_json(dataio.report_to_dict(report), args.out)
    if args.qq:
        row = report.rows[-1]
        qq = qq_data(row.estimates, theta0=config.true_params.theta,
                     se_estimates=row.ses if len(row.ses) else None)
        dataio.qq_to_csv(qq, args.qq)
    return 0


_COMMANDS = {
    "gen-net": _cmd_gen_net,
    "simulate": _cmd_simulate,
    "fit": _cmd_fit,
    "test": _cmd_test,
    "mc": _cmd_mc,
}


def run(argv) -> int:
    """Dispatch a command line; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_help(sys.stderr)
            return 1
        return _COMMANDS[args.command](args)
    except _UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    except (ValueError, OSError, json.JSONDecodeError, KeyError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except (SingularInformationError, SingularMatrixError,
            IntensityExplosionError) as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
