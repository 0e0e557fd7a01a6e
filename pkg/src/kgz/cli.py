"""Command-line front end.

One subcommand per experiment; every flag mirrors a RunConfig field.  A JSON
config file (--config) supplies defaults that explicit flags override, and
--emit-config writes the fully resolved configuration back out before the
run, so `kgz solve --emit-config cfg.json` followed by `kgz solve --config
cfg.json` reproduces the same outputs.  KGZ_OUT_DIR sets the default output
root.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .harness import EXPERIMENTS, RunConfig, run_experiment
from .spectral import GridError

_LIST_FIELDS = {"m0": int, "tau": float, "N": int, "snapshots": float}


def _parse_list(kind):
    def parse(text: str):
        return [kind(tok) for tok in text.split(",") if tok]

    return parse


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--problem", help="ex1|ex2|ex3|sec1 (or full ids)")
    p.add_argument("--m0", type=_parse_list(int), help="comma list; epsilon = 2^-m0")
    p.add_argument("--gamma-rule", dest="gamma_rule", help="2eps | e*eps | explicit:<value>")
    p.add_argument("--tau", type=_parse_list(float), help="comma list of time steps")
    p.add_argument("--N", type=_parse_list(int), help="comma list of mode counts")
    p.add_argument("--T", type=float, help="time horizon")
    p.add_argument("--solver", choices=["mti", "ei"])
    p.add_argument("--ref-tau", dest="ref_tau", type=float, help="reference step (default min(1e-6, eps^2/20))")
    p.add_argument("--out", help="output directory (default KGZ_OUT_DIR or .)")
    p.add_argument("--snapshots", type=_parse_list(float), help="comma list of output times")
    p.add_argument("--probe-x", dest="probe_x", type=float, help="probe location for time series")
    p.add_argument("--dealias", action="store_true", default=None, help="2/3-rule filter on products")
    p.add_argument("--threads", type=int, help="work-pool size for sweep cells")
    p.add_argument("--no-self-check", dest="self_check", action="store_false", default=None,
                   help="skip the tau_ref/2 reference validation run")
    p.add_argument("--config", help="JSON file with RunConfig fields")
    p.add_argument("--emit-config", dest="emit_config", help="write the resolved config to this path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kgz",
        description="Multiscale spectral solvers for the Klein-Gordon-Zakharov system",
    )
    sub = parser.add_subparsers(dest="experiment", required=True)
    descriptions = {
        "accuracy-time": "temporal error sweep against a fine reference",
        "accuracy-space": "spatial error sweep over nested grids at fixed tau",
        "limit-rates": "scaled distances to the Schroedinger limit models",
        "energy": "relative energy drift of the multiscale solver",
        "super-resolution": "large-step comparison of both solvers vs a fine reference",
        "solve": "single run with field snapshots and a probe series",
        "coeffs-dump": "closed-form vs oracle table for every scheme coefficient",
    }
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=descriptions[name])
        _add_common(p)
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    base = RunConfig(experiment=args.experiment)
    values = {"experiment": args.experiment}
    if args.config:
        with open(args.config) as fh:
            loaded = json.load(fh)
        loaded.pop("experiment", None)
        values.update(loaded)
    for key in (
        "problem", "m0", "gamma_rule", "tau", "N", "T", "solver",
        "ref_tau", "out", "snapshots", "probe_x", "dealias", "threads", "self_check",
    ):
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    if "out" not in values or values["out"] is None:
        values["out"] = os.environ.get("KGZ_OUT_DIR", ".")
    known = set(RunConfig.__dataclass_fields__)
    unknown = set(values) - known
    if unknown:
        raise GridError(f"unknown config fields: {sorted(unknown)}")
    cfg = RunConfig(**{**{k: getattr(base, k) for k in known if k != "experiment"}, **values})
    cfg.validate()
    return cfg


def cli_main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
    except (GridError, OSError, json.JSONDecodeError) as exc:
        print(f"kgz: {exc}", file=sys.stderr)
        return 2
    if args.emit_config:
        with open(args.emit_config, "w") as fh:
            json.dump({k: v for k, v in cfg.__dict__.items()}, fh, indent=2, sort_keys=True)
            fh.write("\n")
    try:
        run_experiment(cfg)
    except GridError as exc:
        print(f"kgz: {exc}", file=sys.stderr)
        return 2
    return 0


def main() -> None:
    raise SystemExit(cli_main())


if __name__ == "__main__":
    main()
