"""kgz-figures: render panels from experiment CSVs.

    kgz-figures <kind> --in <csv...> --out <img>
    kgz-figures make-all [--dir <experiment dir>] [--out-dir <dir>]

make-all walks the sidecar metadata (*.meta.json) of a completed experiment
directory and renders the matching panel for every data file it finds.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .render import FIGURE_KINDS, FigureSpec, SchemaError, render

_EXPERIMENT_PANELS = {
    "accuracy-time": "time-error-panel",
    "accuracy-space": "space-error-panel",
    "energy": "energy-panel",
    "limit-rates": "limit-rate-panel",
    "super-resolution": "time-error-panel",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kgz-figures", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for kind in FIGURE_KINDS:
        p = sub.add_parser(kind, help=f"render a {kind}")
        p.add_argument("--in", dest="inputs", nargs="+", required=True, help="input CSV file(s)")
        p.add_argument("--out", required=True, help="output image path")
        p.add_argument("--title", default=None)
    p = sub.add_parser("make-all", help="render every panel an experiment directory supports")
    p.add_argument("--dir", default=None, help="experiment directory (default KGZ_OUT_DIR or .)")
    p.add_argument("--out-dir", dest="out_dir", default=None, help="image directory (default: same)")
    return parser


def make_all(directory: str, out_dir: str) -> list[str]:
    os.makedirs(out_dir, exist_ok=True)
    rendered = []
    for name in sorted(os.listdir(directory)):
        if not name.endswith(".meta.json"):
            continue
        with open(os.path.join(directory, name)) as fh:
            meta = json.load(fh)
        experiment = meta.get("experiment")
        stem = name[: -len(".meta.json")]
        csv_path = os.path.join(directory, stem + ".csv")
        if experiment in _EXPERIMENT_PANELS and os.path.exists(csv_path):
            out = os.path.join(out_dir, stem + ".png")
            rendered.append(
                render(FigureSpec(kind=_EXPERIMENT_PANELS[experiment], inputs=[csv_path], output=out))
            )
        elif experiment == "solve":
            files = [os.path.join(directory, f) for f in meta.get("files", [])]
            snapshots = [f for f in files if os.path.basename(f).startswith("snapshot_")]
            probes = [f for f in files if os.path.basename(f).startswith("probe")]
            if snapshots:
                out = os.path.join(out_dir, stem + "_profiles.png")
                rendered.append(render(FigureSpec(kind="profile-panel", inputs=snapshots, output=out)))
            if probes:
                out = os.path.join(out_dir, stem + "_probe.png")
                rendered.append(render(FigureSpec(kind="profile-panel", inputs=probes, output=out)))
    return rendered


def cli_main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "make-all":
            directory = args.dir or os.environ.get("KGZ_OUT_DIR", ".")
            out_dir = args.out_dir or directory
            rendered = make_all(directory, out_dir)
            for path in rendered:
                print(path)
            if not rendered:
                print("kgz-figures: nothing to render (no sidecar metadata found)", file=sys.stderr)
            return 0
        spec = FigureSpec(kind=args.command, inputs=args.inputs, output=args.out, title=args.title)
        print(render(spec))
        return 0
    except SchemaError as exc:
        print(f"kgz-figures: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"kgz-figures: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    raise SystemExit(cli_main())


if __name__ == "__main__":
    main()
