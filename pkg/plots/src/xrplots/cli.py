"""CLI for rendering figures from sweep results."""

from __future__ import annotations

import argparse
import sys

from .figures import FIGURE_KINDS, FigureError, FigureSpec, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xrplots", description="Render figures from sweep results CSVs")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("render", help="render one figure")
    p.add_argument("--spec", help="JSON FigureSpec file")
    p.add_argument("--kind", choices=list(FIGURE_KINDS))
    p.add_argument("--input", help="results.csv path")
    p.add_argument("--output", help="image path (.png or .svg)")
    p.add_argument("--group-by", default="policy")
    p.add_argument("--policy", default="partial")
    p.add_argument("--flr-limit", type=float, default=0.1)
    p.add_argument("--title", default="")
    p.set_defaults(func=cmd_render)
    return parser


def cmd_render(args) -> int:
    if args.spec:
        spec = FigureSpec.from_file(args.spec)
    else:
        if not (args.kind and args.input and args.output):
            print("render needs --spec or all of --kind/--input/--output",
                  file=sys.stderr)
            return 2
        spec = FigureSpec(input_csv=args.input, kind=args.kind,
                          output=args.output, group_by=args.group_by,
                          policy=args.policy, flr_limit=args.flr_limit,
                          title=args.title)
    try:
        render(spec)
    except FigureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {spec.output}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
