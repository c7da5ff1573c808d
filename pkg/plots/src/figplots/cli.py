"""Command line entry point: one figure per invocation."""

from __future__ import annotations

import argparse
import sys

from .figures import KINDS, FigureSpec, render
from .reader import SchemaError


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="plot", description="Render a figure from simulation CSV files."
    )
    p.add_argument("--kind", required=True, choices=KINDS)
    p.add_argument("--in", dest="inputs", required=True, nargs="+",
                   help="input CSV files (tier series, or surface + loop)")
    p.add_argument("--out", required=True, help="output image path (.svg/.pdf/.png)")
    p.add_argument("--xlim", type=float, nargs=2, default=None)
    p.add_argument("--ylim", type=float, nargs=2, default=None)
    p.add_argument("--dpi", type=int, default=150)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = FigureSpec(
            kind=args.kind,
            inputs=args.inputs,
            output=args.out,
            x_range=tuple(args.xlim) if args.xlim else None,
            y_range=tuple(args.ylim) if args.ylim else None,
            dpi=args.dpi,
        )
        path = render(spec)
    except (SchemaError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
