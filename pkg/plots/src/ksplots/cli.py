"""ksplots render: figures from run artifacts.

Exit codes: 0 success, 1 missing/empty artifacts, 2 missing CSV column
(message names the column).
"""
from __future__ import annotations

import argparse
import sys

from .figures import FIGURE_KINDS, FigureSpec, MissingColumnError, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ksplots",
                                     description="Figures from run artifacts.")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render one figure from artifacts")
    p.add_argument("--input", required=True,
                   help="run directory, or sweep CSV for scaling/phase")
    p.add_argument("--kind", required=True, choices=FIGURE_KINDS)
    p.add_argument("--output", required=True,
                   help="output path stem; .svg and .png are written")
    p.add_argument("--log-x", action="store_true")
    p.add_argument("--log-y", action="store_true")
    p.add_argument("--title")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = FigureSpec(
        input_path=args.input,
        kind=args.kind,
        output_path=args.output,
        log_x=args.log_x,
        log_y=args.log_y,
        title=args.title,
    )
    try:
        written = render(spec)
    except MissingColumnError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
