"""plots render --in <dir> --kind <kind> --out <dir>"""
from __future__ import annotations

import argparse
import sys

from .render import KINDS, FigureSpec, SchemaError, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="plots")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render report figures")
    p.add_argument("--in", dest="in_dir", required=True)
    p.add_argument("--kind", choices=KINDS + ("all",), required=True)
    p.add_argument("--out", dest="out_dir", required=True)
    args = parser.parse_args(argv)

    kinds = KINDS if args.kind == "all" else (args.kind,)
    written = []
    for kind in kinds:
        try:
            written.append(render(FigureSpec(kind=kind, in_dir=args.in_dir,
                                             out_dir=args.out_dir)))
        except (SchemaError, OSError, ValueError) as exc:
            print(f"error: {kind}: {exc}", file=sys.stderr)
            return 2
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
