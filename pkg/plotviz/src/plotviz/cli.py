"""Command line wrapper: plotviz <report.csv> --out <dir> [--format png|svg]."""

import argparse
import sys

from .core import SchemaError, plot_profiles


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="plotviz",
        description="render performance-profile and hamming figures from a "
                    "benchmark report CSV")
    parser.add_argument("report", help="harness report CSV")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--format", choices=("png", "svg"), default="png")
    args = parser.parse_args(argv)

    try:
        written = plot_profiles(args.report, args.out, fmt=args.format)
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2
    except (SchemaError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
