"""CLI: plot --spec spec.json [--spec other.json ...]"""

from __future__ import annotations

import argparse
import sys

from .aggregate import PlotkitError
from .render import render_spec_file


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="plot", description="render figures from run CSVs")
    parser.add_argument("--spec", action="append", required=True, help="plot spec JSON (repeatable)")
    args = parser.parse_args(argv)
    try:
        for spec_path in args.spec:
            out = render_spec_file(spec_path)
            print(out)
    except (PlotkitError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
