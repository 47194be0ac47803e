"""CLI: actextract --manifest <json> --output <activation csv>."""

from __future__ import annotations

import argparse
import sys

from .extract import ExtractionError, extract, load_manifest


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="actextract",
        description="Export named-layer ConvNet activations to activation CSV",
    )
    parser.add_argument("--manifest", required=True)
    parser.add_argument("--output", required=True)
    args = parser.parse_args(argv)
    try:
        rows = extract(load_manifest(args.manifest), args.output)
    except ExtractionError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    print(f"wrote {rows} rows to {args.output}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
