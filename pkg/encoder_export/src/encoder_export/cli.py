"""CLI: encoder-export export --corpus <path> --model <id> --out <path> --batch <n>"""

from __future__ import annotations

import argparse
import sys

from .errors import ExportError
from .export import export_corpus


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="encoder-export",
        description="Emit word-aligned attention records for a corpus",
    )
    commands = parser.add_subparsers(dest="command", required=True)
    export = commands.add_parser("export", help="run the encoder over a corpus")
    export.add_argument("--corpus", required=True, help="JSON Lines corpus file")
    export.add_argument("--model", required=True, help="encoder model id or local path")
    export.add_argument("--out", required=True, help="output record file")
    export.add_argument("--batch", type=int, default=8, help="sentences per inference batch")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        written = export_corpus(args.corpus, args.model, args.out, args.batch)
    except ExportError as exc:
        print(f"encoder-export: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"encoder-export: error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {written} records to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
