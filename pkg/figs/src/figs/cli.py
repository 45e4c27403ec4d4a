"""Batch figure rendering for petzchain CSV outputs.

Two subcommands:

  render    one figure: --kind K --in CSV --out IMG [--log-x/--linear-x]
            [--bins N]
  manifest  render every figure listed in a `paper` output directory's
            manifest.json: --dir DIR

Exit codes: 0 success, 2 schema/configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .reader import SchemaError
from .render import KINDS, FigureSpec, render


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="petzchain-figs",
                                 description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("render")
    p.add_argument("--kind", required=True, choices=KINDS)
    p.add_argument("--in", dest="input_path", required=True,
                   help="input CSV from the petzchain CLI")
    p.add_argument("--out", dest="output_path", required=True,
                   help="output image path (.svg recommended)")
    p.add_argument("--log-x", dest="log_x", action="store_true", default=True)
    p.add_argument("--linear-x", dest="log_x", action="store_false")
    p.add_argument("--bins", type=int, default=None,
                   help="merge a pre-binned histogram down to N bins")

    m = sub.add_parser("manifest")
    m.add_argument("--dir", dest="directory", required=True,
                   help="directory produced by `petzchain paper`")
    return ap


def run_manifest(directory: str) -> list[str]:
    root = Path(directory)
    manifest_path = root / "manifest.json"
    if not manifest_path.exists():
        raise SchemaError(f"no manifest.json in {root}")
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    written = []
    for entry in manifest.get("figures", []):
        spec = FigureSpec(
            kind=entry["kind"],
            input_path=str(root / entry["input"]),
            output_path=str(root / entry["output"]),
        )
        render(spec)
        written.append(entry["output"])
    if not written:
        raise SchemaError(f"{manifest_path} lists no figures")
    return written


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "render":
            render(FigureSpec(kind=args.kind, input_path=args.input_path,
                              output_path=args.output_path, log_x=args.log_x,
                              bins=args.bins))
        else:
            for name in run_manifest(args.directory):
                print(name)
    except (SchemaError, ValueError, KeyError, OSError,
            json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
