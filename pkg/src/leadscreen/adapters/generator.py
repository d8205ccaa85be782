"""Stub generator: writes the SMILES of a prepared seed file as its output."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="leadscreen-stub-generator")
    ap.add_argument("--seeds", required=True, type=Path, help="file with one SMILES per line")
    ap.add_argument("request", type=Path, help="generator request JSON (target metadata)")
    ap.add_argument("output", type=Path)
    args = ap.parse_args(argv)
    try:
        json.loads(args.request.read_text(encoding="utf-8"))
        lines = args.seeds.read_text(encoding="utf-8").splitlines()
    except (OSError, ValueError) as exc:
        print(f"generator: {exc}", file=sys.stderr)
        return 1
    smiles = [ln.split()[0] for ln in (x.strip() for x in lines) if ln and not ln.startswith("#")]
    args.output.write_text("".join(s + "\n" for s in smiles), encoding="utf-8")
    return 0


if __name__ == "__main__":
    sys.exit(main())
