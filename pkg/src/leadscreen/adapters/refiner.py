"""Stub refiner: answers refinement requests from a prepared proposal table.

The table has columns ``parent_smiles``, ``proposed_smiles`` and ``rationale``;
a request whose SMILES is listed gets that proposal, others get none.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path


def _rows(path: Path) -> list[dict[str, str]]:
    lines = [ln for ln in path.read_text(encoding="utf-8").splitlines() if ln.strip() and not ln.startswith("#")]
    return list(csv.DictReader(lines, delimiter="\t"))


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="leadscreen-stub-refiner")
    ap.add_argument("--table", required=True, type=Path)
    ap.add_argument("requests", type=Path)
    ap.add_argument("output", type=Path)
    args = ap.parse_args(argv)
    try:
        table = {r["parent_smiles"]: r for r in _rows(args.table)}
        requests = _rows(args.requests)
    except (OSError, KeyError) as exc:
        print(f"refiner: {exc}", file=sys.stderr)
        return 1
    with args.output.open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(["parent_id", "smiles", "rationale"])
        for req in requests:
            hit = table.get(req["smiles"])
            if hit:
                w.writerow([req["parent_id"], hit["proposed_smiles"], hit["rationale"]])
    return 0


if __name__ == "__main__":
    sys.exit(main())
