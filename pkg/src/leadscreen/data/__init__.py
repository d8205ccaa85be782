"""Versioned data tables shipped with the package.

Tables are tab-separated with ``#`` comment lines carrying provenance. They are
read once per process and shared read-only.
"""

from __future__ import annotations

import csv
import io
from functools import lru_cache
from importlib import resources
from pathlib import Path


def read_table(name: str | Path) -> list[dict[str, str]]:
    """Rows of a packaged (bare name) or on-disk (path) TSV table, comments skipped."""
    if isinstance(name, Path) or "/" in str(name):
        text = Path(name).read_text(encoding="utf-8")
    else:
        text = resources.files(__name__).joinpath(name).read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines)), delimiter="\t"))


@lru_cache(maxsize=None)
def atomic_weights() -> dict[str, float]:
    return {row["symbol"]: float(row["weight"]) for row in read_table("elements.tsv")}


@lru_cache(maxsize=None)
def atomic_numbers() -> dict[str, int]:
    return {row["symbol"]: int(row["z"]) for row in read_table("elements.tsv")}


@lru_cache(maxsize=None)
def isotope_masses() -> dict[tuple[str, int], float]:
    return {
        (row["symbol"], int(row["mass_number"])): float(row["mass"])
        for row in read_table("isotopes.tsv")
    }


@lru_cache(maxsize=None)
def valences() -> dict[str, tuple[int, ...]]:
    return {
        row["symbol"]: tuple(int(v) for v in row["valences"].split(","))
        for row in read_table("valence.tsv")
    }
