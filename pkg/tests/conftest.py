from __future__ import annotations

import csv
import os
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

FIXTURES = Path(__file__).parent / "fixtures"

settings.register_profile(
    "default", max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("thorough", max_examples=2000, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def read_table(path: Path) -> list[dict[str, str]]:
    lines = [ln for ln in path.read_text(encoding="utf-8").splitlines() if ln and not ln.startswith("#")]
    return list(csv.DictReader(lines, delimiter="\t"))


@pytest.fixture(scope="session")
def corpus() -> list[dict[str, str]]:
    return read_table(FIXTURES / "reference_corpus.tsv")


@pytest.fixture(scope="session")
def qed_reference() -> list[dict[str, str]]:
    return read_table(FIXTURES / "qed_reference.tsv")


@pytest.fixture(scope="session")
def invalid_smiles() -> list[dict[str, str]]:
    return read_table(FIXTURES / "invalid_smiles.txt")


# --- acceptance summary -------------------------------------------------------------


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(name): a release acceptance criterion")
    config._acceptance = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker and (rep.when == "call" or (rep.when == "setup" and not rep.passed)):
        item.config._acceptance.append((marker.args[0], rep.passed, rep.duration))


def pytest_terminal_summary(terminalreporter, config):
    rows = getattr(config, "_acceptance", [])
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, duration in rows:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  ({duration:.2f} s)")
    passed = sum(ok for _, ok, _ in rows)
    terminalreporter.write_line(f"{passed}/{len(rows)} criteria met")
