from __future__ import annotations

import json
from pathlib import Path

import pytest

from cmforge.api import DataPaths, Workspace, default_data_root, load_workspace

TESTS_DIR = Path(__file__).parent
REPO_ROOT = TESTS_DIR.parent
CORPUS_DIR = TESTS_DIR / "corpus"
GOLDEN_DIR = TESTS_DIR / "golden"
SHARED_VECTORS = REPO_ROOT / "shared" / "count_vectors.json"


@pytest.fixture(scope="session")
def demo_paths() -> DataPaths:
    return DataPaths.under(default_data_root())


@pytest.fixture(scope="session")
def demo_ws(demo_paths: DataPaths) -> Workspace:
    return load_workspace(demo_paths)


@pytest.fixture(scope="session")
def count_vectors() -> list[dict]:
    data = json.loads(SHARED_VECTORS.read_text(encoding="utf-8"))
    return data["vectors"]


# One visible pass/fail line per acceptance criterion at the end of the run.
_ACCEPTANCE: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" in report.nodeid:
        name = report.nodeid.rsplit("::", 1)[-1]
        if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
            _ACCEPTANCE[name] = report.outcome


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    label = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}
    for name in sorted(_ACCEPTANCE):
        terminalreporter.write_line(f"{label.get(_ACCEPTANCE[name], 'FAIL'):4s}  {name}")
