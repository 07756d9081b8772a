import json
from pathlib import Path

import pytest

from ecoforge.model import parse_model

REPO = Path(__file__).resolve().parent.parent
MODELS = REPO / "src" / "ecoforge" / "data" / "models"
GOLDEN = Path(__file__).resolve().parent / "golden"


@pytest.fixture(scope="session")
def models_dir() -> Path:
    return MODELS


@pytest.fixture(scope="session")
def golden_dir() -> Path:
    return GOLDEN


@pytest.fixture(scope="session")
def kudzu_bytes() -> bytes:
    return (MODELS / "kudzu.json").read_bytes()


@pytest.fixture(scope="session")
def kudzu_model(kudzu_bytes):
    return parse_model(kudzu_bytes)


@pytest.fixture(scope="session")
def kudzu_scenario() -> dict:
    return json.loads((MODELS / "kudzu_scenario.json").read_text())


def load_model(name: str):
    return parse_model((MODELS / f"{name}.json").read_bytes())


def pytest_runtest_logreport(report):
    """One visible line per acceptance criterion."""
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    outcome = "PASS" if report.passed else ("FAIL" if report.failed else "SKIP")
    print(f"\n[acceptance] {name}: {outcome}", flush=True)
