from __future__ import annotations

import sys
from pathlib import Path

import pytest

TESTS_DIR = Path(__file__).parent
REPO_DIR = TESTS_DIR.parent

sys.path.insert(0, str(TESTS_DIR))

from studyflow.ingest import ingest_cms  # noqa: E402


@pytest.fixture(scope="session")
def tiny_campus_dir() -> Path:
    return TESTS_DIR / "fixtures" / "tiny_campus"


@pytest.fixture(scope="session")
def synth50_dir() -> Path:
    return TESTS_DIR / "fixtures" / "synth50"


@pytest.fixture(scope="session")
def miner30_dir() -> Path:
    return TESTS_DIR / "fixtures" / "miner30"


@pytest.fixture(scope="session")
def sample_data_dir() -> Path:
    return REPO_DIR / "sample_data"


@pytest.fixture(scope="session")
def tiny_db(tiny_campus_dir):
    return ingest_cms(tiny_campus_dir)


@pytest.fixture(scope="session")
def sample_db(sample_data_dir):
    return ingest_cms(sample_data_dir / "data")


@pytest.fixture(scope="session")
def synth50_db(synth50_dir):
    return ingest_cms(synth50_dir)


@pytest.fixture(scope="session")
def miner30_db(miner30_dir):
    return ingest_cms(miner30_dir)
