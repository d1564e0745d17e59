import sys
from pathlib import Path

import pytest

TESTS = Path(__file__).resolve().parent
ROOT = TESTS.parent
sys.path.insert(0, str(TESTS))

BENCH = ROOT / "benchmarks"


@pytest.fixture(scope="session")
def bench_dir() -> Path:
    return BENCH
