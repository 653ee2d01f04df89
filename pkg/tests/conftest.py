import os
import sys
from pathlib import Path

import pytest

BASE_DIR = Path(__file__).resolve().parents[1]
if str(BASE_DIR) not in sys.path:
    sys.path.insert(0, str(BASE_DIR))

os.environ.setdefault("LOG_LEVEL", "WARNING")
os.environ.setdefault("WORKER_CONCURRENCY", "4")
os.environ.setdefault("EPS_SAMPLES", "1/2,1/4,1/8,1/16")
os.environ.setdefault("PROPERTY_SAMPLES", "200")
os.environ.setdefault("RANDOM_SEED", "20240101")

from gencomplex.algebra.liealg import load_model, parse_algebra
from gencomplex.core.cache import cache_manager
from gencomplex.core.config import get_settings

get_settings.cache_clear()

DATA_DIR = BASE_DIR / "data"


@pytest.fixture(autouse=True)
def _fresh_operator_cache():
    yield
    cache_manager.reset()


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture()
def heisenberg():
    return parse_algebra("(0,0,12)")


@pytest.fixture()
def kt():
    return parse_algebra("(0,0,0,12)")


@pytest.fixture()
def torus6():
    return parse_algebra("(0,0,0,0,0,0)")


@pytest.fixture()
def hxh():
    return parse_algebra("(0,0,12,0,0,45)")


@pytest.fixture()
def iwasawa():
    return parse_algebra("(0,0,0,0,13-24,14+23)")


@pytest.fixture()
def su2():
    return load_model(DATA_DIR / "models" / "su2.json")


@pytest.fixture()
def su2_su2():
    return load_model(DATA_DIR / "models" / "su2_su2.json")
