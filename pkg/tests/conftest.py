import os
import random
import sys
from pathlib import Path

import orjson
import pytest

# repo root = folder that contains "src/" and "tests/"
REPO_ROOT = Path(__file__).resolve().parents[1]

# Allow: import src.core...
if str(REPO_ROOT) not in sys.path:
    sys.path.insert(0, str(REPO_ROOT))

FIXTURES_DIR = REPO_ROOT / "tests" / "fixtures"
SCENARIOS_DIR = REPO_ROOT / "scenarios"

# Acceptance runs use 1000 cases; lower it locally with CWETH_PROPERTY_CASES=50
PROPERTY_CASES = int(os.getenv("CWETH_PROPERTY_CASES", "1000"))


@pytest.fixture(scope="session")
def load_fixture():
    def _load(name: str):
        return orjson.loads((FIXTURES_DIR / name).read_bytes())

    return _load


@pytest.fixture(scope="session")
def property_cases() -> int:
    return PROPERTY_CASES


@pytest.fixture
def rng() -> random.Random:
    return random.Random(0xC0FFEE)


@pytest.fixture(scope="session")
def cweth_address():
    from src.tools.kdf import EthAddress

    return EthAddress.from_hex("0x000000000000000000000000000000000000cafe")


@pytest.fixture(scope="session")
def keypairs():
    """Five fixed key pairs with small distinct private keys, enough for multi-party tests."""
    from src.tools.fields import Fl
    from src.tools.kdf import keypair_from_private_key

    return [keypair_from_private_key(Fl(11 * (i + 1) + 1000003 * i)) for i in range(5)]


@pytest.fixture(scope="session")
def scenarios_dir() -> Path:
    return SCENARIOS_DIR
