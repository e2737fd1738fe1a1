import json
import os
import random

import pytest

from tests import THETA_PAIRS
from tutte.graphdecomp import Multigraph


@pytest.fixture
def rng():
    return random.Random(20221018)


@pytest.fixture
def theta():
    return Multigraph.from_pairs(5, THETA_PAIRS)


@pytest.fixture
def theta_file(tmp_path, theta):
    path = tmp_path / "theta.json"
    path.write_text(json.dumps(theta.to_json()))
    return str(path)


@pytest.fixture
def clean_db():
    if os.path.exists("tests/tmp.db"):
        os.remove("tests/tmp.db")  # Remove existing db
    yield
    if os.path.exists("tests/tmp.db"):
        os.remove("tests/tmp.db")
