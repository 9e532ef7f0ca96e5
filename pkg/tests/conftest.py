from pathlib import Path

import numpy as np
import pytest

from emskin import FieldConfig, load_scenario
from emskin.scenario_io import fixture_path

DATA = Path(__file__).parent / "data"

# sinc argument scale used whenever a test checks published-scale numbers
PAPER_SCALE = 0.5


@pytest.fixture(scope="session")
def orthogonal():
    return load_scenario(fixture_path("orthogonal"))


@pytest.fixture(scope="session")
def oblique():
    return load_scenario(fixture_path("oblique"))


@pytest.fixture(scope="session")
def masked():
    return load_scenario(fixture_path("complex_facade"))


@pytest.fixture(scope="session")
def toy():
    return load_scenario(DATA / "toy.yaml")


@pytest.fixture(scope="session")
def paper_cfg():
    return FieldConfig(sinc_arg_scale=PAPER_SCALE)


@pytest.fixture()
def rng():
    return np.random.default_rng(20260815)
