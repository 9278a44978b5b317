import pathlib
import sys

import pytest

sys.path.insert(0, str(pathlib.Path(__file__).parent))

from affinejd import golden  # noqa: E402

REPO_ROOT = pathlib.Path(__file__).resolve().parents[1]
MODELS_DIR = REPO_ROOT / "models"


@pytest.fixture(scope="session")
def models_dir():
    return MODELS_DIR


@pytest.fixture(scope="session")
def cir_model():
    return golden.cir()


@pytest.fixture(scope="session")
def ou_model():
    return golden.ou()


@pytest.fixture(scope="session")
def cp_model():
    return golden.compound_poisson()


@pytest.fixture(scope="session")
def wishart_model():
    return golden.wishart_2d()


@pytest.fixture(scope="session")
def lorentz_model():
    return golden.lorentz_drift()


@pytest.fixture(scope="session")
def bad_model():
    return golden.nonadmissible_2d()


@pytest.fixture(scope="session")
def squared_model():
    return golden.squared_scalar()
