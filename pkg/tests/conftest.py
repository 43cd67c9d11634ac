from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

from svrcodec.perceptual import NormParams
from svrcodec.pixio import read_pgm

DATA = Path(__file__).parent / "data"
CORPUS = ("camera", "astronaut", "coffee", "chelsea", "rocket", "brick")

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def params():
    return NormParams.default()


@pytest.fixture(scope="session")
def camera():
    return read_pgm(DATA / "camera.pgm")


@pytest.fixture(scope="session")
def corpus():
    return {name: read_pgm(DATA / f"{name}.pgm") for name in CORPUS}


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
