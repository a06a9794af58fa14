import os
import pathlib
import shutil

import pytest

ROOT = pathlib.Path(__file__).resolve().parents[2]


@pytest.fixture(scope="session")
def cli():
    path = os.environ.get("PBNRL_CLI") or shutil.which("pbnrl") or str(ROOT / "build" / "pbnrl")
    if not pathlib.Path(path).exists():
        pytest.skip("pbnrl executable not built")
    return path


@pytest.fixture(scope="session")
def root():
    return ROOT
