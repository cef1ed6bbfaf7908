import shutil
from pathlib import Path

import pytest

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture(scope="session")
def golden():
    return GOLDEN


@pytest.fixture()
def combined_dir(tmp_path):
    """One run directory holding artifacts for all three plots."""
    run = tmp_path / "run"
    run.mkdir()
    for src in (GOLDEN / "haff" / "series.csv",
                GOLDEN / "haff" / "fit.json",
                GOLDEN / "profile" / "profile.csv",
                GOLDEN / "conv" / "l1.csv",
                GOLDEN / "conv" / "convergence.json"):
        shutil.copy(src, run / src.name)
    return run
