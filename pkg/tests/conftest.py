import pathlib

import pytest

DATA = pathlib.Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def sample_record_text() -> str:
    return (DATA / "sample_record.txt").read_text()
