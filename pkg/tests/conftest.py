import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(autouse=True, scope="session")
def _isolated_cache(tmp_path_factory):
    # keep the on-disk basis cache out of the user's home directory
    d = tmp_path_factory.mktemp("basis-cache")
    old = os.environ.get("CUSPFIELDS_CACHE_DIR")
    os.environ["CUSPFIELDS_CACHE_DIR"] = str(d)
    yield d
    if old is None:
        os.environ.pop("CUSPFIELDS_CACHE_DIR", None)
    else:
        os.environ["CUSPFIELDS_CACHE_DIR"] = old


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
