# pytest configuration

import pytest

from mecip import log


@pytest.fixture(autouse=True)
def _reset_console_logging():
    yield
    log._reset_logging_for_tests()
