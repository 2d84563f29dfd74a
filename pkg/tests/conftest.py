import pytest
from hypothesis import settings

from diophok.catalogue import get_extension, get_field
from diophok.nf import trivial_extension

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def gauss():
    return get_field("gauss")


@pytest.fixture(scope="session")
def Q():
    return get_field("Q")


@pytest.fixture(scope="session")
def field():
    return get_field


@pytest.fixture(scope="session")
def ext():
    def make(base, top=None):
        if top is None:
            return trivial_extension(get_field(base))
        return get_extension(base, top)
    return make


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import SUMMARY
    if SUMMARY:
        terminalreporter.section("acceptance criteria")
        for line in SUMMARY:
            terminalreporter.write_line(line)
