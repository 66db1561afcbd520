import pytest

from gpysieve.gpy import GpyContext
from gpysieve.poly import SievePolynomial

REFERENCE_POLY = "1,60,-300,3500"


@pytest.fixture(scope="session")
def ref_poly():
    return SievePolynomial.parse(REFERENCE_POLY)


@pytest.fixture(scope="session")
def ref_ctx(ref_poly):
    return GpyContext(ref_poly, 22)


@pytest.fixture(scope="session")
def acceptance_log(request):
    lines = []
    request.config._acceptance_lines = lines
    return lines


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
