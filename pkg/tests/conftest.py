import pytest

from skewpower import SeriesRing, build_truncpoly, build_zmod

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def zmod8():
    return build_zmod(2, 3)


@pytest.fixture(scope="session")
def iwasawa():
    """F2[x]/(x^4), tau(x) = x + x^2, delta = tau - id."""
    return build_truncpoly(2, 4, "x + x^2", "tau-minus-id")


@pytest.fixture(scope="session")
def T64(zmod8):
    R, s = zmod8
    return SeriesRing(s, 3)


@pytest.fixture(scope="session")
def T_iw3(iwasawa):
    R, s = iwasawa
    return SeriesRing(s, 3)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
