import warnings

import pytest

from anonymizability.model import Dataset, Fingerprint

warnings.filterwarnings("ignore", message=".*TBB.*")


def make_dataset(users: dict, **kw) -> Dataset:
    return Dataset([Fingerprint.from_samples(pid, s) for pid, s in users.items()], **kw)


@pytest.fixture
def three_users():
    return make_dataset({"A": [(0, 0, 0)], "B": [(1000, 0, 0)], "C": [(5000, 0, 0)]})


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
