from __future__ import annotations

import pytest

from coherator.soa import build_tower
from coherator.theory import FragmentBounds

# depth 2 at length 5 reaches the associativity and unitor pairs
CATALOG_BOUNDS = FragmentBounds(5, 2, 2, 2)


@pytest.fixture(scope="session")
def ic_tower():
    return build_tower("ic", 2, CATALOG_BOUNDS)


@pytest.fixture(scope="session")
def strict_tower():
    return build_tower("strict", 2, CATALOG_BOUNDS)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    lines = [RESULTS[k] for k in sorted(RESULTS)]
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
