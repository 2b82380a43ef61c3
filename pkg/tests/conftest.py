from functools import lru_cache

import numpy as np
import pytest

from htype.catalog import FAMILIES, catalog

CATALOG_REFS = [(fam, n) for fam in FAMILIES for n in (1, 2)]


@lru_cache(maxsize=None)
def cached_catalog(name, n):
    return catalog(name, n)


@pytest.fixture(params=CATALOG_REFS, ids=lambda r: f"{r[0]}:{r[1]}")
def cat(request):
    """``(algebra, composition)`` for every catalog family with n in {1, 2}."""
    return cached_catalog(*request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# acceptance criteria record one line each; printed at the end of the run
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
