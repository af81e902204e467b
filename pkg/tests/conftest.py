from functools import lru_cache

import pytest

from kmnil.gcm import by_label, validate_gcm
from kmnil.liealg import build_borel, build_nilradical

A2 = [[2, -1], [-1, 2]]
B2_SHAPED = [[2, -2], [-1, 2]]
G2_SHAPED = [[2, -3], [-1, 2]]
A11 = [[2, -2], [-2, 2]]
A22 = [[2, -4], [-1, 2]]
HYP2 = [[2, -3], [-3, 2]]
HYP3 = [[2, -2, -2], [-2, 2, -2], [-2, -2, 2]]
NONSYM = [[2, -1, -1], [-1, 2, -1], [-2, -1, 2]]


def _key(G):
    return tuple(tuple(r) for r in validate_gcm(G).entries)


@lru_cache(maxsize=None)
def _nil(key, N, box=None):
    return build_nilradical([list(r) for r in key], N, box)


def nil(G, N, box=None):
    """Shared, memoized builds; algebras are immutable after construction."""
    if isinstance(G, str):
        G = by_label(G)
    return _nil(_key(G), N, box)


@lru_cache(maxsize=None)
def _bor(key, N):
    return build_borel([list(r) for r in key], N)


def borel(G, N):
    return _bor(_key(G), N)


@pytest.fixture
def a2():
    return nil(A2, 3)


# ------------------------------------------------------------------ acceptance lines

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
