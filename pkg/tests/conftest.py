import json
from pathlib import Path

import pytest

from neron.corpus import builtin_raw
from neron.gmod import GModule, close_group, induced_module
from neron.intlat import intmat
from neron.schema import parse_document

ORACLE = json.loads((Path(__file__).parent / "data" / "oracle.json").read_text())


@pytest.fixture(scope="session")
def oracle():
    return ORACLE


@pytest.fixture(scope="session")
def raw_docs():
    return {d["name"]: d for d in builtin_raw()}


@pytest.fixture(scope="session")
def docs(raw_docs):
    return {name: parse_document(d) for name, d in raw_docs.items()}


@pytest.fixture(scope="session")
def tori(docs):
    return {name: d.torus() for name, d in docs.items() if d.kind != "ses"}


@pytest.fixture(scope="session")
def c2():
    return close_group([[[-1]]], names=["s"])


@pytest.fixture(scope="session")
def c2_modules(c2):
    one = intmat([[1]])
    return {
        "trivial": GModule.trivial(c2),
        "sign": GModule(c2, [one, intmat([[-1]])]),
        "regular": induced_module(1, c2),
    }


def cyclic_module(matrix, order):
    """The cyclic group of the given order acting on Z^n through ``matrix``."""
    n = len(matrix)
    perm = [[1 if i == (j + 1) % order else 0 for j in range(order)] for i in range(order)]
    big = [[0] * (order + n) for _ in range(order + n)]
    for i in range(order):
        big[i][:order] = perm[i]
    for i in range(n):
        big[order + i][order:] = matrix[i]
    G = close_group([big])
    return GModule(G, [G.matrices[g][order:, order:] for g in range(G.order)])


# -- acceptance summary ------------------------------------------------------------

_ACCEPTANCE = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    n = marker.args[0]
    failed = rep.failed or (rep.when == "call" and rep.skipped)
    prev = _ACCEPTANCE.get(n, (marker.args[1], True))
    _ACCEPTANCE[n] = (prev[0], prev[1] and not failed)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion n")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        title, ok = _ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {title}")
