import random
from itertools import product

import pytest
from hypothesis import strategies as st

from fairx.fixtures import random_market
from fairx.market import Allocation


@st.composite
def markets(draw, min_n=2, max_n=7, connected=True):
    seed = draw(st.integers(0, 2**32 - 1))
    n = draw(st.integers(min_n, max_n))
    p = draw(st.floats(0.0, 1.0))
    return random_market(random.Random(seed), n, p, connected=connected)


def compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def grid_allocations(market):
    """Every allocation where each node splits its (integer) endowment in whole units."""
    per_node = []
    for i in range(market.n):
        nbrs = market.neighbors[i]
        if not nbrs:
            per_node.append([()])
            continue
        per_node.append([tuple(zip(nbrs, split)) for split in compositions(int(market.endowments[i]), len(nbrs))])
    for choice in product(*per_node):
        flows = {}
        for i, split in enumerate(choice):
            for j, amount in split:
                if amount:
                    flows[(i, j)] = amount
        yield Allocation(market, flows)


@pytest.fixture
def rng():
    return random.Random(20261016)


acceptance_key = pytest.StashKey[list]()


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line for an acceptance criterion."""
    lines = request.config.stash.setdefault(acceptance_key, [])
    state = {}

    def label(text):
        state["label"] = text

    yield label
    rep = getattr(request.node, "rep_call", None)
    ok = rep is not None and rep.passed
    line = f"{'PASS' if ok else 'FAIL'}  {state.get('label', request.node.name)}"
    lines.append(line)
    print("\n" + line)


@pytest.hookimpl(wrapper=True)
def pytest_runtest_makereport(item, call):
    rep = yield
    if rep.when == "call":
        item.rep_call = rep
    return rep


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(acceptance_key, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
