"""Acceptance criteria, one test each. Run with ``pytest tests/test_acceptance.py``;
a PASS/FAIL line per criterion is printed in the terminal summary."""
import random
import time
from dataclasses import replace
from fractions import Fraction as F
from itertools import combinations

import pytest

from fairx.equilibrium import is_exchange_equilibrium, proportionalize
from fairx.fixtures import FIXTURES, complete, complete6, cycle4, three_level, random_market, star, two_node
from fairx.lex import solve_lex_optimal
from fairx.market import Allocation, in_out, received_vector
from fairx.maxmin import hall_ratio, solve_maxmin
from fairx.oracle import maxmin_programming
from fairx.sim import SimConfig, convergence_report, simulate
from fairx.stability import strong_stability_check
from fairx.structure import verify_level_structure

pytestmark = pytest.mark.acceptance

SEED = 20261016


def ids_of(market, nodes):
    return {market.ids[i] for i in nodes}


def test_three_level_reproduction(criterion):
    criterion("1. six-node three-level example reproduced exactly (< 1 s)")
    start = time.perf_counter()
    m = three_level()
    sol = solve_lex_optimal(m)
    elapsed = time.perf_counter() - start
    assert sol.received == (20, 40, 10, 10, 60, 30)
    assert sol.ratios == (F(1, 2), 2, 1, 1, 2, F(1, 2))
    assert sol.K == 3
    assert [ids_of(m, g) for g in sol.decomposition.groups] == [{"1", "6", "2", "5"}, {"3", "4"}]
    assert elapsed < 1.0


def test_structural_suite(criterion):
    criterion("2. level structure holds on 500 random connected markets (< 60 s)")
    rng = random.Random(SEED + 2)
    start = time.perf_counter()
    for _ in range(500):
        m = random_market(rng, rng.randint(2, 10), rng.random(), connected=True, low=1, high=100)
        sol = solve_lex_optimal(m)
        report = verify_level_structure(m, sol.allocation)
        assert report.passed, (m.to_dict(), report.to_dict())
        dec = sol.decomposition
        for k in range(dec.K // 2):
            assert dec.levels[k] * dec.levels[dec.K - 1 - k] == 1
        for g in dec.groups:
            flow = in_out(m, sol.allocation, g)
            assert flow.in_flow == 0 and flow.out_flow == 0
    assert time.perf_counter() - start < 60


def test_oracle_equivalence(criterion):
    criterion("3. solver ratios equal the max-min programming oracle on 100 markets")
    rng = random.Random(SEED + 3)
    for _ in range(100):
        m = random_market(rng, rng.randint(2, 6), rng.random())
        assert solve_lex_optimal(m).ratios == maxmin_programming(m), m.to_dict()


def test_hall_cross_check(criterion):
    criterion("4. max-min value equals the Hall-ratio minimum on fixtures and 200 random markets of up to 7 nodes")
    rng = random.Random(SEED + 4)
    markets = [f() for f in FIXTURES.values() if f().n <= 7]
    markets += [random_market(rng, rng.randint(2, 7), rng.random()) for _ in range(200)]
    for m in markets:
        active = [i for i in range(m.n) if i not in m.isolated]
        best = min(
            hall_ratio(m, T) for size in range(1, len(active) + 1) for T in combinations(active, size)
        )
        assert solve_maxmin(m).lambda_star == best, m.to_dict()


def test_complete_graph_rule(criterion):
    criterion("5. complete graphs have at most two levels; two exactly when one node outweighs the rest")
    rng = random.Random(SEED + 5)
    for trial in range(200):
        n = rng.randint(2, 8)
        D = [rng.randint(1, 100) for _ in range(n)]
        if trial % 3 == 0:
            # force a dominant node, sometimes only tying the rest
            k = rng.randrange(n)
            D[k] = sum(D) - D[k] + rng.choice([0, rng.randint(1, 50)])
        m = complete(D)
        sol = solve_lex_optimal(m)
        top = max(range(n), key=D.__getitem__)
        dominant = D[top] > sum(D) - D[top]
        assert sol.K <= 2
        assert (sol.K == 2) == dominant, D
        if dominant:
            assert sol.decomposition.level_sets[0] == {top}


def test_lex_optimal_is_strongly_stable(criterion):
    criterion("6. no coalition blocks the lex-optimal receipts on 200 random markets (< 5 min)")
    rng = random.Random(SEED + 6)
    start = time.perf_counter()
    for _ in range(200):
        m = random_market(rng, rng.randint(2, 10), rng.random(), connected=rng.random() < 0.8)
        verdict = strong_stability_check(m, solve_lex_optimal(m).received)
        assert verdict.stable, (m.to_dict(), verdict.to_dict())
        assert verdict.coalitions_checked == 2**m.n - 1
    assert time.perf_counter() - start < 300


def test_equilibrium_round_trip(criterion):
    criterion("7. reciprocal rebalancing yields an equilibrium with unchanged receipts; one-way 4-cycle repaired")
    rng = random.Random(SEED + 7)
    markets = [f() for f in FIXTURES.values()]
    markets += [random_market(rng, rng.randint(2, 10), rng.random()) for _ in range(100)]
    for m in markets:
        lex = solve_lex_optimal(m)
        out = proportionalize(m, lex)
        assert is_exchange_equilibrium(m, out).is_equilibrium, m.to_dict()
        assert received_vector(m, out) == lex.received

    m = cycle4()
    one_way = Allocation(m, {(0, 1): 10, (1, 2): 10, (2, 3): 10, (3, 0): 10})
    lex = solve_lex_optimal(m)
    assert received_vector(m, one_way) == lex.received
    assert not is_exchange_equilibrium(m, one_way).is_equilibrium
    repaired = proportionalize(m, replace(lex, allocation=one_way))
    assert is_exchange_equilibrium(m, repaired).is_equilibrium
    assert received_vector(m, repaired) == lex.received


def test_token_dynamics_converge(criterion):
    criterion("8. token dynamics settle within 5% of the levels on four markets; seeds reproduce (< 30 s each)")
    for factory in (two_node, star, three_level, complete6):
        m = factory()
        config = SimConfig(tokens=100_000, seed=SEED)
        start = time.perf_counter()
        trace = simulate(m, config)
        elapsed = time.perf_counter() - start
        report = convergence_report(trace, solve_lex_optimal(m), tolerance=0.05)
        assert report.passed, (factory.__name__, report.to_dict())
        again = simulate(m, config)
        assert again.times == trace.times and again.ratios == trace.ratios, factory.__name__
        assert elapsed < 30, factory.__name__
