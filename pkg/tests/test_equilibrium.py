import random
from dataclasses import replace
from fractions import Fraction as F

import pytest
from hypothesis import given, settings

from fairx.equilibrium import is_exchange_equilibrium, proportionalize
from fairx.errors import NotLexOptimalInput
from fairx.fixtures import FIXTURES, cycle4, three_level, random_market, star, two_node
from fairx.lex import solve_lex_optimal
from fairx.market import Allocation, ratio_vector, received_vector, validate_market

from .conftest import grid_allocations, markets


def one_way_cycle():
    m = cycle4()
    return m, Allocation(m, {(0, 1): 10, (1, 2): 10, (2, 3): 10, (3, 0): 10})


class TestCheck:
    def test_two_node(self):
        m = two_node()
        assert is_exchange_equilibrium(m, Allocation(m, {(0, 1): 10, (1, 0): 30})).is_equilibrium

    def test_star(self):
        m = star()
        flows = {(k, 0): 1 for k in (1, 2, 3)}
        flows.update({(0, k): F(1, 3) for k in (1, 2, 3)})
        assert is_exchange_equilibrium(m, Allocation(m, flows)).is_equilibrium

    def test_one_way_cycle(self):
        m, a = one_way_cycle()
        report = is_exchange_equilibrium(m, a)
        assert not report.is_equilibrium
        assert {v["condition"] for v in report.violations} == {"reciprocity"}
        # every one of the four links is non-reciprocal, seen from both ends
        assert len(report.violations) == 8

    def test_expensive_partner(self):
        # c pays b although a is cheaper
        m = validate_market({"a": 1, "b": 1, "c": 2}, [("a", "c"), ("b", "c")])
        a = Allocation(m, {(0, 2): 1, (1, 2): 1, (2, 0): F(3, 2), (2, 1): F(1, 2)})
        report = is_exchange_equilibrium(m, a)
        assert not report.is_equilibrium


class TestProportionalize:
    def test_one_way_cycle_is_repaired(self):
        m, a = one_way_cycle()
        lex = replace(solve_lex_optimal(m), allocation=a)
        out = proportionalize(m, lex)
        assert out.flows == {arc: 5 for arc in m.arcs}
        assert is_exchange_equilibrium(m, out).is_equilibrium

    @pytest.mark.parametrize("name", sorted(FIXTURES))
    def test_fixtures(self, name):
        m = FIXTURES[name]()
        lex = solve_lex_optimal(m)
        out = proportionalize(m, lex)
        assert is_exchange_equilibrium(m, out).is_equilibrium
        assert received_vector(m, out) == lex.received

    def test_three_level_unchanged(self):
        m = three_level()
        lex = solve_lex_optimal(m)
        assert proportionalize(m, lex).flows == lex.allocation.flows

    def test_rejects_non_optimal(self):
        m = cycle4()
        lex = solve_lex_optimal(m)
        skewed = Allocation(m, {(0, 1): 10, (1, 0): 10, (2, 1): 10, (3, 0): 10})
        with pytest.raises(NotLexOptimalInput):
            proportionalize(m, replace(lex, allocation=skewed))

    @given(markets(max_n=9))
    @settings(max_examples=80, deadline=None)
    def test_random(self, m):
        lex = solve_lex_optimal(m)
        out = proportionalize(m, lex)
        assert is_exchange_equilibrium(m, out).is_equilibrium
        assert received_vector(m, out) == lex.received


def test_every_equilibrium_is_lex_optimal():
    rng = random.Random(11)
    seen = 0
    for _ in range(30):
        m = random_market(rng, rng.randint(2, 4), rng.random(), low=1, high=3)
        target = solve_lex_optimal(m).ratios
        for a in grid_allocations(m):
            if is_exchange_equilibrium(m, a).is_equilibrium:
                seen += 1
                assert ratio_vector(m, received_vector(m, a)) == target
    assert seen > 0
