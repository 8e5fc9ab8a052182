from fractions import Fraction as F

import pytest
from hypothesis import given, settings

from fairx.fixtures import FIXTURES, three_level, path4, star, triangle, two_node
from fairx.lex import solve_lex_optimal
from fairx.market import Allocation, level_decomposition, ratio_vector, received_vector, validate_market
from fairx.structure import groups, redundant_links, verify_neighbor_levels, verify_level_structure

from .conftest import grid_allocations, markets


def chain_allocation():
    m = path4()
    return m, Allocation(m, {(0, 1): 1, (1, 2): 1, (2, 3): 1, (3, 2): 1})


class TestNeighborLevels:
    def test_star_solution(self):
        m = star()
        assert verify_neighbor_levels(m, solve_lex_optimal(m).allocation).passed

    def test_chain_fails_at_b(self):
        m, a = chain_allocation()
        v = verify_neighbor_levels(m, a)
        assert not v.passed
        assert v.counterexample["node"] == "b"

    def test_single_level(self):
        m = triangle()
        a = Allocation(m, {(0, 1): 1, (1, 2): 1, (2, 0): 1})
        assert verify_neighbor_levels(m, a).passed


class TestReport:
    @pytest.mark.parametrize("name", sorted(FIXTURES))
    def test_fixture_solutions_pass(self, name):
        m = FIXTURES[name]()
        report = verify_level_structure(m, solve_lex_optimal(m).allocation)
        assert report.passed, report.to_dict()

    def test_three_level_levels_pair_up(self):
        m = three_level()
        report = verify_level_structure(m, solve_lex_optimal(m).allocation)
        assert report.K == 3
        assert report.levels[0] * report.levels[2] == 1

    def test_chain_allocation(self):
        m, a = chain_allocation()
        report = verify_level_structure(m, a)
        assert report.K == 3
        assert not report.passed
        bad = report.verdicts["top_is_neighborhood"]
        assert not bad.passed
        assert bad.counterexample["neighborhood"] == ["b"]
        assert bad.counterexample["top_level"] == ["c"]
        assert not report.verdicts["reciprocal_levels"].passed

    def test_single_level_not_one_is_impossible_to_fake(self):
        # any feasible single-level allocation has level exactly 1
        m = triangle()
        a = Allocation(m, {(0, 1): 1, (1, 2): 1, (2, 0): 1})
        assert verify_level_structure(m, a).verdicts["single_level_is_one"].passed

    def test_report_json(self):
        m, a = chain_allocation()
        data = verify_level_structure(m, a).to_dict()
        assert data["pass"] is False
        assert data["properties"]["top_is_neighborhood"]["pass"] is False


@given(markets(max_n=4))
@settings(max_examples=25, deadline=None)
def test_passing_allocations_are_optimal(m):
    small = validate_market(
        [(nid, 1 + int(d) % 2) for nid, d in zip(m.ids, m.endowments)],
        [(m.ids[a], m.ids[b]) for a, b in m.edges],
    )
    target = solve_lex_optimal(small).ratios
    for a in grid_allocations(small):
        report = verify_level_structure(small, a)
        if report.passed and report.K >= 2:
            assert ratio_vector(small, received_vector(small, a)) == target


class TestGroups:
    def test_three_level(self):
        m = three_level()
        out = groups(solve_lex_optimal(m).decomposition)
        assert [({m.ids[i] for i in g}, lv) for g, lv in out] == [
            ({"1", "2", "5", "6"}, (F(1, 2), 2)),
            ({"3", "4"}, (1,)),
        ]

    def test_single_level(self):
        out = groups(solve_lex_optimal(triangle()).decomposition)
        assert out == [(frozenset({0, 1, 2}), (1,))]

    def test_six_level_structure(self):
        levels = [F(1, 4), F(43, 100), F(77, 100), F(100, 77), F(100, 43), F(4)]
        sets = [{12, 13}, {4, 6, 8, 10}, {2}, {1}, {3, 5, 7, 9}, {11}]
        ids = [str(k) for k in range(1, 14)]
        m = validate_market([(x, 1) for x in ids], [(a, b) for a, b in zip(ids, ids[1:])])
        ratios = [None] * 13
        for lv, s in zip(levels, sets):
            for node in s:
                ratios[node - 1] = lv
        out = groups(level_decomposition(m, ratios))
        as_ids = [{int(m.ids[i]) for i in g} for g, _ in out]
        assert as_ids == [{12, 13, 11}, {4, 6, 8, 10, 3, 5, 7, 9}, {2, 1}]
        assert [lv for _, lv in out] == [(F(1, 4), 4), (F(43, 100), F(100, 43)), (F(77, 100), F(100, 77))]


class TestRedundantLinks:
    def test_three_level_edge_2_4(self):
        m = three_level()
        assert redundant_links(m, solve_lex_optimal(m)) == [("2", "4")]

    @pytest.mark.parametrize("factory", [two_node, star])
    def test_none(self, factory):
        m = factory()
        assert redundant_links(m, solve_lex_optimal(m)) == []
