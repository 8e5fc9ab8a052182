import random

import pytest

from fairx.errors import InstanceTooLarge
from fairx.fixtures import three_level, path4, random_market, two_node
from fairx.lex import solve_lex_optimal
from fairx.market import received_vector
from fairx.stability import coalition_improvement, strong_stability_check, weak_stability_check

CHAIN = (0, 1, 2, 1)


def test_chain_baseline_blocked_by_first_pair():
    v = strong_stability_check(path4(), CHAIN)
    assert not v.stable
    assert v.blocking.members == ("a", "b")
    assert v.blocking.received == {"a": 1, "b": 1}


def test_chain_baseline_weak():
    # a strict gain for every member of any coalition is impossible here
    v = weak_stability_check(path4(), CHAIN)
    assert v.stable


def test_two_node():
    assert strong_stability_check(two_node(), (30, 10)).stable


def test_three_level_in_core():
    m = three_level()
    r = solve_lex_optimal(m).received
    assert strong_stability_check(m, r).stable
    assert weak_stability_check(m, r).stable


def test_blocking_allocation_revalidates():
    m = path4()
    imp = coalition_improvement(m, [0, 1], CHAIN)
    sub_received = received_vector(m.induced([0, 1]), imp.allocation)
    assert all(x >= CHAIN[i] for x, i in zip(sub_received, (0, 1)))
    assert any(x > CHAIN[i] for x, i in zip(sub_received, (0, 1)))


def test_isolated_member_with_positive_baseline_never_blocks():
    assert coalition_improvement(path4(), [0, 2], (1, 1, 1, 1)) is None


def test_cap():
    m = random_market(random.Random(1), 6)
    with pytest.raises(InstanceTooLarge):
        strong_stability_check(m, solve_lex_optimal(m).received, cap=5)


def test_workers_report_same_blocker():
    seq = strong_stability_check(path4(), CHAIN)
    par = strong_stability_check(path4(), CHAIN, workers=4)
    assert par.blocking.members == seq.blocking.members
    assert par.coalitions_checked == seq.coalitions_checked


def test_lex_optimal_is_strongly_stable(rng):
    for _ in range(25):
        m = random_market(rng, rng.randint(2, 8), rng.random())
        r = solve_lex_optimal(m).received
        assert strong_stability_check(m, r).stable


def test_strong_implies_weak(rng):
    for _ in range(25):
        m = random_market(rng, rng.randint(2, 6), rng.random(), low=1, high=4)
        baseline = [rng.randint(0, 4) for _ in range(m.n)]
        if strong_stability_check(m, baseline).stable:
            assert weak_stability_check(m, baseline).stable
