from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from mmaware.fairness import NOTIONS, Criterion, check, check_mmax, satisfies, verify_witness
from mmaware.model import Allocation, Instance, InstanceError, Valuation
from mmaware.partition import minimax_value_brute, mms_value_brute

from strategies import additive_instances, allocations_for

ALPHAS = [F(1), F(1, 2), F(2, 3), F(0)]


def oracle(inst, bundles, notion, alpha, i):
    """Per-agent verdict straight from the definitions, using unpruned oracles."""
    n = inst.n
    if n == 1:
        return True
    v = inst.valuations[i]
    own = v.value(bundles[i])
    rest = inst.goods - bundles[i]
    others = [b for j, b in enumerate(bundles) if j != i]
    if notion == "ef":
        return all(own >= alpha * v.value(b) for b in others)
    if notion == "ef1":
        return all(not b or any(own >= alpha * v.value(b - {e}) for e in b) for b in others)
    if notion == "efx":
        return all(own >= alpha * v.value(b - {e}) for b in others for e in b)
    if notion == "prop":
        return n * own >= alpha * v.value(inst.goods)
    if notion == "mms":
        return own >= alpha * mms_value_brute(v, inst.goods, n)
    if notion == "eef":
        return own >= alpha * minimax_value_brute(v, rest, n - 1)
    if notion == "mma":
        return own >= alpha * mms_value_brute(v, rest, n - 1)
    if notion == "mma1":
        return not rest or any(own >= alpha * mms_value_brute(v, rest - {e}, n - 1) for e in rest)
    if notion == "mmax":
        return all(own >= alpha * mms_value_brute(v, rest - {e}, n - 1) for e in rest)
    raise AssertionError(notion)


@pytest.mark.parametrize("notion", NOTIONS)
@given(data=st.data())
def test_checker_matches_definitions(notion, data):
    inst = data.draw(additive_instances(max_n=3, max_m=6))
    alloc = Allocation.of(data.draw(allocations_for(inst)))
    alpha = data.draw(st.sampled_from(ALPHAS))
    report = check(inst, alloc, notion, alpha)
    for i in range(inst.n):
        assert report.agent(i).satisfied == oracle(inst, alloc.bundles, notion, alpha, i)
    assert verify_witness(inst, alloc, report)
    assert satisfies(inst, alloc, Criterion(notion, alpha)) == report.satisfied


def test_table_valuations_match_definitions():
    covers = {1: {1, 2}, 2: {2, 3}, 3: {3}, 4: {4, 1}, 5: {5}}
    v = Valuation.from_function(lambda s: len(set().union(*(covers[j] for j in s))) if s else 0, 5)
    inst = Instance(3, 5, [v, v, v])
    for bundles in ([[1], [2, 3], [4, 5]], [[1, 2, 3], [4], [5]], [[], [1, 2], [3, 4, 5]]):
        alloc = Allocation.of(bundles)
        for notion in NOTIONS:
            report = check(inst, alloc, notion, 1)
            for i in range(3):
                assert report.agent(i).satisfied == oracle(inst, alloc.bundles, notion, F(1), i), notion
            assert verify_witness(inst, alloc, report)


IMPLICATIONS = [("ef", "efx"), ("efx", "ef1"), ("mma", "mmax"), ("mmax", "mma1"),
                ("ef", "eef"), ("eef", "prop"), ("prop", "mma")]


@given(data=st.data())
def test_notion_lattice_per_agent(data):
    inst = data.draw(additive_instances(max_n=3, max_m=6))
    alloc = Allocation.of(data.draw(allocations_for(inst)))
    reports = {nt: check(inst, alloc, nt, 1) for nt in NOTIONS}
    for i in range(inst.n):
        for strong, weak in IMPLICATIONS:
            if reports[strong].agent(i).satisfied:
                assert reports[weak].agent(i).satisfied, (strong, weak)


@pytest.mark.parametrize("notion", NOTIONS)
@given(data=st.data())
def test_smaller_alpha_is_weaker(notion, data):
    inst = data.draw(additive_instances(max_n=3, max_m=5))
    alloc = Allocation.of(data.draw(allocations_for(inst)))
    hi, lo = check(inst, alloc, notion, 1), check(inst, alloc, notion, F(1, 2))
    zero = check(inst, alloc, notion, 0)
    assert zero.satisfied
    for i in range(inst.n):
        assert not hi.agent(i).satisfied or lo.agent(i).satisfied


@pytest.mark.parametrize("h", [2, 100, 10**6])
def test_mms_allocation_far_from_mma(h):
    inst = Instance.additive([[h, 1], [1, h]])
    swapped, straight = Allocation.of([[2], [1]]), Allocation.of([[1], [2]])
    assert check(inst, swapped, "mms").satisfied
    report = check(inst, swapped, "mma")
    assert report.violated_agents() == [0, 1]
    assert report.agent(0).witness["mms"] == h
    assert verify_witness(inst, swapped, report)
    assert check(inst, straight, "mma").satisfied


def test_mmax_witness_on_identical_agents():
    v = Valuation.additive([1, 1, F(3, 5), F(2, 5), F(1, 5), F(1, 5), F(1, 5)])
    inst = Instance(3, 7, [v] * 3)
    alloc = Allocation.of([[1], [2, 4], [3, 5, 6, 7]])
    assert check(inst, alloc, "efx").agent(0).satisfied
    report = check_mmax(inst, alloc)
    wit = report.agent(0).witness
    assert wit["good"] == 7 and wit["mms"] == "6/5"
    assert sorted(v.value(p) for p in wit["partition"]) == [F(6, 5), F(6, 5)]
    assert verify_witness(inst, alloc, report)


def test_single_agent_is_always_satisfied():
    inst = Instance.additive([[1, 2]])
    for notion in NOTIONS:
        assert check(inst, Allocation.of([[1, 2]]), notion).satisfied


def test_empty_complement_satisfies_up_to_one_good():
    inst = Instance.additive([[1, 1], [1, 1]])
    alloc = Allocation.of([[1, 2], []])
    assert check(inst, alloc, "mma1").agent(0).satisfied
    assert check(inst, alloc, "mmax").agent(0).satisfied
    assert not check(inst, alloc, "mma1").agent(1).satisfied


def test_bad_arguments():
    inst = Instance.additive([[1, 1], [1, 1]])
    alloc = Allocation.of([[1], [2]])
    with pytest.raises(InstanceError):
        check(inst, alloc, "nope")
    with pytest.raises(InstanceError):
        check(inst, alloc, "ef", "3/2")
    with pytest.raises(InstanceError):
        check(inst, Allocation.of([[1]]), "ef")


def test_tampered_witness_is_rejected():
    inst = Instance.additive([[5, 1], [1, 5]])
    alloc = Allocation.of([[2], [1]])
    report = check(inst, alloc, "mma")
    report.agent(0).witness["partition"] = [[1, 2]]
    assert not verify_witness(inst, alloc, report)
