import itertools
import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from mmaware.model import (
    Allocation,
    Instance,
    InstanceError,
    Valuation,
    check_allocation,
    check_valuation_class,
    format_rational,
    from_mask,
    parse_allocation,
    parse_instance,
    serialize_allocation,
    serialize_instance,
    to_mask,
    to_rational,
)

from strategies import additive_instances, random_tables


def subsets(m):
    return [frozenset(c) for r in range(m + 1) for c in itertools.combinations(range(1, m + 1), r)]


def brute_class(v):
    """Class flags straight from the definitions, over all pairs of subsets."""
    m = v.m
    subs = subsets(m)
    val = v.value
    monotone = all(val(s) <= val(t) for s in subs for t in subs if s <= t)
    strict = all(val(s | {e}) > val(s) for s in subs for e in range(1, m + 1) if e not in s)
    submod = all(val(s) + val(t) >= val(s | t) + val(s & t) for s in subs for t in subs)
    subadd = all(val(s | t) <= val(s) + val(t) for s in subs for t in subs)
    additive = all(val(s) == sum((val({e}) for e in s), Fraction(0)) for s in subs)
    binary = additive and all(val({e}) in (0, 1) for e in range(1, m + 1))
    return monotone, strict, submod, subadd, additive, binary


def test_rational_parsing():
    assert to_rational("3/5") == Fraction(3, 5)
    assert to_rational(2) == 2
    assert to_rational("7") == 7
    for bad in (0.5, True, "abc", "1/0", None):
        with pytest.raises(InstanceError):
            to_rational(bad)
    assert format_rational(Fraction(4, 2)) == 2
    assert format_rational(Fraction(1, 3)) == "1/3"


def test_masks_roundtrip():
    assert to_mask([1, 3], 3) == 0b101
    assert from_mask(0b101) == frozenset({1, 3})
    with pytest.raises(InstanceError):
        to_mask([4], 3)


def test_superadditive_pair_is_not_subadditive():
    v = Valuation.from_table({(): 0, (1,): 1, (2,): 1, (1, 2): 3}, 2)
    flags = check_valuation_class(v)
    assert not flags.subadditive and not flags.submodular
    assert flags.monotone and flags.strictly_increasing


def test_additive_flags():
    flags = Valuation.additive([1, 0, 1]).classify()
    assert flags.additive and flags.binary_additive and flags.submodular and flags.subadditive
    assert not flags.strictly_increasing
    assert not Valuation.additive([1, 2]).classify().binary_additive


@given(random_tables())
def test_class_flags_match_definitions(v):
    flags = check_valuation_class(v)
    monotone, strict, submod, subadd, additive, binary = brute_class(v)
    assert flags.monotone == monotone
    assert flags.strictly_increasing == strict
    assert flags.submodular == submod
    assert flags.subadditive == subadd
    assert flags.additive == additive
    assert flags.binary_additive == binary
    if flags.submodular and flags.monotone:
        assert flags.subadditive


def test_instance_validation():
    with pytest.raises(InstanceError, match="worthless"):
        Instance.additive([[1, 0], [2, 0]])
    with pytest.raises(InstanceError):
        Instance(2, 2, [Valuation.additive([1, 1])])
    nonmono = Valuation.from_table({(): 0, (1,): 2, (2,): 1, (1, 2): 1}, 2)
    with pytest.raises(InstanceError, match="monotone"):
        Instance(1, 2, [nonmono])
    with pytest.raises(InstanceError):
        Valuation.additive([-1])


def test_allocation_validation():
    inst = Instance.additive([[1, 1, 1]] * 2)
    with pytest.raises(InstanceError, match="more than one bundle"):
        Allocation.of([[1, 2], [2, 3]])
    with pytest.raises(InstanceError, match="duplicate"):
        Allocation.of([[1, 1], [2, 3]])
    with pytest.raises(InstanceError, match="not allocated"):
        check_allocation(inst, Allocation.of([[1], [2]]))
    with pytest.raises(InstanceError, match="outside"):
        check_allocation(inst, Allocation.of([[1, 2, 3], [4]]))
    check_allocation(inst, Allocation.of([[1, 2, 3], []]))


def test_parse_errors_name_the_field():
    doc = {"n": 2, "m": 2, "valuations": [{"type": "additive", "values": [1, "x"]},
                                           {"type": "additive", "values": [1, 1]}]}
    with pytest.raises(InstanceError) as err:
        parse_instance(json.dumps(doc))
    assert err.value.path == "valuations[0].values[1]"
    with pytest.raises(InstanceError):
        parse_instance("{not json")
    with pytest.raises(InstanceError) as err:
        parse_instance(json.dumps({"n": 1, "m": 1}))
    assert err.value.path == "valuations"
    with pytest.raises(InstanceError):
        parse_allocation('{"bundles": [[1], ["a"]]}')


def test_table_json_uses_comma_keys():
    v = Valuation.from_table({(): 0, (1,): "1/2", (2,): 1, (1, 2): 1}, 2)
    text = serialize_instance(Instance(1, 2, [v]))
    doc = json.loads(text)
    assert doc["valuations"][0]["entries"] == {"": 0, "1": "1/2", "2": 1, "1,2": 1}
    assert parse_instance(text).valuations[0] == v


@given(additive_instances())
def test_instance_roundtrip_is_canonical(inst):
    text = serialize_instance(inst)
    again = parse_instance(text)
    assert again == inst
    assert serialize_instance(again) == text


@given(st.lists(st.integers(0, 2), max_size=8))
def test_allocation_roundtrip(labels):
    alloc = Allocation.of([[j + 1 for j, a in enumerate(labels) if a == i] for i in range(3)])
    assert parse_allocation(serialize_allocation(alloc)) == alloc
