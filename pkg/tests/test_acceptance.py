"""Acceptance criteria, one test each; every test records a PASS/FAIL line."""
import time
from fractions import Fraction as F

import pytest

from mmaware.fairness import Criterion, ValueThreshold, check, verify_witness
from mmaware.harness.catalog import catalog_entry, crossed_instance, four_agent_instance
from mmaware.harness.verify import (
    verify_claim,
    verify_egalitarian_bounds,
    verify_matching_algorithm,
    verify_solvers,
    verify_three_agents,
)
from mmaware.model import Allocation
from mmaware.partition import SearchBudget, exhaustive_allocation_search, mms_value

RESULTS: list[str] = []

IMPLICATION_CLAIMS = [
    "mma_implies_mms_binary", "ef_implies_eef", "eef_implies_prop", "prop_implies_mma", "mms_implies_mma1_submodular",
    "mma1_implies_mms_binary", "mms_implies_mma1_binary", "efx_implies_mmax_binary",
    "ef_implies_efx", "efx_implies_ef1", "mma_implies_mmax", "mmax_implies_mma1",
    "alpha_ef", "alpha_ef1", "alpha_efx", "alpha_prop", "alpha_mms", "alpha_eef",
    "alpha_mma", "alpha_mma1", "alpha_mmax",
]
NON_IMPLICATIONS = ["nonimpl_mms_mma", "nonimpl_mma_mms", "nonimpl_efx_mmax", "nonimpl_mma1_mms"]


def record(num: int, ok: bool, detail: str, elapsed: float):
    line = f"CRITERION {num}: {'PASS' if ok else 'FAIL'} ({elapsed:.1f}s) {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def test_criterion_01_mms_allocation_not_mma():
    start = time.perf_counter()
    inst = crossed_instance(100)
    shares = [mms_value(v, inst.goods, 2)[0] for v in inst.valuations]
    swapped, straight = Allocation.of([[2], [1]]), Allocation.of([[1], [2]])
    mms_ok = check(inst, swapped, "mms").satisfied
    mma_bad = check(inst, swapped, "mma")
    ok = (shares == [1, 1] and mms_ok and mma_bad.violated_agents() == [0, 1]
          and check(inst, straight, "mma").satisfied)
    elapsed = time.perf_counter() - start
    record(1, ok and elapsed < 1, f"MMS values {[str(s) for s in shares]}; swap passes MMS, fails MMA for both", elapsed)


def test_criterion_02_mma_without_mms():
    start = time.perf_counter()
    entry = catalog_entry("identical_mma_not_mms")
    inst, alloc = entry.instance, entry.allocations["S_to_1"]
    v = inst.valuations[0]
    full = mms_value(v, inst.goods, 4)[0]
    rest = mms_value(v, [1, 2, 3, 4], 3)[0]
    verdicts = {nt: check(inst, alloc, nt).agent(0).satisfied for nt in ("mma", "mms", "prop")}
    ok = full == F(1, 2) and rest == F(2, 5) and verdicts == {"mma": True, "mms": False, "prop": False}
    elapsed = time.perf_counter() - start
    record(2, ok and elapsed < 1, f"MMS(M,4)={full}, MMS(M\\S,3)={rest}, agent 1 {verdicts}", elapsed)


def test_criterion_03_egalitarian_bounds():
    start = time.perf_counter()
    entry = catalog_entry("ef1_gap_n3")
    inst, fixture = entry.instance, entry.allocations["ef1"]
    v = inst.valuations[0]
    ef1_ok = check(inst, fixture, "ef1").satisfied
    fixture_min = min(v.value(b) for b in fixture.bundles)
    rep = verify_egalitarian_bounds(3)
    d = rep.details[0]
    ok = (ef1_ok and fixture_min == 1 and rep.ok and d["counts"]["all"] == 4**7
          and d["min_value_over_mma1"] >= 2 and d["min_value_over_mmax"] >= 3)
    elapsed = time.perf_counter() - start
    record(3, ok and elapsed < 60,
           f"EF1 fixture min {fixture_min}; min over MMA1 {d['min_value_over_mma1']}, "
           f"over MMAX {d['min_value_over_mmax']} ({d['counts']['all']} allocations)", elapsed)


def test_criterion_04_efx_not_mmax():
    start = time.perf_counter()
    entry = catalog_entry("identical_efx_not_mmax")
    inst, alloc = entry.instance, entry.allocations["efx"]
    v = inst.valuations[0]
    efx = check(inst, alloc, "efx").agent(0).satisfied
    report = check(inst, alloc, "mmax")
    wit = report.agent(0).witness
    part_values = sorted(v.value(p) for p in wit["partition"])
    ok = (efx and not report.agent(0).satisfied and wit["good"] == 7
          and part_values == [F(6, 5), F(6, 5)] and verify_witness(inst, alloc, report))
    elapsed = time.perf_counter() - start
    record(4, ok and elapsed < 10, f"EFX for agent 1 {efx}; MMAX witness e={wit['good']} "
           f"partition {wit['partition']} values {[str(x) for x in part_values]}", elapsed)


def test_criterion_05_mma_may_not_exist():
    start = time.perf_counter()
    notes, ok = [], True
    for eid in ("unit_goods_n2_k2", "unit_goods_n3_k2"):
        inst = catalog_entry(eid).instance
        mma, _ = exhaustive_allocation_search(inst, Criterion("mma"))
        for notion in ("mma1", "mmax"):
            found, alloc = exhaustive_allocation_search(inst, Criterion(notion))
            ok &= found and alloc is not None and check(inst, alloc, notion).satisfied
            notes.append(f"{eid} {notion} witness {alloc.as_lists() if alloc else None}")
        ok &= not mma
        notes.append(f"{eid} MMA exists={mma}")
    elapsed = time.perf_counter() - start
    record(5, ok and elapsed < 10, "; ".join(notes), elapsed)


def test_criterion_06_four_agent_instance():
    start = time.perf_counter()
    inst, rows = four_agent_instance()
    shares = [mms_value(v, inst.goods, 4)[0] for v in inst.valuations]
    mmax = check(inst, rows, "mmax")
    fast_ok = shares == [1, 1, 1, 1] and mmax.satisfied
    fast = time.perf_counter() - start
    # exhaustive non-existence of an allocation worth >= 1 to everyone
    budget = SearchBudget()
    found, _ = exhaustive_allocation_search(inst, ValueThreshold(1), budget)
    slow = time.perf_counter() - start - fast
    ok = fast_ok and fast < 300 and not found and slow < 1800
    record(6, ok, f"MMS values {[str(s) for s in shares]}, rows MMAX {mmax.satisfied} ({fast:.1f}s); "
           f"allocation with all values >= 1 exists={found} ({budget.nodes} nodes, {slow:.1f}s)",
           fast + slow)


def test_criterion_07_implication_suites():
    start = time.perf_counter()
    bad, lines = [], []
    for claim in IMPLICATION_CLAIMS:
        rep = verify_claim(claim, seed=0, trials=500)
        lines.append(f"{claim}:{rep.status}/{rep.trials}")
        if not rep.ok or rep.trials < 500:
            bad.append(claim)
    for claim in NON_IMPLICATIONS:
        rep = verify_claim(claim, seed=0, trials=500)
        verified = bool(rep.counterexample and rep.counterexample["verified"])
        lines.append(f"{claim}:{'counterexample' if verified else 'none'}")
        if not (rep.ok and verified):
            bad.append(claim)
    elapsed = time.perf_counter() - start
    record(7, not bad and elapsed < 1800, f"failures {bad}; " + ", ".join(lines), elapsed)


def test_criterion_08_three_agent_algorithm():
    start = time.perf_counter()
    rep = verify_three_agents(trials=500, seed=0, max_m=10)
    elapsed = time.perf_counter() - start
    record(8, rep.ok and rep.trials == 500 and elapsed < 600,
           f"{rep.trials} instances, MMA1 for all: {rep.ok}, cases {rep.details[0]['cases']}", elapsed)


def test_criterion_09_matching_algorithm():
    start = time.perf_counter()
    rep = verify_matching_algorithm(trials=500, seed=0)
    d = rep.details[0]
    elapsed = time.perf_counter() - start
    record(9, rep.ok and rep.trials == 500 and d["slowest_run_seconds"] < 0.01 and elapsed < 1800,
           f"{rep.trials} instances, guarantees hold: {rep.ok}, classes {d['guarantee_classes']}, "
           f"slowest run {d['slowest_run_seconds'] * 1000:.2f} ms", elapsed)


def test_criterion_10_solver_cross_validation():
    start = time.perf_counter()
    rep = verify_solvers(trials=1000, seed=0)
    elapsed = time.perf_counter() - start
    record(10, rep.ok and rep.trials == 1000 and elapsed < 600,
           f"{rep.trials} instances agree with brute force: {rep.ok}", elapsed)
