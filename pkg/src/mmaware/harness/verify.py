"""Empirical certification of implications, bounds and algorithm guarantees."""
from __future__ import annotations

import itertools
import logging
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

from ..algorithms import (
    GUARANTEE_CHECKS,
    allocate_identical_leximin,
    allocate_matching,
    allocate_three_agents,
    subadditive_half_ef_counterexample,
)
from ..fairness import Criterion, check, verify_witness
from ..model import Allocation, Instance, format_rational, from_mask, instance_to_dict
from ..partition import (
    SearchBudget,
    leximin_partition,
    leximin_partition_brute,
    minimax_partition,
    minimax_value_brute,
    mms_value,
    mms_value_brute,
)
from .catalog import (
    CatalogEntry,
    check_expectation,
    crossed_instance,
    ef1_gap_instance,
    four_agent_instance,
    catalog_entry,
    worked_instances,
)
from .generators import TrialConfig, generate_instance, random_allocation_masks, trial_rng

logger = logging.getLogger(__name__)

ENUMERATION_LIMIT = 10**6


@dataclass
class ClaimReport:
    claim: str
    status: str  # "pass", "counterexample", "fail"
    trials: int = 0
    allocations_checked: int = 0
    premise_hits: int = 0
    counterexample: dict | None = None
    caveats: list = field(default_factory=list)
    details: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.status == "pass"

    def to_dict(self) -> dict:
        return {
            "claim": self.claim,
            "status": self.status,
            "trials": self.trials,
            "allocations_checked": self.allocations_checked,
            "premise_hits": self.premise_hits,
            "counterexample": self.counterexample,
            "caveats": self.caveats,
            "details": self.details,
        }


def _allocation_stream(inst: Instance, rng: random.Random, samples: int):
    n, m = inst.n, inst.m
    if n**m <= ENUMERATION_LIMIT:
        for labels in itertools.product(range(n), repeat=m):
            masks = [0] * n
            for j, a in enumerate(labels):
                masks[a] |= 1 << j
            yield masks
    else:
        for _ in range(samples):
            yield random_allocation_masks(rng, n, m)


def find_counterexample(inst: Instance, premise: Criterion, conclusion: Criterion, explicit=None,
                        rng: random.Random | None = None, samples: int = 20000, budget=None):
    """First (allocation, agent) where ``premise`` holds for the agent but ``conclusion`` does not.

    Implications are tested agent by agent, which is stronger than testing
    whole allocations.  Returns ``(allocation or None, agent or None,
    allocations checked, premise hits)``.
    """
    p = premise.bind(inst, budget)
    c = conclusion.bind(inst, budget)
    checked = hits = 0
    stream = [a.masks() for a in explicit] if explicit is not None else _allocation_stream(
        inst, rng or random.Random(0), samples)
    for masks in stream:
        checked += 1
        for i in range(inst.n):
            if not p.agent_holds(i, masks):
                continue
            hits += 1
            if not c.agent_holds(i, masks):
                return Allocation(tuple(from_mask(x) for x in masks)), i, checked, hits
    return None, None, checked, hits


def _counterexample_payload(inst, alloc, agent, premise, conclusion) -> tuple[dict, bool]:
    pre = check(inst, alloc, premise.notion, premise.alpha)
    con = check(inst, alloc, conclusion.notion, conclusion.alpha)
    verified = (pre.agent(agent).satisfied and not con.agent(agent).satisfied
                and verify_witness(inst, alloc, con))
    return {
        "instance": instance_to_dict(inst),
        "allocation": alloc.as_lists(),
        "agent": agent + 1,
        "premise_report": pre.to_dict(),
        "conclusion_report": con.to_dict(),
        "verified": verified,
    }, verified


def verify_implication(claim: str, premise: Criterion, conclusion: Criterion, configs,
                       seeds=(), budget=None) -> ClaimReport:
    """Search for an agent for whom ``premise`` holds and ``conclusion`` fails.

    ``seeds`` is a list of ``(instance, allocations-or-None)`` tried first;
    then every ``TrialConfig`` contributes ``cfg.trials`` generated instances,
    each searched exhaustively when ``n ** m <= 10**6``.
    """
    report = ClaimReport(claim, "pass")
    jobs = [(inst, allocs, None) for inst, allocs in seeds]
    for cfg in configs:
        jobs.extend((None, None, (cfg, t)) for t in range(cfg.trials))
    for inst, allocs, gen in jobs:
        rng = None
        if gen is not None:
            cfg, t = gen
            inst = generate_instance(cfg, t)
            rng = trial_rng(cfg, t)
            if inst.n ** inst.m > ENUMERATION_LIMIT and not report.caveats:
                report.caveats.append("some instances were sampled, not enumerated")
        report.trials += 1
        alloc, agent, checked, hits = find_counterexample(inst, premise, conclusion, allocs, rng, budget=budget)
        report.allocations_checked += checked
        report.premise_hits += hits
        if alloc is not None:
            payload, verified = _counterexample_payload(inst, alloc, agent, premise, conclusion)
            report.counterexample = payload
            report.status = "counterexample" if verified else "fail"
            return report
    return report


# --------------------------------------------------------------------------
# claim registry

def _cfgs(cls: str, seed: int, trials: int, shapes) -> list[TrialConfig]:
    per = -(-trials // len(shapes))
    return [TrialConfig(cls, n, m, seed=seed, trials=per, distribution=dist) for n, m, dist in shapes]


ADDITIVE_SHAPES = [(2, 8, "rational"), (3, 6, "rational"), (3, 6, "small-int"), (4, 5, "rational"), (2, 10, "small-int")]
BINARY_SHAPES = [(2, 8, "rational"), (3, 7, "rational"), (4, 6, "rational"), (2, 10, "rational")]
TABLE_SHAPES = [(2, 6, "rational"), (3, 5, "small-int"), (3, 5, "rational"), (4, 4, "rational")]


@dataclass(frozen=True)
class Claim:
    id: str
    premise: Criterion
    conclusion: Criterion
    classes: tuple
    expect_hold: bool = True
    description: str = ""


def _claims() -> dict:
    C = Criterion
    half = Fraction(1, 2)
    claims = [
        Claim("mma_implies_mms_binary", C("mma"), C("mms"), ("binary-additive",), description="MMA => MMS for binary additive"),
        Claim("ef_implies_eef", C("ef"), C("eef"), ("additive",), description="EF => EEF for additive"),
        Claim("eef_implies_prop", C("eef"), C("prop"), ("additive",), description="EEF => PROP for additive"),
        Claim("prop_implies_mma", C("prop"), C("mma"), ("additive",), description="PROP => MMA for additive"),
        Claim("mms_implies_mma1_submodular", C("mms"), C("mma1"), ("submodular-table", "additive"), description="MMS => MMA1 for submodular"),
        Claim("mma1_implies_mms_binary", C("mma1"), C("mms"), ("binary-additive",), description="MMA1 => MMS for binary additive"),
        Claim("mms_implies_mma1_binary", C("mms"), C("mma1"), ("binary-additive",), description="MMS => MMA1 for binary additive"),
        Claim("efx_implies_mmax_binary", C("efx"), C("mmax"), ("binary-additive",), description="EFX => MMAX for binary additive"),
        Claim("ef_implies_efx", C("ef"), C("efx"), ("additive", "subadditive-table")),
        Claim("efx_implies_ef1", C("efx"), C("ef1"), ("additive", "subadditive-table")),
        Claim("mma_implies_mmax", C("mma"), C("mmax"), ("additive", "subadditive-table")),
        Claim("mmax_implies_mma1", C("mmax"), C("mma1"), ("additive", "subadditive-table")),
    ]
    for notion in ("ef", "ef1", "efx", "prop", "mms", "eef", "mma", "mma1", "mmax"):
        claims.append(Claim(f"alpha_{notion}", C(notion, 1), C(notion, half), ("additive", "subadditive-table"),
                            description=f"{notion} at 1 => {notion} at 1/2"))
    claims += [
        Claim("nonimpl_mms_mma", C("mms"), C("mma"), ("additive",), expect_hold=False,
              description="some additive MMS allocation fails MMA"),
        Claim("nonimpl_mma_mms", C("mma"), C("mms"), ("additive",), expect_hold=False,
              description="some additive MMA allocation fails MMS"),
        Claim("nonimpl_efx_mmax", C("efx"), C("mmax"), ("additive",), expect_hold=False,
              description="some additive EFX allocation fails MMAX"),
        Claim("nonimpl_mma1_mms", C("mma1"), C("mms"), ("additive",), expect_hold=False,
              description="some additive MMA1 allocation fails MMS"),
        # expected to hold by analogy with the exact case, but it does not
        Claim("half_mms_implies_half_mma1", C("mms", half), C("mma1", half), ("submodular-table", "additive"),
              description="1/2-MMS => 1/2-MMA1 for submodular"),
    ]
    return {c.id: c for c in claims}


CLAIMS = _claims()


def _seed_instances(claim_id: str):
    """Worked examples tried before random trials for the non-implications."""
    if claim_id == "nonimpl_mms_mma":
        return [(crossed_instance(100), None)]
    if claim_id == "nonimpl_mma_mms":
        e = catalog_entry("identical_mma_not_mms")
        return [(e.instance, [Allocation.of([[5, 6, 7, 8], [1], [2], [3, 4]])])]
    if claim_id == "nonimpl_efx_mmax":
        e = catalog_entry("identical_efx_not_mmax")
        return [(e.instance, [e.allocations["efx"]])]
    if claim_id == "nonimpl_mma1_mms":
        inst, rows = four_agent_instance()
        return [(inst, [rows])]
    if claim_id == "half_mms_implies_half_mma1":
        # 8 unit goods: agent 1 holds 2 >= (1/2) * MMS, where MMS = 4, while
        # any 5 of the other 6 goods are worth 5 and (1/2) * 5 > 2
        return [(Instance.additive([[1] * 8] * 2), [Allocation.of([[1, 2], [3, 4, 5, 6, 7, 8]])])]
    return []


def verify_claim(claim_id: str, seed: int = 0, trials: int = 500, use_seeds: bool = True) -> ClaimReport:
    claim = CLAIMS[claim_id]
    configs = []
    per_class = -(-trials // len(claim.classes))
    for cls in claim.classes:
        shapes = {"additive": ADDITIVE_SHAPES, "binary-additive": BINARY_SHAPES}.get(cls, TABLE_SHAPES)
        configs += _cfgs(cls, seed, per_class, shapes)
    seeds = _seed_instances(claim_id) if use_seeds else []
    rep = verify_implication(claim_id, claim.premise, claim.conclusion, configs, seeds)
    rep.details.append({"expect_hold": claim.expect_hold, "description": claim.description})
    if not claim.expect_hold:
        # a non-implication is established by a verified counterexample
        rep.status = "pass" if rep.status == "counterexample" else "fail"
    return rep


# --------------------------------------------------------------------------
# egalitarian bounds

def verify_egalitarian_bounds(n: int) -> ClaimReport:
    """Minimum agent value over all MMA1 / MMAX allocations of the EF1-gap instance."""
    inst = ef1_gap_instance(n)
    if (n + 1) ** (2 * n + 1) > ENUMERATION_LIMIT:
        raise ValueError("instance too large for exhaustive enumeration")
    v = inst.valuations[0]
    mma1 = Criterion("mma1").bind(inst)
    mmax = Criterion("mmax").bind(inst)
    ef1 = Criterion("ef1").bind(inst)
    mins = {"mma1": None, "mmax": None, "ef1": None}
    counts = {"mma1": 0, "mmax": 0, "ef1": 0, "all": 0}
    for masks in _allocation_stream(inst, random.Random(0), 0):
        counts["all"] += 1
        low = min(v.value_mask(x) for x in masks)
        for name, bound in (("mma1", mma1), ("mmax", mmax), ("ef1", ef1)):
            if bound.allocation_ok(masks):
                counts[name] += 1
                if mins[name] is None or low < mins[name]:
                    mins[name] = low
    entry = catalog_entry(f"ef1_gap_n{n}") if n in (2, 3) else None
    fixture_min = None
    if entry is not None:
        fx = entry.allocations["ef1"]
        fixture_min = min(v.value(b) for b in fx.bundles)
    want_mma1, want_mmax = -(-n // 2), n
    ok = mins["mma1"] is not None and mins["mma1"] >= want_mma1 and mins["mmax"] is not None and mins["mmax"] >= want_mmax
    rep = ClaimReport(f"egalitarian_n{n}", "pass" if ok else "fail", trials=1, allocations_checked=counts["all"])
    rep.details.append({
        "n": n,
        "min_value_over_mma1": format_rational(mins["mma1"]) if mins["mma1"] is not None else None,
        "min_value_over_mmax": format_rational(mins["mmax"]) if mins["mmax"] is not None else None,
        "min_value_over_ef1": format_rational(mins["ef1"]) if mins["ef1"] is not None else None,
        "bound_mma1": want_mma1,
        "bound_mmax": want_mmax,
        "ef1_fixture_min_value": format_rational(fixture_min) if fixture_min is not None else None,
        "counts": counts,
    })
    return rep


# --------------------------------------------------------------------------
# algorithm suites

def verify_three_agents(trials: int = 500, seed: int = 0, max_m: int = 10) -> ClaimReport:
    rep = ClaimReport("three_agents", "pass")
    cases: dict = {}
    for t in range(trials):
        m = 3 + t % (max_m - 2)
        dist = "small-int" if t % 3 == 0 else "rational"
        cfg = TrialConfig("additive", 3, m, seed=seed, distribution=dist)
        inst = generate_instance(cfg, t)
        trace: list = []
        alloc = allocate_three_agents(inst, trace=trace)
        cases[trace[-1]["case"]] = cases.get(trace[-1]["case"], 0) + 1
        r = check(inst, alloc, "mma1", 1)
        rep.trials += 1
        if not r.satisfied:
            rep.status = "fail"
            rep.counterexample = {"instance": instance_to_dict(inst), "allocation": alloc.as_lists(),
                                  "report": r.to_dict(), "case": trace[-1]["case"]}
            break
    rep.details.append({"cases": cases})
    return rep


def matching_invariants(inst: Instance, result) -> list[str]:
    """Problems found in an ``allocate_matching`` run; empty when all guarantees hold."""
    alloc, problems = result.allocation, []
    if len(result.rounds) > inst.m:
        problems.append("more rounds than goods")
    for rnd in result.rounds:
        if not rnd.unenvied:
            problems.append("empty unenvied set at round start")
        if not rnd.matching:
            problems.append("round allocated nothing")
    if not check(inst, alloc, "ef1", 1).satisfied:
        problems.append("not EF1")
    if not check(inst, alloc, "efx", Fraction(1, 2)).satisfied:
        problems.append("not 1/2-EFX")
    bundles = alloc.bundles
    for i, v in enumerate(inst.valuations):
        own = v.value(bundles[i])
        for j, b in enumerate(bundles):
            if j == i or len(b) < 2:
                continue
            e = result.last_good[j]
            if own < v.value(b - {e}) or own < v.singleton(e):
                problems.append(f"agent {i + 1} vs agent {j + 1}: last-good inequalities fail")
    if inst.all_additive:
        mma = check(inst, alloc, "mma", Fraction(1, 2))
        mmax = check(inst, alloc, "mmax", 1)
        for i in range(inst.n):
            if not (mma.agent(i).satisfied or mmax.agent(i).satisfied):
                problems.append(f"agent {i + 1}: neither 1/2-MMA nor MMAX")
    if not check(inst, alloc, *GUARANTEE_CHECKS[result.guarantee]).satisfied:
        problems.append(f"guarantee {result.guarantee} not met")
    multi = sum(1 for b in bundles if len(b) > 1)
    want = 0 if multi >= 2 else (1 if multi == 1 else 2)
    labels = ("MMA_half", "MMAX_half", "MMAX_exact") if inst.all_additive else ("EF_half", "EFX_half", "EFX_exact")
    if result.guarantee != labels[want]:
        problems.append("guarantee class does not match bundle sizes")
    return problems


def verify_matching_algorithm(trials: int = 500, seed: int = 0) -> ClaimReport:
    rep = ClaimReport("matching", "pass")
    classes: dict = {}
    shapes = [(2, 6), (3, 8), (4, 10), (3, 12), (4, 12), (2, 12), (4, 7), (4, 5), (3, 4), (3, 3)]
    table_shapes = [(2, 6), (3, 7), (4, 8), (3, 8), (4, 5), (3, 4), (3, 3)]
    slowest = 0.0
    for t in range(trials):
        if t % 3 == 2:
            n, m = table_shapes[t % len(table_shapes)]
            cls = "subadditive-table" if t % 2 else "strictly-increasing-subadditive-table"
            cfg = TrialConfig(cls, n, m, seed=seed)
        else:
            n, m = shapes[t % len(shapes)]
            cfg = TrialConfig("additive", n, m, seed=seed, distribution="small-int" if t % 4 == 0 else "rational")
        inst = generate_instance(cfg, t)
        start = time.perf_counter()
        result = allocate_matching(inst)
        slowest = max(slowest, time.perf_counter() - start)
        classes[result.guarantee] = classes.get(result.guarantee, 0) + 1
        problems = matching_invariants(inst, result)
        rep.trials += 1
        if problems:
            rep.status = "fail"
            rep.counterexample = {"instance": instance_to_dict(inst), "allocation": result.allocation.as_lists(),
                                  "problems": problems, "trace": result.trace_dict()}
            break
    rep.details.append({"guarantee_classes": classes, "slowest_run_seconds": round(slowest, 6)})
    return rep


def verify_subadditive_half_ef() -> ClaimReport:
    """The EF_half class does not ensure 1/2-EF; reports the refuting run."""
    inst = subadditive_half_ef_counterexample()
    result = allocate_matching(inst)
    ef = check(inst, result.allocation, "ef", Fraction(1, 2))
    refuted = result.guarantee == "EF_half" and not ef.satisfied and verify_witness(inst, result.allocation, ef)
    rep = ClaimReport("subadditive_half_ef", "counterexample" if refuted else "pass", trials=1)
    rep.counterexample = {"instance": instance_to_dict(inst), "allocation": result.allocation.as_lists(),
                          "guarantee": result.guarantee, "report": ef.to_dict()}
    return rep


def verify_identical_leximin(trials: int = 200, seed: int = 0) -> ClaimReport:
    """Leximin partitions of one shared valuation: MMA1 (submodular), MMAX (strictly increasing SA)."""
    rep = ClaimReport("identical_leximin", "pass")
    shapes = [(2, 6), (3, 6), (4, 6), (3, 8), (4, 7)]
    for t in range(trials):
        n, m = shapes[t % len(shapes)]
        cls = "submodular-table" if t % 2 == 0 else "strictly-increasing-subadditive-table"
        inst1 = generate_instance(TrialConfig(cls, 1, m, seed=seed), t)
        v = inst1.valuations[0]
        inst = Instance(n, m, [v] * n)
        alloc = allocate_identical_leximin(v, n)
        notion = "mma1" if cls == "submodular-table" else "mmax"
        rep.trials += 1
        r = check(inst, alloc, notion, 1)
        if not r.satisfied:
            rep.status = "fail"
            rep.counterexample = {"instance": instance_to_dict(inst), "allocation": alloc.as_lists(),
                                  "notion": notion, "report": r.to_dict()}
            break
    return rep


def verify_solvers(trials: int = 1000, seed: int = 0) -> ClaimReport:
    """Branch-and-bound solvers against brute force on instances with ``k^|S| <= 10^6``."""
    rep = ClaimReport("solvers", "pass")
    rng = random.Random(f"solvers/{seed}")
    for t in range(trials):
        k = rng.randint(1, 4)
        s = rng.randint(0, {1: 9, 2: 9, 3: 8, 4: 7}[k])
        cls = rng.choice(["additive", "additive", "binary-additive", "submodular-table", "subadditive-table"])
        if cls.endswith("table"):
            s = min(s, 7)
        m = max(s + rng.randint(0, 2), 1)
        if cls.endswith("table"):
            m = min(m, 8)
        cfg = TrialConfig(cls, 1, m, seed=seed, distribution=rng.choice(["rational", "small-int"]))
        v = generate_instance(cfg, t).valuations[0]
        goods = sorted(rng.sample(range(1, m + 1), min(s, m)))
        assert k ** len(goods) <= 10**6
        rep.trials += 1
        mms, mms_part = mms_value(v, goods, k)
        lex = leximin_partition(v, goods, k)
        mm, mm_part = minimax_partition(v, goods, k)
        problems = []
        if mms != mms_value_brute(v, goods, k) or min(v.value(p) for p in mms_part.parts) != mms:
            problems.append("mms")
        if lex != leximin_partition_brute(v, goods, k):
            problems.append("leximin")
        if mm != minimax_value_brute(v, goods, k) or max(v.value(p) for p in mm_part.parts) != mm:
            problems.append("minimax")
        if lex.value_vector[0] != mms:
            problems.append("leximin head != mms")
        if problems:
            rep.status = "fail"
            rep.counterexample = {"valuation": repr(v), "goods": goods, "k": k, "problems": problems}
            break
    return rep


def verify_catalog(include_slow: bool = False) -> ClaimReport:
    rep = ClaimReport("catalog", "pass")
    for entry in worked_instances():
        for exp in entry.expected:
            if getattr(exp, "slow", False) and not include_slow:
                continue
            ok, desc = check_expectation(entry, exp)
            rep.trials += 1
            rep.details.append({"entry": entry.id, "ok": ok, "check": desc})
            if not ok:
                rep.status = "fail"
    return rep


def run_suite(claim: str, seed: int = 0, trials: int | None = None) -> ClaimReport:
    """Dispatch a suite id as accepted by ``mmaware verify --claim``."""
    if claim in CLAIMS:
        return verify_claim(claim, seed, trials or 500)
    if claim.startswith("egalitarian_n"):
        return verify_egalitarian_bounds(int(claim.rsplit("n", 1)[1]))
    table = {
        "three_agents": lambda: verify_three_agents(trials or 500, seed),
        "matching": lambda: verify_matching_algorithm(trials or 500, seed),
        "identical_leximin": lambda: verify_identical_leximin(trials or 200, seed),
        "solvers": lambda: verify_solvers(trials or 1000, seed),
        "subadditive_half_ef": verify_subadditive_half_ef,
        "catalog": lambda: verify_catalog(False),
        "catalog_slow": lambda: verify_catalog(True),
    }
    if claim not in table:
        raise KeyError(claim)
    return table[claim]()


def suite_ids() -> list[str]:
    return sorted(CLAIMS) + ["egalitarian_n2", "egalitarian_n3", "three_agents", "matching",
                             "identical_leximin", "subadditive_half_ef", "solvers", "catalog",
                             "catalog_slow"]
