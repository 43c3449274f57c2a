"""Exact per-agent fairness verdicts with re-checkable witnesses.

Notions: ``ef``, ``ef1``, ``efx`` (pairwise envy), ``prop``, ``mms``, ``eef``,
``mma``, ``mma1``, ``mmax`` (each depends only on the agent's own bundle).
Every notion takes an approximation factor ``alpha`` scaling the right-hand
side of its defining inequality.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .model import (
    Allocation,
    Instance,
    InstanceError,
    Valuation,
    check_allocation,
    format_rational,
    mask_goods,
    to_rational,
)
from .partition import PartitionResult, SearchBudget, minimax_partition, mms_value

ENVY_NOTIONS = ("ef", "ef1", "efx")
LOCAL_NOTIONS = ("prop", "mms", "eef", "mma", "mma1", "mmax")
NOTIONS = ENVY_NOTIONS + LOCAL_NOTIONS


def _mms(v: Valuation, mask: int, k: int, budget) -> tuple[Fraction, PartitionResult]:
    key = ("mms", mask, k)
    hit = v._cache.get(key)
    if hit is None:
        hit = v._cache[key] = mms_value(v, mask_goods(mask), k, budget)
    return hit


def _minimax(v: Valuation, mask: int, k: int, budget) -> tuple[Fraction, PartitionResult]:
    key = ("minimax", mask, k)
    hit = v._cache.get(key)
    if hit is None:
        hit = v._cache[key] = minimax_partition(v, mask_goods(mask), k, budget)
    return hit


def _parts_doc(parts) -> list[list[int]]:
    return [sorted(p) for p in parts]


@dataclass(frozen=True)
class AgentVerdict:
    agent: int  # 0-based
    satisfied: bool
    witness: dict | None = None

    def to_dict(self) -> dict:
        return {"agent": self.agent + 1, "satisfied": self.satisfied, "witness": self.witness}


@dataclass(frozen=True)
class FairnessReport:
    notion: str
    alpha: Fraction
    verdicts: tuple = field(default=())

    @property
    def satisfied(self) -> bool:
        return all(v.satisfied for v in self.verdicts)

    def agent(self, i: int) -> AgentVerdict:
        return self.verdicts[i]

    def violated_agents(self) -> list[int]:
        return [v.agent for v in self.verdicts if not v.satisfied]

    def to_dict(self) -> dict:
        return {
            "notion": self.notion,
            "alpha": format_rational(self.alpha),
            "satisfied": self.satisfied,
            "agents": [v.to_dict() for v in self.verdicts],
        }


class _Evaluator:
    """Per-agent notion tests on bitmask bundles for one instance."""

    def __init__(self, inst: Instance, budget: SearchBudget | None = None):
        self.inst = inst
        self.full = (1 << inst.m) - 1
        self.budget = budget if budget is not None else SearchBudget()
        self._vals: dict = {}

    def val(self, i: int, mask: int) -> Fraction:
        key = (i, mask)
        x = self._vals.get(key)
        if x is None:
            x = self._vals[key] = self.inst.valuations[i].value_mask(mask)
        return x

    # -- pairwise envy ----------------------------------------------------
    def envy(self, notion: str, alpha: Fraction, i: int, masks: list[int]):
        own = self.val(i, masks[i])
        for j, other in enumerate(masks):
            if j == i or not other:
                continue
            if notion == "ef":
                x = self.val(i, other)
                if own < alpha * x:
                    return False, {"envied_agent": j + 1, "own_value": format_rational(own),
                                   "other_value": format_rational(x)}
                continue
            best_e, best_x, worst_e, worst_x = None, None, None, None
            for e in mask_goods(other):
                x = self.val(i, other & ~(1 << (e - 1)))
                if best_x is None or x < best_x:
                    best_e, best_x = e, x
                if worst_x is None or x > worst_x:
                    worst_e, worst_x = e, x
            e, x = (best_e, best_x) if notion == "ef1" else (worst_e, worst_x)
            if own < alpha * x:
                return False, {"envied_agent": j + 1, "good": e, "own_value": format_rational(own),
                               "value_without_good": format_rational(x)}
        return True, None

    # -- bundle-local notions ---------------------------------------------
    def local(self, notion: str, alpha: Fraction, i: int, mask: int):
        inst, n = self.inst, self.inst.n
        v = inst.valuations[i]
        own = self.val(i, mask)
        rest = self.full & ~mask
        if notion == "prop":
            total = self.val(i, self.full)
            if own * n >= alpha * total:
                return True, None
            return False, {"own_value": format_rational(own), "total_value": format_rational(total)}
        if notion == "mms":
            share, part = _mms(v, self.full, n, self.budget)
            if own >= alpha * share:
                return True, None
            return False, {"mms": format_rational(share), "partition": _parts_doc(part.parts)}
        if notion == "eef":
            worst, part = _minimax(v, rest, n - 1, self.budget)
            if own >= alpha * worst:
                return True, {"partition": _parts_doc(part.parts), "max_part_value": format_rational(worst)}
            return False, None
        if notion == "mma":
            return self._mma_against(v, own, alpha, rest, n)
        if notion == "mma1":
            if not rest:
                return True, None
            failures = []
            for e in sorted(mask_goods(rest), reverse=True):
                ok, wit = self._mma_against(v, own, alpha, rest & ~(1 << (e - 1)), n)
                if ok:
                    return True, {"good": e}
                failures.append({"good": e, **wit})
            return False, {"removals": failures}
        if notion == "mmax":
            for e in sorted(mask_goods(rest), reverse=True):
                ok, wit = self._mma_against(v, own, alpha, rest & ~(1 << (e - 1)), n)
                if not ok:
                    return False, {"good": e, **wit}
            return True, None
        raise InstanceError(f"unknown notion {notion!r}", "notion")

    def _mma_against(self, v: Valuation, own: Fraction, alpha: Fraction, rest: int, n: int):
        """Is ``own >= alpha * MMS(rest, n - 1)``?  Witness is a beating partition."""
        if alpha == 0 or own >= alpha * self._upper_mms(v, rest, n - 1):
            return True, None
        share, part = _mms(v, rest, n - 1, self.budget)
        if own >= alpha * share:
            return True, None
        return False, {"mms": format_rational(share), "partition": _parts_doc(part.parts)}

    def _upper_mms(self, v: Valuation, mask: int, k: int) -> Fraction:
        # MMS never exceeds the whole set's value, nor its average for additive v
        total = v.value_mask(mask)
        if v.kind == "additive":
            return total / k
        return total

    def agent_ok(self, notion: str, alpha: Fraction, i: int, masks: list[int]):
        if self.inst.n == 1:
            return True, None
        if notion in ENVY_NOTIONS:
            return self.envy(notion, alpha, i, masks)
        return self.local(notion, alpha, i, masks[i])


def _normalize(notion: str, alpha) -> tuple[str, Fraction]:
    notion = notion.lower()
    if notion not in NOTIONS:
        raise InstanceError(f"unknown notion {notion!r}; choose from {', '.join(NOTIONS)}", "notion")
    alpha = to_rational(alpha, "alpha")
    if not 0 <= alpha <= 1:
        raise InstanceError("alpha must lie in [0, 1]", "alpha")
    return notion, alpha


def check(inst: Instance, alloc: Allocation, notion: str, alpha=1, budget: SearchBudget | None = None) -> FairnessReport:
    """Evaluate ``notion`` at factor ``alpha`` for every agent of ``alloc``."""
    notion, alpha = _normalize(notion, alpha)
    check_allocation(inst, alloc)
    ev = _Evaluator(inst, budget)
    masks = alloc.masks()
    verdicts = []
    for i in range(inst.n):
        ok, wit = ev.agent_ok(notion, alpha, i, masks)
        verdicts.append(AgentVerdict(i, ok, wit))
    return FairnessReport(notion, alpha, tuple(verdicts))


def check_envy(inst, alloc, notion="ef", alpha=1, budget=None) -> FairnessReport:
    if notion.lower() not in ENVY_NOTIONS:
        raise InstanceError(f"{notion!r} is not an envy notion", "notion")
    return check(inst, alloc, notion, alpha, budget)


def check_prop(inst, alloc, alpha=1, budget=None) -> FairnessReport:
    return check(inst, alloc, "prop", alpha, budget)


def check_mms(inst, alloc, alpha=1, budget=None) -> FairnessReport:
    return check(inst, alloc, "mms", alpha, budget)


def check_eef(inst, alloc, alpha=1, budget=None) -> FairnessReport:
    return check(inst, alloc, "eef", alpha, budget)


def check_mma(inst, alloc, alpha=1, budget=None) -> FairnessReport:
    return check(inst, alloc, "mma", alpha, budget)


def check_mma1(inst, alloc, alpha=1, budget=None) -> FairnessReport:
    return check(inst, alloc, "mma1", alpha, budget)


def check_mmax(inst, alloc, alpha=1, budget=None) -> FairnessReport:
    return check(inst, alloc, "mmax", alpha, budget)


# --------------------------------------------------------------------------
# criteria for allocation-space search

class Criterion:
    """A fairness notion at a fixed ``alpha``, usable as a search predicate."""

    def __init__(self, notion: str, alpha=1):
        self.notion, self.alpha = _normalize(notion, alpha)

    @property
    def local(self) -> bool:
        return self.notion in LOCAL_NOTIONS

    def bind(self, inst: Instance, budget=None) -> "_Bound":
        return _Bound(self, _Evaluator(inst, budget))

    def __repr__(self):
        return f"Criterion({self.notion!r}, {format_rational(self.alpha)!r})"


class ValueThreshold:
    """Every agent's own bundle is worth at least ``threshold`` to her."""

    notion = "value"
    local = True

    def __init__(self, threshold):
        self.threshold = to_rational(threshold, "threshold")

    def bind(self, inst: Instance, budget=None) -> "_ThresholdBound":
        return _ThresholdBound(inst, self.threshold)

    def __repr__(self):
        return f"ValueThreshold({format_rational(self.threshold)!r})"


class _Bound:
    def __init__(self, crit: Criterion, ev: _Evaluator):
        self.crit = crit
        self.ev = ev
        self.local = crit.local
        self._memo: dict = {}

    def agent_ok(self, i: int, mask: int) -> bool:
        key = (i, mask)
        hit = self._memo.get(key)
        if hit is None:
            if self.ev.inst.n == 1:
                hit = True
            else:
                hit = self.ev.local(self.crit.notion, self.crit.alpha, i, mask)[0]
            self._memo[key] = hit
        return hit

    def agent_holds(self, i: int, masks: list[int]) -> bool:
        if self.local:
            return self.agent_ok(i, masks[i])
        return self.ev.agent_ok(self.crit.notion, self.crit.alpha, i, masks)[0]

    def allocation_ok(self, masks: list[int]) -> bool:
        return all(self.agent_holds(i, masks) for i in range(len(masks)))


class _ThresholdBound:
    local = True

    def __init__(self, inst: Instance, threshold: Fraction):
        self.inst = inst
        self.ints = []
        for v in inst.valuations:
            den, data = v.int_form()
            # v(S) >= t  <=>  den * v(S) >= den * t
            self.ints.append((v.kind, data, threshold * den))

    def agent_ok(self, i: int, mask: int) -> bool:
        kind, data, bar = self.ints[i]
        if kind == "table":
            return data[mask] >= bar
        total = 0
        j = 0
        while mask:
            if mask & 1:
                total += data[j]
            mask >>= 1
            j += 1
        return total >= bar

    def agent_holds(self, i: int, masks) -> bool:
        return self.agent_ok(i, masks[i])

    def allocation_ok(self, masks) -> bool:
        return all(self.agent_ok(i, x) for i, x in enumerate(masks))


def satisfies(inst: Instance, alloc: Allocation, criterion) -> bool:
    if isinstance(criterion, tuple):
        criterion = Criterion(*criterion)
    return criterion.bind(inst).allocation_ok(alloc.masks())


# --------------------------------------------------------------------------
# witness re-verification

def _is_partition(parts, goods: set, k: int) -> bool:
    flat = [j for p in parts for j in p]
    return len(parts) == k and len(flat) == len(set(flat)) and set(flat) == goods


def verify_witness(inst: Instance, alloc: Allocation, report: FairnessReport) -> bool:
    """Recompute every witness in ``report`` from raw valuations.

    Violations are confirmed by exhibiting the offending inequality; EEF
    successes by checking the reallocation.  Uses ``Valuation.value`` only.
    """
    n, alpha = inst.n, report.alpha
    for verdict in report.verdicts:
        i, wit = verdict.agent, verdict.witness
        v = inst.valuations[i]
        own = v.value(alloc.bundles[i])
        rest = set(inst.goods - alloc.bundles[i])
        notion = report.notion
        if verdict.satisfied:
            if notion == "eef" and n > 1:
                if not _is_partition(wit["partition"], rest, n - 1):
                    return False
                if any(own < alpha * v.value(p) for p in wit["partition"]):
                    return False
            continue
        if wit is None:
            if notion == "eef":
                continue
            return False
        if notion in ENVY_NOTIONS:
            other = set(alloc.bundles[wit["envied_agent"] - 1])
            if notion == "ef":
                if not own < alpha * v.value(other):
                    return False
            elif notion == "ef1":
                if not all(own < alpha * v.value(other - {e}) for e in other):
                    return False
            else:
                e = wit["good"]
                if e not in other or not own < alpha * v.value(other - {e}):
                    return False
        elif notion == "prop":
            if not own * n < alpha * v.value(inst.goods):
                return False
        elif notion == "mms":
            if not _beats(v, own, alpha, wit["partition"], set(inst.goods), n):
                return False
        elif notion == "mma":
            if not _beats(v, own, alpha, wit["partition"], rest, n - 1):
                return False
        elif notion == "mmax":
            e = wit["good"]
            if e not in rest or not _beats(v, own, alpha, wit["partition"], rest - {e}, n - 1):
                return False
        elif notion == "mma1":
            removed = {r["good"] for r in wit["removals"]}
            if removed != rest:
                return False
            for r in wit["removals"]:
                if not _beats(v, own, alpha, r["partition"], rest - {r["good"]}, n - 1):
                    return False
    return True


def _beats(v: Valuation, own: Fraction, alpha: Fraction, parts, goods: set, k: int) -> bool:
    """Every part of a ``k``-partition of ``goods`` is worth more than ``own / alpha``."""
    return _is_partition(parts, goods, k) and all(alpha * v.value(p) > own for p in parts)
