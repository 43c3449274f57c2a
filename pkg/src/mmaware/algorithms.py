"""Constructive allocation procedures.

* ``allocate_identical_leximin`` - hand out a leximin n-partition when all
  agents share one valuation.
* ``allocate_three_agents`` - divide-and-choose for three additive agents.
* ``allocate_matching`` - repeated maximum-weight matching between unenvied
  agents and unallocated goods, with envy-cycle rotation between rounds.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .matching import max_cardinality_matching, max_weight_matching
from .model import Allocation, Instance, InstanceError, Valuation, format_rational, from_mask
from .partition import SearchBudget, leximin_partition

logger = logging.getLogger(__name__)


def allocate_identical_leximin(v: Valuation, n: int, budget: SearchBudget | None = None) -> Allocation:
    """Give agent ``i`` the ``i``-th part of the canonical leximin ``n``-partition."""
    res = leximin_partition(v, range(1, v.m + 1), n, budget)
    return Allocation(res.parts)


# --------------------------------------------------------------------------
# three agents

def _ranked(v: Valuation, bundles) -> list[int]:
    """Bundle indices from most to least preferred; ties go to the lower index."""
    return sorted(range(len(bundles)), key=lambda b: (-v.value(bundles[b]), b))


def _split_and_choose(divider: Valuation, chooser: Valuation, goods, budget):
    """``divider`` leximin-splits ``goods`` in two; ``chooser`` takes her favourite."""
    parts = leximin_partition(divider, goods, 2, budget).parts
    pick = _ranked(chooser, parts)[0]
    return parts[pick], parts[1 - pick]


def allocate_three_agents(inst: Instance, budget: SearchBudget | None = None, trace: list | None = None) -> Allocation:
    """Divide-and-choose for three agents with additive valuations.

    Agent 3 (index 2) splits the goods into her leximin 3-partition; agents 1
    and 2 then pick, or one of them re-splits two bundles, depending on how
    their rankings of the three bundles overlap.  ``trace`` (a list) receives
    the branch taken.
    """
    if inst.n != 3:
        raise InstanceError(f"needs exactly 3 agents, got {inst.n}", "n")
    if not inst.all_additive:
        raise InstanceError("needs additive valuations", "valuations")
    v1, v2, v3 = inst.valuations
    bundles = list(leximin_partition(v3, inst.goods, 3, budget).parts)
    r1, r2 = _ranked(v1, bundles), _ranked(v2, bundles)

    def done(case: str, a1, a2, a3) -> Allocation:
        if trace is not None:
            trace.append({"case": case, "partition": [sorted(b) for b in bundles]})
        logger.debug("three-agent case %s", case)
        return Allocation((a1, a2, a3))

    if r1[0] != r2[0]:
        third = ({0, 1, 2} - {r1[0], r2[0]}).pop()
        return done("2", bundles[r1[0]], bundles[r2[0]], bundles[third])

    if r1[1] == r2[1]:
        top, second, last = r2
        a1, a2 = _split_and_choose(v2, v1, bundles[top] | bundles[second], budget)
        return done("3", a1, a2, bundles[last])

    # same favourite x; agent 1 ranks y second, agent 2 ranks z second
    x, y, z = r1[0], r1[1], r2[1]
    X, Y, Z = bundles[x], bundles[y], bundles[z]
    cond1 = 2 * v1.value(Y) > v1.value(X) + v1.value(Z)
    cond2 = 2 * v2.value(Z) > v2.value(X) + v2.value(Y)
    if cond1 and cond2:
        return done("4a", Y, Z, X)
    if not cond1:
        a1, a2 = _split_and_choose(v2, v1, X | Z, budget)
        return done("4b", a1, a2, Y)
    # mirrored: agent 1 keeps her top two bundles and agent 2 chooses
    a2, a1 = _split_and_choose(v1, v2, X | Y, budget)
    return done("4b-mirrored", a1, a2, Z)


# --------------------------------------------------------------------------
# envy graph

@dataclass(frozen=True)
class EnvyGraph:
    n: int
    edges: frozenset  # (i, j): i envies j, 0-based

    def successors(self, i: int) -> list[int]:
        return sorted(j for a, j in self.edges if a == i)

    def in_degree(self, j: int) -> int:
        return sum(1 for _, b in self.edges if b == j)

    def unenvied(self) -> list[int]:
        return [j for j in range(self.n) if self.in_degree(j) == 0]

    def find_cycle(self) -> list[int] | None:
        """First cycle met by depth-first search from the lowest-numbered node."""
        state = [0] * self.n  # 0 new, 1 on stack, 2 done
        stack: list[int] = []

        def visit(u: int):
            state[u] = 1
            stack.append(u)
            for w in self.successors(u):
                if state[w] == 1:
                    return stack[stack.index(w):]
                if state[w] == 0:
                    found = visit(w)
                    if found:
                        return found
            stack.pop()
            state[u] = 2
            return None

        for u in range(self.n):
            if state[u] == 0:
                found = visit(u)
                if found:
                    return found
        return None


class _ScaledValues:
    """Exact integer bundle values on bitmasks, all agents over one denominator."""

    def __init__(self, inst: Instance):
        self.den = 1
        forms = [v.int_form() for v in inst.valuations]
        for d, _ in forms:
            self.den = self.den * d // math.gcd(self.den, d)
        self.kinds = [v.kind for v in inst.valuations]
        self.data = [tuple(x * (self.den // d) for x in data) for d, data in forms]

    def __call__(self, i: int, mask: int) -> int:
        data = self.data[i]
        if self.kinds[i] == "table":
            return data[mask]
        total, j = 0, 0
        while mask:
            if mask & 1:
                total += data[j]
            mask >>= 1
            j += 1
        return total


def _envy_edges(val: _ScaledValues, masks: list[int]) -> frozenset:
    n = len(masks)
    own = [val(i, masks[i]) for i in range(n)]
    return frozenset((i, j) for i in range(n) for j in range(n) if i != j and own[i] < val(i, masks[j]))


def _masks(alloc: Allocation) -> list[int]:
    return alloc.masks()


def build_envy_graph(inst: Instance, alloc: Allocation) -> EnvyGraph:
    return EnvyGraph(inst.n, _envy_edges(_ScaledValues(inst), _masks(alloc)))


def _rotate(val: _ScaledValues, masks: list[int], rotations, tags) -> list[int]:
    masks = list(masks)
    while True:
        cycle = EnvyGraph(len(masks), _envy_edges(val, masks)).find_cycle()
        if cycle is None:
            return masks
        if rotations is not None:
            rotations.append(list(cycle))
        moved = [masks[cycle[(k + 1) % len(cycle)]] for k in range(len(cycle))]
        for k, agent in enumerate(cycle):
            masks[agent] = moved[k]
        if tags is not None:
            moved_tags = [tags[cycle[(k + 1) % len(cycle)]] for k in range(len(cycle))]
            for k, agent in enumerate(cycle):
                tags[agent] = moved_tags[k]


def eliminate_envy_cycles(inst: Instance, alloc: Allocation, rotations: list | None = None,
                          tags: list | None = None) -> Allocation:
    """Rotate bundles along envy cycles until the envy graph is acyclic.

    On a cycle ``i1 -> i2 -> ... -> it -> i1`` every agent takes the bundle of
    the agent she envies.  ``tags`` (one entry per agent) travels with the
    bundles; ``rotations`` collects the cycles (0-based).
    """
    masks = _rotate(_ScaledValues(inst), _masks(alloc), rotations, tags)
    return Allocation(tuple(from_mask(x) for x in masks))


# --------------------------------------------------------------------------
# matching-based algorithm

ADDITIVE_CLASSES = ("MMA_half", "MMAX_half", "MMAX_exact")
SUBADDITIVE_CLASSES = ("EF_half", "EFX_half", "EFX_exact")

# (notion, alpha) each class is certified against.  EF_half is only checked
# as 1/2-EFX: 1/2-EF can fail, see ``subadditive_half_ef_counterexample``.
GUARANTEE_CHECKS = {
    "MMA_half": ("mma", Fraction(1, 2)),
    "MMAX_half": ("mmax", Fraction(1, 2)),
    "MMAX_exact": ("mmax", Fraction(1)),
    "EF_half": ("efx", Fraction(1, 2)),
    "EFX_half": ("efx", Fraction(1, 2)),
    "EFX_exact": ("efx", Fraction(1)),
}


@dataclass
class MatchingRound:
    unenvied: list[int]
    remaining: list[int]
    weights: list[list[Fraction]]
    matching: list[tuple[int, int]]  # (agent, good), agent 0-based
    cardinality_fallback: bool
    rotations: list[list[int]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "L": [i + 1 for i in self.unenvied],
            "R": list(self.remaining),
            "weights": [[format_rational(x) for x in row] for row in self.weights],
            "matching": [[i + 1, j] for i, j in self.matching],
            "cardinality_fallback": self.cardinality_fallback,
            "rotations": [[i + 1 for i in cyc] for cyc in self.rotations],
        }


@dataclass
class MatchingResult:
    allocation: Allocation
    guarantee: str
    rounds: list[MatchingRound]
    last_good: list[int | None]  # most recent good added to each agent's final bundle

    def trace_dict(self) -> list[dict]:
        return [r.to_dict() for r in self.rounds]


def guarantee_class(alloc: Allocation, additive: bool) -> str:
    """Classify by how many agents hold more than one good."""
    multi = sum(1 for b in alloc.bundles if len(b) > 1)
    labels = ADDITIVE_CLASSES if additive else SUBADDITIVE_CLASSES
    if multi >= 2:
        return labels[0]
    return labels[1] if multi == 1 else labels[2]


def allocate_matching(inst: Instance) -> MatchingResult:
    """Allocate goods round by round to unenvied agents via maximum-weight matchings.

    Each round matches the unenvied agents ``L`` with the unallocated goods
    ``R`` using marginal values as weights (a maximum-cardinality matching if
    every weight is zero), then rotates bundles along envy cycles.
    """
    n = inst.n
    val = _ScaledValues(inst)
    masks = [0] * n
    last: list[int | None] = [None] * n
    remaining = sorted(inst.goods)
    unenvied = list(range(n))
    rounds: list[MatchingRound] = []

    while remaining:
        weights = []
        for i in unenvied:
            base = val(i, masks[i])
            weights.append([val(i, masks[i] | 1 << (j - 1)) - base for j in remaining])
        edges = max_weight_matching(weights)
        fallback = not edges
        if fallback:
            edges = max_cardinality_matching(len(unenvied), len(remaining))
        matched = [(unenvied[a], remaining[g]) for a, g in edges]
        for i, j in matched:
            masks[i] |= 1 << (j - 1)
            last[i] = j
        taken = {j for _, j in matched}
        rounds.append(MatchingRound(list(unenvied), list(remaining),
                                    [[Fraction(w, val.den) for w in row] for row in weights], matched, fallback))
        remaining = [j for j in remaining if j not in taken]

        masks = _rotate(val, masks, rounds[-1].rotations, last)
        unenvied = EnvyGraph(n, _envy_edges(val, masks)).unenvied()
        if not unenvied:
            raise AssertionError("envy graph is acyclic, so some agent must be unenvied")

    alloc = Allocation(tuple(from_mask(x) for x in masks))
    return MatchingResult(alloc, guarantee_class(alloc, inst.all_additive), rounds, last)


def subadditive_half_ef_counterexample() -> Instance:
    """Three identical agents given as a set table, goods worth 10, 1, 1, 1, 1.

    The matching algorithm hands good 1 to agent 1 in the first round and the
    small goods to agents 2 and 3, so two agents end with more than one good
    while each of them values agent 1's bundle at five times her own.
    """
    w = [10, 1, 1, 1, 1]
    v = Valuation.from_function(lambda s: sum(w[j - 1] for j in s), len(w))
    return Instance(3, len(w), [v] * 3)
