"""Exact k-partition solvers: maximin share, leximin and minimax.

Each solver is a depth-first branch-and-bound over good-to-part assignments
(goods in decreasing singleton value, a good opens at most one new part).
Values are scaled to integers by a common denominator so the search never
touches floats.  ``*_brute`` functions enumerate every assignment with plain
``Fraction`` arithmetic and serve as independent oracles.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator

from .model import Allocation, Instance, InstanceError, Valuation, from_mask, to_mask

DEFAULT_MAX_NODES = 10**8


class BudgetExhausted(RuntimeError):
    """The node limit ran out before the search finished; no partial answer is given."""


@dataclass
class SearchBudget:
    max_nodes: int = DEFAULT_MAX_NODES
    nodes: int = 0

    def tick(self, k: int = 1) -> None:
        self.nodes += k
        if self.nodes > self.max_nodes:
            raise BudgetExhausted(f"search exceeded {self.max_nodes} nodes")


@dataclass(frozen=True)
class PartitionResult:
    parts: tuple
    value_vector: tuple = field(default=())

    def to_dict(self) -> dict:
        from .model import format_rational

        return {
            "parts": [sorted(p) for p in self.parts],
            "value_vector": [format_rational(x) for x in self.value_vector],
        }


def canonical_parts(parts: Iterable[Iterable[int]]) -> tuple:
    """Parts sorted internally, ordered by smallest good, empty parts last."""
    nonempty = sorted(tuple(sorted(p)) for p in parts if p)
    empty = [() for p in parts if not p]
    return tuple(nonempty) + tuple(empty)


def _result(v: Valuation, parts) -> PartitionResult:
    key = canonical_parts(parts)
    frozen = tuple(frozenset(p) for p in key)
    return PartitionResult(frozen, tuple(sorted(v.value(p) for p in frozen)))


def _check_args(v: Valuation, goods, k: int) -> list[int]:
    if isinstance(k, bool) or not isinstance(k, int) or k < 1:
        raise InstanceError(f"part count must be a positive integer, got {k!r}", "k")
    goods = sorted(goods)
    to_mask(goods, v.m)
    return goods


class _Search:
    """Integer view of ``v`` restricted to ``goods``, in branching order."""

    def __init__(self, v: Valuation, goods: list[int], k: int, budget: SearchBudget | None):
        self.k = k
        self.budget = budget if budget is not None else SearchBudget()
        den, data = v.int_form()
        self.den = den
        self.additive = v.kind == "additive"
        if self.additive:
            weight = {j: data[j - 1] for j in goods}
        else:
            weight = {j: data[1 << (j - 1)] for j in goods}
        # branch on heavy goods first
        self.order = sorted(goods, key=lambda j: (-weight[j], j))
        s = self.s = len(self.order)
        if self.additive:
            self.w = [weight[j] for j in self.order]
            self.suffix = [0] * (s + 1)
            for l in range(s - 1, -1, -1):
                self.suffix[l] = self.suffix[l + 1] + self.w[l]
        else:
            self.table = _local_table(data, self.order)
            self.full = (1 << s) - 1
        self.masks = [0] * k
        self.vals = [0] * k

    def value_of(self, local_mask: int) -> int:
        if self.additive:
            return sum(self.w[l] for l in range(self.s) if local_mask >> l & 1)
        return self.table[local_mask]

    def place(self, l: int, p: int) -> None:
        self.masks[p] |= 1 << l
        if self.additive:
            self.vals[p] += self.w[l]
        else:
            self.vals[p] = self.table[self.masks[p]]

    def unplace(self, l: int, p: int, old: int) -> None:
        self.masks[p] &= ~(1 << l)
        self.vals[p] = old

    def candidates(self) -> list[int]:
        """Non-empty parts by increasing value, then the first empty part."""
        used = [p for p in range(self.k) if self.masks[p]]
        used.sort(key=lambda p: (self.vals[p], p))
        if len(used) < self.k:
            used.append(next(p for p in range(self.k) if not self.masks[p]))
        return used

    def global_parts(self, masks) -> list[frozenset]:
        return [frozenset(self.order[l] for l in range(self.s) if m >> l & 1) for m in masks]

    def remaining_mask(self, l: int) -> int:
        return self.full & ~((1 << l) - 1)

    def waterfill(self, l: int) -> tuple[list[int], int, int]:
        """Fractional leximin completion: the lowest ``j`` parts rise to ``num / j``."""
        vals = sorted(self.vals)
        r = self.suffix[l]
        acc = 0
        for j in range(1, self.k + 1):
            acc += vals[j - 1]
            num = acc + r
            if j == self.k or num <= vals[j] * j:
                return vals, j, num
        raise AssertionError("unreachable")


def _local_table(data, order: list[int]) -> list[int]:
    s = len(order)
    bits = [1 << (j - 1) for j in order]
    gmask = [0] * (1 << s)
    table = [0] * (1 << s)
    for lm in range(1, 1 << s):
        low = lm & -lm
        gmask[lm] = gmask[lm ^ low] | bits[low.bit_length() - 1]
        table[lm] = data[gmask[lm]]
    return table


class _Stop(Exception):
    pass


def mms_value(v: Valuation, goods: Iterable[int], k: int, budget: SearchBudget | None = None):
    """Maximin share of ``goods`` split into ``k`` parts, with a maximizing partition.

    >>> from fractions import Fraction
    >>> val = Valuation.additive([100, 1])
    >>> mms_value(val, {1, 2}, 2)[0]
    Fraction(1, 1)
    """
    goods = _check_args(v, goods, k)
    if k == 1 or not goods:
        return v.value(goods), _result(v, [goods] + [[] for _ in range(k - 1)])
    srch = _Search(v, goods, k, budget)
    best = [-1, None]
    s = srch.s
    total = srch.suffix[0] if srch.additive else srch.table[srch.full]

    def dfs(l: int) -> None:
        srch.budget.tick()
        if l == s:
            mn = min(srch.vals)
            if mn > best[0]:
                best[0], best[1] = mn, list(srch.masks)
                if srch.additive and mn * k >= total:
                    raise _Stop
            return
        if srch.additive:
            _, j, num = srch.waterfill(l)
            if num <= best[0] * j:
                return
        else:
            rem = srch.remaining_mask(l)
            if min(srch.table[m | rem] for m in srch.masks) <= best[0]:
                return
        for p in srch.candidates():
            old = srch.vals[p]
            srch.place(l, p)
            dfs(l + 1)
            srch.unplace(l, p, old)

    try:
        dfs(0)
    except _Stop:
        pass
    return Fraction(best[0], srch.den), _result(v, srch.global_parts(best[1]))


def leximin_partition(v: Valuation, goods: Iterable[int], k: int, budget: SearchBudget | None = None) -> PartitionResult:
    """Leximin ``k``-partition of ``goods``.

    Among partitions with the same sorted value vector the one with the
    smallest ``canonical_parts`` form wins, and ``parts`` is returned in that
    canonical order.
    """
    goods = _check_args(v, goods, k)
    if k == 1 or not goods:
        return _result(v, [goods] + [[] for _ in range(k - 1)])
    srch = _Search(v, goods, k, budget)
    s = srch.s
    best: dict = {"vec": None, "key": None, "masks": None}

    def dfs(l: int) -> None:
        srch.budget.tick()
        if l == s:
            vec = sorted(srch.vals)
            if best["vec"] is None or vec > best["vec"]:
                best["vec"] = vec
                best["masks"] = list(srch.masks)
                best["key"] = None
            elif vec == best["vec"]:
                if best["key"] is None:
                    best["key"] = canonical_parts(srch.global_parts(best["masks"]))
                key = canonical_parts(srch.global_parts(srch.masks))
                if key < best["key"]:
                    best["key"], best["masks"] = key, list(srch.masks)
            return
        if best["vec"] is not None:
            if srch.additive:
                vals, j, num = srch.waterfill(l)
                cmp = _cmp_waterfill(vals, j, num, best["vec"])
            else:
                rem = srch.remaining_mask(l)
                bound = sorted(srch.table[m | rem] for m in srch.masks)
                cmp = (bound > best["vec"]) - (bound < best["vec"])
            if cmp < 0:
                return
        for p in srch.candidates():
            old = srch.vals[p]
            srch.place(l, p)
            dfs(l + 1)
            srch.unplace(l, p, old)

    dfs(0)
    return _result(v, srch.global_parts(best["masks"]))


def _cmp_waterfill(vals: list[int], j: int, num: int, best: list[int]) -> int:
    """Compare ``[num/j]*j + vals[j:]`` with ``best`` lexicographically."""
    for i in range(len(best)):
        if i < j:
            a, b = num, best[i] * j
        else:
            a, b = vals[i], best[i]
        if a != b:
            return 1 if a > b else -1
    return 0


def minimax_partition(v: Valuation, goods: Iterable[int], k: int, budget: SearchBudget | None = None):
    """Smallest achievable largest-part value over ``k``-partitions, with a witness."""
    goods = _check_args(v, goods, k)
    if k == 1 or not goods:
        return v.value(goods), _result(v, [goods] + [[] for _ in range(k - 1)])
    srch = _Search(v, goods, k, budget)
    s = srch.s
    if srch.additive:
        total = srch.suffix[0]
        floor_num = max(max(srch.w) * k, total)  # lower bound on k * answer
    else:
        floor_num = max(srch.table[1 << l] for l in range(s)) * k
    best = [None, None]

    def dfs(l: int) -> None:
        srch.budget.tick()
        if l == s:
            mx = max(srch.vals)
            if best[0] is None or mx < best[0]:
                best[0], best[1] = mx, list(srch.masks)
                if mx * k <= floor_num:
                    raise _Stop
            return
        for p in srch.candidates():
            old = srch.vals[p]
            srch.place(l, p)
            if best[0] is None or srch.vals[p] < best[0]:
                dfs(l + 1)
            srch.unplace(l, p, old)

    try:
        dfs(0)
    except _Stop:
        pass
    return Fraction(best[0], srch.den), _result(v, srch.global_parts(best[1]))


# --------------------------------------------------------------------------
# brute-force oracles

def all_partitions(goods: Iterable[int], k: int) -> Iterator[tuple]:
    """Every assignment of ``goods`` to ``k`` labelled parts (``k ** |goods|`` of them)."""
    goods = sorted(goods)
    for labels in itertools.product(range(k), repeat=len(goods)):
        parts: list[list[int]] = [[] for _ in range(k)]
        for j, p in zip(goods, labels):
            parts[p].append(j)
        yield tuple(frozenset(p) for p in parts)


def mms_value_brute(v: Valuation, goods, k: int) -> Fraction:
    return max(min(v.value(p) for p in parts) for parts in all_partitions(goods, k))


def minimax_value_brute(v: Valuation, goods, k: int) -> Fraction:
    return min(max(v.value(p) for p in parts) for parts in all_partitions(goods, k))


def leximin_partition_brute(v: Valuation, goods, k: int) -> PartitionResult:
    best = None
    for parts in all_partitions(goods, k):
        vec = tuple(sorted(v.value(p) for p in parts))
        key = canonical_parts(parts)
        # maximize vec, then minimize key
        if best is None or vec > best[0] or (vec == best[0] and key < best[1]):
            best = (vec, key)
    return PartitionResult(tuple(frozenset(p) for p in best[1]), best[0])


# --------------------------------------------------------------------------
# allocation-space search

def exhaustive_allocation_search(inst: Instance, predicate, budget: SearchBudget | None = None):
    """Decide whether some allocation satisfies ``predicate`` for every agent.

    ``predicate`` is a ``fairness.Criterion`` (or ``(notion, alpha)`` pair).
    Criteria that depend only on an agent's own bundle are searched with a
    memoized subset recursion over ``(agent, unallocated goods)``; the others
    fall back to full ``n ** m`` enumeration.  Returns ``(exists, witness)``.
    """
    if isinstance(predicate, tuple):
        from .fairness import Criterion

        predicate = Criterion(*predicate)
    budget = budget if budget is not None else SearchBudget()
    bound = predicate.bind(inst, budget)
    n, full = inst.n, (1 << inst.m) - 1

    if bound.local:
        memo: dict = {}

        def feasible(i: int, rest: int):
            if i == n - 1:
                budget.tick()
                return [rest] if bound.agent_ok(i, rest) else None
            hit = memo.get((i, rest), False)
            if hit is not False:
                return hit
            sub = rest
            found = None
            while True:
                budget.tick()
                if bound.agent_ok(i, sub):
                    tail = feasible(i + 1, rest ^ sub)
                    if tail is not None:
                        found = [sub] + tail
                        break
                if sub == 0:
                    break
                sub = (sub - 1) & rest
            memo[(i, rest)] = found
            return found

        masks = feasible(0, full)
    else:
        masks = None
        for masks_try in _all_mask_allocations(n, inst.m):
            budget.tick()
            if bound.allocation_ok(masks_try):
                masks = masks_try
                break
    if masks is None:
        return False, None
    return True, Allocation(tuple(from_mask(x) for x in masks))


def _all_mask_allocations(n: int, m: int) -> Iterator[list[int]]:
    for labels in itertools.product(range(n), repeat=m):
        masks = [0] * n
        for j, a in enumerate(labels):
            masks[a] |= 1 << j
        yield masks


def exhaustive_allocation_search_brute(inst: Instance, predicate):
    """Unpruned oracle: test every one of the ``n ** m`` allocations directly."""
    from .fairness import Criterion, satisfies

    if isinstance(predicate, tuple):
        predicate = Criterion(*predicate)
    for labels in itertools.product(range(inst.n), repeat=inst.m):
        bundles = [[] for _ in range(inst.n)]
        for j, a in enumerate(labels, start=1):
            bundles[a].append(j)
        alloc = Allocation.of(bundles)
        if satisfies(inst, alloc, predicate):
            return True, alloc
    return False, None
