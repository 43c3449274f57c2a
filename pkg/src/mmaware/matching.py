"""Exact maximum-weight bipartite matching over rational weights."""
from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Sequence


def _assignment_max(w: list[list[int]]) -> int:
    """Best total of an assignment of every row to a distinct column (rows <= cols).

    Kuhn-Munkres with potentials, O(rows^2 * cols); integer weights only.
    """
    n = len(w)
    if n == 0:
        return 0
    m = len(w[0])
    INF = float("inf")
    u = [0] * (n + 1)
    v = [0] * (m + 1)
    p = [0] * (m + 1)
    way = [0] * (m + 1)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = [INF] * (m + 1)
        used = [False] * (m + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            delta, j1 = INF, 0
            for j in range(1, m + 1):
                if not used[j]:
                    cur = -w[i0 - 1][j - 1] - u[i0] - v[j]
                    if cur < minv[j]:
                        minv[j], way[j] = cur, j0
                    if minv[j] < delta:
                        delta, j1 = minv[j], j
            for j in range(m + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    return sum(w[p[j] - 1][j - 1] for j in range(1, m + 1) if p[j])


def _best_total(w: list[list[int]], rows: list[int], cols: list[int]) -> int:
    # zero weight means "no edge", so padding with zeros is harmless
    sub = [[max(w[i][j], 0) for j in cols] for i in rows]
    if not sub or not cols:
        return 0
    if len(rows) > len(cols):
        sub = [list(col) for col in zip(*sub)]
    return _assignment_max(sub)


def _to_ints(weights: Sequence[Sequence]) -> list[list[int]]:
    fr = [[Fraction(x) for x in row] for row in weights]
    den = 1
    for row in fr:
        for x in row:
            den = den * x.denominator // math.gcd(den, x.denominator)
    return [[x.numerator * (den // x.denominator) for x in row] for row in fr]


def max_weight_matching(weights: Sequence[Sequence]) -> list[tuple[int, int]]:
    """Maximum-weight matching of a non-negative ``rows x cols`` weight matrix.

    Zero-weight edges are never used.  Among all maximum-weight matchings the
    returned one is lexicographically smallest as a sorted edge list: edges are
    taken greedily in ``(row, col)`` order whenever the optimum stays reachable.
    Returns sorted 0-based ``(row, col)`` pairs.

    >>> max_weight_matching([[100, 1], [1, 100]])
    [(0, 0), (1, 1)]
    """
    w = _to_ints(weights)
    if any(x < 0 for row in w for x in row):
        raise ValueError("weights must be non-negative")
    nr = len(w)
    nc = len(w[0]) if nr else 0
    rows, cols = list(range(nr)), list(range(nc))
    target = _best_total(w, rows, cols)
    if target == 0:
        return []
    chosen: list[tuple[int, int]] = []
    fixed = 0
    for i in range(nr):
        for j in range(nc):
            if w[i][j] <= 0 or i not in rows or j not in cols:
                continue
            r2 = [r for r in rows if r != i]
            c2 = [c for c in cols if c != j]
            if fixed + w[i][j] + _best_total(w, r2, c2) == target:
                chosen.append((i, j))
                fixed += w[i][j]
                rows, cols = r2, c2
    return chosen


def max_cardinality_matching(n_rows: int, n_cols: int, allowed=None) -> list[tuple[int, int]]:
    """Largest matching over ``allowed`` edges (default: complete), same tie-break."""
    ones = [[1 if allowed is None or (i, j) in allowed else 0 for j in range(n_cols)] for i in range(n_rows)]
    return max_weight_matching(ones)


def matching_weight(weights, matching) -> Fraction:
    return sum((Fraction(weights[i][j]) for i, j in matching), Fraction(0))


def max_weight_matching_brute(weights: Sequence[Sequence]) -> Fraction:
    """Optimal weight by enumerating every injective row-to-column map."""
    nr = len(weights)
    nc = len(weights[0]) if nr else 0
    best = Fraction(0)
    for k in range(min(nr, nc) + 1):
        for rows in itertools.combinations(range(nr), k):
            for cols in itertools.permutations(range(nc), k):
                best = max(best, sum((Fraction(weights[i][j]) for i, j in zip(rows, cols)), Fraction(0)))
    return best
