"""Seeded random instances for each valuation class."""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from ..model import Instance, Valuation, from_mask

VALUATION_CLASSES = (
    "additive",
    "binary-additive",
    "subadditive-table",
    "submodular-table",
    "strictly-increasing-subadditive-table",
)


@dataclass(frozen=True)
class TrialConfig:
    valuation_class: str
    n: int
    m: int
    seed: int = 0
    trials: int = 100
    distribution: str = "rational"  # or "small-int"
    max_denominator: int = 64

    def __post_init__(self):
        if self.valuation_class not in VALUATION_CLASSES:
            raise ValueError(f"unknown valuation class {self.valuation_class!r}")
        if self.distribution not in ("rational", "small-int"):
            raise ValueError(f"unknown distribution {self.distribution!r}")


def trial_rng(cfg: TrialConfig, index: int) -> random.Random:
    # string seeds hash deterministically, independent of PYTHONHASHSEED
    return random.Random(f"{cfg.seed}/{cfg.valuation_class}/{cfg.distribution}/{cfg.n}/{cfg.m}/{index}")


def _draw(rng: random.Random, cfg: TrialConfig, zero_p: float = 0.15) -> Fraction:
    if rng.random() < zero_p:
        return Fraction(0)
    if cfg.distribution == "small-int":
        return Fraction(rng.randint(1, 5))
    den = rng.randint(1, cfg.max_denominator)
    return Fraction(rng.randint(1, 2 * den), den)


def _additive_rows(rng, cfg, draw) -> list[list[Fraction]]:
    rows = [[draw() for _ in range(cfg.m)] for _ in range(cfg.n)]
    for j in range(cfg.m):
        while all(r[j] == 0 for r in rows):
            for r in rows:
                r[j] = draw()
    return rows


def _coverage(rng, cfg) -> Valuation:
    universe = cfg.m + 2
    weight = [_draw(rng, cfg, zero_p=0) for _ in range(universe)]
    covers = []
    for _ in range(cfg.m):
        c = frozenset(u for u in range(universe) if rng.random() < 0.35)
        covers.append(c or frozenset({rng.randrange(universe)}))
    if rng.random() < 0.3:
        # budget-additive variant: additive value capped at a budget
        add = [_draw(rng, cfg) for _ in range(cfg.m)]
        cap = sum(add) * Fraction(rng.randint(1, 3), 4)
        return Valuation.from_function(lambda s: min(cap, sum((add[j - 1] for j in s), Fraction(0))), cfg.m)
    return Valuation.from_function(
        lambda s: sum((weight[u] for u in frozenset().union(*(covers[j - 1] for j in s))), Fraction(0)), cfg.m
    )


def _xos(rng, cfg, strict: bool) -> Valuation:
    clauses = [[_draw(rng, cfg, zero_p=0.3) for _ in range(cfg.m)] for _ in range(rng.randint(2, 3))]
    bonus = [Fraction(1, 2 * cfg.max_denominator) * rng.randint(1, 4) for _ in range(cfg.m)] if strict else [0] * cfg.m

    def f(s):
        base = max(sum((c[j - 1] for j in s), Fraction(0)) for c in clauses)
        return base + sum((bonus[j - 1] for j in s), Fraction(0))

    return Valuation.from_function(f, cfg.m)


def _table_ok(v: Valuation, cls: str) -> bool:
    flags = v.classify()
    if not flags.monotone or v.table[0] != 0:
        return False
    if cls == "submodular-table":
        return flags.submodular
    if cls == "subadditive-table":
        return flags.subadditive
    return flags.subadditive and flags.strictly_increasing


def generate_instance(cfg: TrialConfig, index: int) -> Instance:
    """The ``index``-th instance of the stream described by ``cfg``.

    Table classes are built from constructions that land in the class and are
    then confirmed with an exhaustive class check, resampling on failure.
    """
    rng = trial_rng(cfg, index)
    cls = cfg.valuation_class
    if cls == "additive":
        return Instance.additive(_additive_rows(rng, cfg, lambda: _draw(rng, cfg)))
    if cls == "binary-additive":
        return Instance.additive(_additive_rows(rng, cfg, lambda: Fraction(rng.randint(0, 1))))

    for _ in range(100):
        vals = []
        for _ in range(cfg.n):
            while True:
                if cls == "submodular-table":
                    v = _coverage(rng, cfg)
                else:
                    v = _xos(rng, cfg, strict=cls.startswith("strictly"))
                if _table_ok(v, cls):
                    break
            vals.append(v)
        if all(any(v.table[1 << j] > 0 for v in vals) for j in range(cfg.m)):
            return Instance(cfg.n, cfg.m, vals)
    raise RuntimeError(f"could not sample a valid {cls} instance")


def random_allocation_masks(rng: random.Random, n: int, m: int) -> list[int]:
    masks = [0] * n
    for j in range(m):
        masks[rng.randrange(n)] |= 1 << j
    return masks


def masks_to_bundles(masks) -> list[frozenset]:
    return [from_mask(x) for x in masks]
