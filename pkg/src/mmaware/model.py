"""Instances, valuations and allocations for indivisible goods.

Goods are labelled ``1..m``; agents are addressed by their 0-based position in
``Instance.valuations`` from Python and by their 1-based number in JSON
reports and on the command line.  Every magnitude is a ``Fraction``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

MAX_TABLE_GOODS = 16

GoodSet = frozenset


class InstanceError(ValueError):
    """Raised for malformed input; ``path`` points at the offending field."""

    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


def to_rational(x, path: str = "") -> Fraction:
    if isinstance(x, bool):
        raise InstanceError(f"expected a rational, got {x!r}", path)
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        text = x.strip()
        try:
            if "/" in text:
                p, q = text.split("/")
                num, den = int(p), int(q)
                if den == 0:
                    raise ZeroDivisionError
                return Fraction(num, den)
            return Fraction(int(text))
        except (ValueError, ZeroDivisionError):
            raise InstanceError(f"not a rational 'p/q' string: {x!r}", path) from None
    raise InstanceError(f"expected an integer or 'p/q' string, got {type(x).__name__}", path)


def format_rational(x: Fraction):
    """Integers stay bare; everything else becomes a ``"p/q"`` string."""
    x = Fraction(x)
    if x.denominator == 1:
        return x.numerator
    return f"{x.numerator}/{x.denominator}"


def to_mask(goods: Iterable[int], m: int) -> int:
    mask = 0
    for j in goods:
        if isinstance(j, bool) or not isinstance(j, int) or not 1 <= j <= m:
            raise InstanceError(f"good index {j!r} outside 1..{m}")
        bit = 1 << (j - 1)
        if mask & bit:
            raise InstanceError(f"duplicate good {j}")
        mask |= bit
    return mask


def from_mask(mask: int) -> frozenset:
    goods = []
    j = 1
    while mask:
        if mask & 1:
            goods.append(j)
        mask >>= 1
        j += 1
    return frozenset(goods)


def mask_goods(mask: int) -> list[int]:
    return sorted(from_mask(mask))


@dataclass(frozen=True)
class ValuationClass:
    additive: bool
    binary_additive: bool
    subadditive: bool
    submodular: bool
    monotone: bool
    strictly_increasing: bool


class Valuation:
    """A normalized set function over goods ``1..m``.

    Two representations exist: ``additive`` (one value per good) and
    ``table`` (an explicit value for every subset, ``m <= 16``).  Instances
    are treated as immutable; derived data is cached on first use.
    """

    __slots__ = ("kind", "m", "values", "table", "_flags", "_int_form", "_cache")

    def __init__(self, kind: str, m: int, values=None, table=None):
        self.kind = kind
        self.m = m
        self.values: tuple[Fraction, ...] | None = values
        self.table: tuple[Fraction, ...] | None = table
        self._flags = None
        self._int_form = None
        self._cache: dict = {}

    @classmethod
    def additive(cls, values: Sequence) -> "Valuation":
        vals = tuple(to_rational(x, f"values[{k}]") for k, x in enumerate(values))
        for k, x in enumerate(vals):
            if x < 0:
                raise InstanceError("negative value", f"values[{k}]")
        return cls("additive", len(vals), values=vals)

    @classmethod
    def from_table(cls, entries: Mapping, m: int) -> "Valuation":
        """Build a table valuation from ``{goods: value}``; every subset must appear."""
        if not 0 <= m <= MAX_TABLE_GOODS:
            raise InstanceError(f"table valuations need 0 <= m <= {MAX_TABLE_GOODS}, got {m}")
        table: list = [None] * (1 << m)
        for goods, x in entries.items():
            mask = to_mask(goods, m)
            if table[mask] is not None:
                raise InstanceError(f"subset {mask_goods(mask)} given twice")
            table[mask] = to_rational(x, _table_key(mask))
        for mask, x in enumerate(table):
            if x is None:
                raise InstanceError("missing subset entry", _table_key(mask))
        return cls("table", m, table=tuple(table))

    @classmethod
    def from_function(cls, fn, m: int) -> "Valuation":
        """Tabulate ``fn(frozenset)`` over every subset of ``1..m``."""
        return cls.from_table({from_mask(s): fn(from_mask(s)) for s in range(1 << m)}, m)

    def value(self, goods: Iterable[int]) -> Fraction:
        return self.value_mask(to_mask(goods, self.m))

    def value_mask(self, mask: int) -> Fraction:
        if mask >> self.m:
            raise InstanceError(f"goods outside 1..{self.m}")
        if self.kind == "table":
            return self.table[mask]
        total = Fraction(0)
        j = 0
        while mask:
            if mask & 1:
                total += self.values[j]
            mask >>= 1
            j += 1
        return total

    def singleton(self, j: int) -> Fraction:
        if self.kind == "additive":
            return self.values[j - 1]
        return self.table[1 << (j - 1)]

    def int_form(self):
        """``(denominator, data)`` with every value scaled to an integer.

        ``data`` is a tuple of per-good integers (additive) or of per-subset
        integers (table); values are ``data / denominator`` exactly.
        """
        if self._int_form is None:
            src = self.values if self.kind == "additive" else self.table
            den = 1
            for x in src:
                den = den * x.denominator // math.gcd(den, x.denominator)
            self._int_form = (den, tuple(x.numerator * (den // x.denominator) for x in src))
        return self._int_form

    def classify(self) -> ValuationClass:
        if self._flags is None:
            self._flags = check_valuation_class(self)
        return self._flags

    def __eq__(self, other):
        if not isinstance(other, Valuation):
            return NotImplemented
        return (self.kind, self.m, self.values, self.table) == (other.kind, other.m, other.values, other.table)

    def __hash__(self):
        return hash((self.kind, self.m, self.values, self.table))

    def __repr__(self):
        if self.kind == "additive":
            return f"Valuation.additive({[format_rational(x) for x in self.values]})"
        return f"Valuation(table, m={self.m})"


def _table_key(mask: int) -> str:
    return ",".join(str(j) for j in mask_goods(mask))


def check_valuation_class(v: Valuation) -> ValuationClass:
    """Exhaustively classify ``v``.

    Table valuations are checked over all subsets: monotonicity and strict
    increase via single-good marginals, submodularity via the equivalent
    pairwise-marginal condition, subadditivity over disjoint pairs (enough for
    monotone functions).
    """
    if v.kind == "additive":
        binary = all(x in (0, 1) for x in v.values)
        return ValuationClass(True, binary, True, True, True, all(x > 0 for x in v.values))

    m, t = v.m, v.table
    full = (1 << m) - 1
    monotone = strict = True
    for s in range(1 << m):
        for e in range(m):
            bit = 1 << e
            if s & bit:
                continue
            if t[s | bit] < t[s]:
                monotone = False
            if t[s | bit] <= t[s]:
                strict = False

    submodular = True
    for s in range(1 << m):
        free = full & ~s
        for a in range(m):
            if not free >> a & 1:
                continue
            for b in range(a + 1, m):
                if not free >> b & 1:
                    continue
                if t[s | 1 << a] + t[s | 1 << b] < t[s | 1 << a | 1 << b] + t[s]:
                    submodular = False
                    break
            if not submodular:
                break
        if not submodular:
            break

    if submodular and monotone and t[0] == 0:
        subadditive = True
    else:
        subadditive = _subadditive(t, m, monotone)

    additive = all(t[s] == sum((t[1 << e] for e in range(m) if s >> e & 1), Fraction(0)) for s in range(1 << m))
    binary = additive and all(t[1 << e] in (0, 1) for e in range(m))
    return ValuationClass(additive, binary, subadditive, submodular, monotone, strict)


def _subadditive(t, m: int, monotone: bool) -> bool:
    universe = range(1 << m)
    for u in universe:
        # enumerate unordered splits {s, u ^ s}
        s = (u - 1) & u
        while s:
            if t[u] > t[s] + t[u ^ s]:
                return False
            s = (s - 1) & u
        if not monotone:
            # overlapping pairs matter too without monotonicity
            for w in universe:
                if t[u | w] > t[u] + t[w]:
                    return False
    return True


@dataclass(frozen=True)
class Instance:
    n: int
    m: int
    valuations: tuple

    def __post_init__(self):
        object.__setattr__(self, "valuations", tuple(self.valuations))
        if not isinstance(self.n, int) or self.n < 1:
            raise InstanceError("need at least one agent", "n")
        if not isinstance(self.m, int) or self.m < 0:
            raise InstanceError("good count must be >= 0", "m")
        if len(self.valuations) != self.n:
            raise InstanceError(f"expected {self.n} valuations, got {len(self.valuations)}", "valuations")
        for i, v in enumerate(self.valuations):
            path = f"valuations[{i}]"
            if not isinstance(v, Valuation):
                raise InstanceError("not a Valuation", path)
            if v.m != self.m:
                raise InstanceError(f"valuation covers {v.m} goods, instance has {self.m}", path)
            if v.kind == "table":
                if v.table[0] != 0:
                    raise InstanceError("v(empty set) must be 0", path)
                if not v.classify().monotone:
                    raise InstanceError("valuation is not monotone", path)
                if min(v.table) < 0:
                    raise InstanceError("negative value", path)
        for j in range(1, self.m + 1):
            if all(v.singleton(j) == 0 for v in self.valuations):
                raise InstanceError(f"good {j} is worthless to every agent", f"goods[{j}]")

    @classmethod
    def additive(cls, rows: Sequence[Sequence]) -> "Instance":
        vals = [Valuation.additive(r) for r in rows]
        m = len(vals[0].values) if vals else 0
        return cls(len(vals), m, vals)

    @property
    def goods(self) -> frozenset:
        return frozenset(range(1, self.m + 1))

    @property
    def all_additive(self) -> bool:
        return all(v.kind == "additive" for v in self.valuations)


@dataclass(frozen=True)
class Allocation:
    """Ordered bundles, one per agent; bundles are pairwise disjoint."""

    bundles: tuple

    def __post_init__(self):
        bundles = tuple(frozenset(b) for b in self.bundles)
        seen: set = set()
        for i, b in enumerate(bundles):
            dup = seen & b
            if dup:
                raise InstanceError(f"good {min(dup)} appears in more than one bundle", f"bundles[{i}]")
            seen |= b
        object.__setattr__(self, "bundles", bundles)

    @classmethod
    def of(cls, bundles: Iterable[Iterable[int]]) -> "Allocation":
        out = []
        for i, b in enumerate(bundles):
            b = list(b)
            if len(set(b)) != len(b):
                raise InstanceError("duplicate good in bundle", f"bundles[{i}]")
            out.append(frozenset(b))
        return cls(tuple(out))

    def masks(self) -> list[int]:
        return [sum(1 << (j - 1) for j in b) for b in self.bundles]

    def as_lists(self) -> list[list[int]]:
        return [sorted(b) for b in self.bundles]


def check_allocation(inst: Instance, alloc: Allocation) -> None:
    """Raise ``InstanceError`` unless ``alloc`` partitions the goods of ``inst``."""
    if len(alloc.bundles) != inst.n:
        raise InstanceError(f"expected {inst.n} bundles, got {len(alloc.bundles)}", "bundles")
    covered: frozenset = frozenset()
    for i, b in enumerate(alloc.bundles):
        for j in b:
            if isinstance(j, bool) or not isinstance(j, int) or not 1 <= j <= inst.m:
                raise InstanceError(f"good {j!r} outside 1..{inst.m}", f"bundles[{i}]")
        covered |= b
    missing = inst.goods - covered
    if missing:
        raise InstanceError(f"goods {sorted(missing)} are not allocated", "bundles")


def value(v: Valuation, goods: Iterable[int]) -> Fraction:
    return v.value(goods)


# --------------------------------------------------------------------------
# JSON

def _valuation_doc(v: Valuation) -> dict:
    if v.kind == "additive":
        return {"type": "additive", "values": [format_rational(x) for x in v.values]}
    order = sorted(range(1 << v.m), key=lambda s: (bin(s).count("1"), mask_goods(s)))
    return {"type": "table", "entries": {_table_key(s): format_rational(v.table[s]) for s in order}}


def instance_to_dict(inst: Instance) -> dict:
    return {"n": inst.n, "m": inst.m, "valuations": [_valuation_doc(v) for v in inst.valuations]}


def serialize_instance(inst: Instance) -> str:
    """Canonical text form: one valuation per line."""
    rows = ",\n".join("    " + json.dumps(_valuation_doc(v)) for v in inst.valuations)
    body = f"\n{rows}\n  " if rows else ""
    return f'{{\n  "n": {inst.n},\n  "m": {inst.m},\n  "valuations": [{body}]\n}}\n'


def _parse_valuation(doc, m: int, path: str) -> Valuation:
    if not isinstance(doc, dict):
        raise InstanceError("valuation must be an object", path)
    kind = doc.get("type")
    if kind == "additive":
        vals = doc.get("values")
        if not isinstance(vals, list):
            raise InstanceError("'values' must be a list", f"{path}.values")
        if len(vals) != m:
            raise InstanceError(f"expected {m} values, got {len(vals)}", f"{path}.values")
        try:
            return Valuation.additive(vals)
        except InstanceError as exc:
            raise InstanceError(str(exc), f"{path}.{exc.path}" if exc.path else path) from None
    if kind == "table":
        entries = doc.get("entries")
        if not isinstance(entries, dict):
            raise InstanceError("'entries' must be an object", f"{path}.entries")
        parsed = {}
        for key, x in entries.items():
            kpath = f"{path}.entries[{key!r}]"
            try:
                goods = [int(tok) for tok in key.split(",")] if key.strip() else []
            except ValueError:
                raise InstanceError("key must be comma-joined good indices", kpath) from None
            if len(set(goods)) != len(goods):
                raise InstanceError("duplicate good in key", kpath)
            parsed[tuple(goods)] = to_rational(x, kpath)
        try:
            return Valuation.from_table(parsed, m)
        except InstanceError as exc:
            raise InstanceError(str(exc), f"{path}.entries" + (f"[{exc.path!r}]" if exc.path else "")) from None
    raise InstanceError(f"unknown valuation type {kind!r}", f"{path}.type")


def instance_from_dict(doc) -> Instance:
    if not isinstance(doc, dict):
        raise InstanceError("instance must be a JSON object")
    for key in ("n", "m", "valuations"):
        if key not in doc:
            raise InstanceError("missing field", key)
    n, m, vals = doc["n"], doc["m"], doc["valuations"]
    if isinstance(n, bool) or not isinstance(n, int):
        raise InstanceError("must be an integer", "n")
    if isinstance(m, bool) or not isinstance(m, int) or m < 0:
        raise InstanceError("must be a non-negative integer", "m")
    if not isinstance(vals, list):
        raise InstanceError("must be a list", "valuations")
    parsed = [_parse_valuation(d, m, f"valuations[{i}]") for i, d in enumerate(vals)]
    return Instance(n, m, parsed)


def parse_instance(text: str) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"invalid JSON: {exc}") from None
    return instance_from_dict(doc)


def allocation_from_dict(doc, inst: Instance | None = None) -> Allocation:
    if not isinstance(doc, dict) or not isinstance(doc.get("bundles"), list):
        raise InstanceError("expected an object with a 'bundles' list", "bundles")
    bundles = []
    for i, b in enumerate(doc["bundles"]):
        if not isinstance(b, list):
            raise InstanceError("bundle must be a list", f"bundles[{i}]")
        for j in b:
            if isinstance(j, bool) or not isinstance(j, int):
                raise InstanceError(f"good {j!r} is not an integer", f"bundles[{i}]")
        bundles.append(b)
    alloc = Allocation.of(bundles)
    if inst is not None:
        check_allocation(inst, alloc)
    return alloc


def parse_allocation(text: str, inst: Instance | None = None) -> Allocation:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"invalid JSON: {exc}") from None
    return allocation_from_dict(doc, inst)


def allocation_to_dict(alloc: Allocation) -> dict:
    return {"bundles": alloc.as_lists()}


def serialize_allocation(alloc: Allocation) -> str:
    return json.dumps(allocation_to_dict(alloc)) + "\n"
