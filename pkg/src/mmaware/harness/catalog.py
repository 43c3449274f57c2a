"""Worked instances with their expected verdicts."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..fairness import Criterion, ValueThreshold, check
from ..model import Allocation, Instance, Valuation
from ..partition import SearchBudget, exhaustive_allocation_search, mms_value

EPS = Fraction(1, 2**10)
EPS_TINY = Fraction(1, 2**100)


@dataclass(frozen=True)
class Verdict:
    notion: str
    alpha: Fraction
    allocation: str
    agent: int | None  # None: every agent
    satisfied: bool
    note: str = ""


@dataclass(frozen=True)
class ShareValue:
    agent: int
    k: int
    value: Fraction
    goods: frozenset | None = None  # None: all goods
    note: str = ""


@dataclass(frozen=True)
class Existence:
    criterion: object
    exists: bool
    slow: bool = False
    note: str = ""


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    instance: Instance
    allocations: dict = field(default_factory=dict)
    expected: tuple = ()
    note: str = ""


def crossed_instance(h=100) -> Instance:
    return Instance.additive([[h, 1], [1, h]])


def ef1_gap_instance(n: int) -> Instance:
    """n + 1 identical agents, goods 1..n worth n and goods n+1..2n+1 worth 1."""
    row = [n] * n + [1] * (n + 1)
    return Instance.additive([row] * (n + 1))


def unit_goods_instance(n: int, k: int) -> Instance:
    return Instance.additive([[1] * (k * n - 1)] * n)


def four_agent_matrices(eps=EPS, tiny=EPS_TINY):
    e = eps
    p = [
        [Fraction(7, 8), e**4, 0, Fraction(1, 8) - e**4 - tiny],
        [e**3, Fraction(3, 4), -e**3 + e**2, Fraction(1, 4) - e**2 - tiny],
        [0, -e**4 + e, Fraction(1, 2), Fraction(1, 2) + e**4 - e - tiny],
        [Fraction(1, 8) - e**3, Fraction(1, 4) - e, Fraction(1, 2) + e**3 - e**2, Fraction(1, 8) + e**2 + e + 3 * tiny],
    ]
    q = [
        [Fraction(7, 8), e**4, 0, Fraction(1, 8) - e**4],
        [e**3, Fraction(3, 4), -e**3 + e**2, Fraction(1, 4) - e**2],
        [0, -e**4 + e, Fraction(1, 2), Fraction(1, 2) + e**4 - e],
        [Fraction(1, 8) - e**3 - tiny, Fraction(1, 4) - e - tiny, Fraction(1, 2) + e**3 - e**2 - tiny,
         Fraction(1, 8) + e**2 + e + 3 * tiny],
    ]
    return p, q


def four_agent_instance():
    """Agents 1-2 value goods by matrix P, agents 3-4 by Q.

    Goods are the non-zero cells, numbered row by row; returns the instance
    and the row allocation (agent r gets the goods of row r).
    """
    p, q = four_agent_matrices()
    cells = [(r, c) for r in range(4) for c in range(4) if p[r][c] != 0]
    assert all((q[r][c] != 0) == (p[r][c] != 0) for r in range(4) for c in range(4))
    rows_p = [p[r][c] for r, c in cells]
    rows_q = [q[r][c] for r, c in cells]
    inst = Instance.additive([rows_p, rows_p, rows_q, rows_q])
    rows = Allocation.of([[g + 1 for g, (r, _) in enumerate(cells) if r == row] for row in range(4)])
    return inst, rows


def worked_instances() -> list[CatalogEntry]:
    F = Fraction
    out = []

    out.append(CatalogEntry(
        "two_agents_crossed", crossed_instance(100),
        {"mms": Allocation.of([[2], [1]]), "mma": Allocation.of([[1], [2]])},
        (
            ShareValue(0, 2, F(1)),
            ShareValue(1, 2, F(1)),
            Verdict("mms", F(1), "mms", None, True),
            Verdict("mma", F(1), "mms", 0, False, "each agent sees a far better split of the other bundle"),
            Verdict("mma", F(1), "mms", 1, False),
            Verdict("mma", F(1), "mma", None, True),
            Verdict("prop", F(1), "mma", None, True),
            Verdict("eef", F(1), "mma", None, True),
            Existence(Criterion("mma"), True),
        ),
        "off-diagonal 1, diagonal 100",
    ))

    shares = Valuation.additive([1, F(2, 5), F(2, 5), F(2, 5), F(1, 10), F(1, 10), F(1, 10), F(1, 10)])
    out.append(CatalogEntry(
        "identical_mma_not_mms", Instance(4, 8, [shares] * 4),
        {"S_to_1": Allocation.of([[5, 6, 7, 8], [1], [2], [3, 4]])},
        (
            ShareValue(0, 4, F(1, 2)),
            ShareValue(0, 3, F(2, 5), frozenset({1, 2, 3, 4})),
            Verdict("mms", F(1), "S_to_1", 0, False),
            Verdict("mma", F(1), "S_to_1", 0, True),
            Verdict("prop", F(1), "S_to_1", 0, False, "2/5 of a total 13/5 is below a quarter"),
        ),
        "agents 2-4 copy agent 1's valuation",
    ))

    for n in (2, 3):
        inst = ef1_gap_instance(n)
        ef1 = [[i, n + i] for i in range(1, n + 1)] + [[2 * n + 1]]
        good = [[i] for i in range(1, n + 1)] + [list(range(n + 1, 2 * n + 2))]
        out.append(CatalogEntry(
            f"ef1_gap_n{n}", inst,
            {"ef1": Allocation.of(ef1), "balanced": Allocation.of(good)},
            (
                Verdict("ef1", F(1), "ef1", None, True),
                Verdict("mma1", F(1), "ef1", n, False),
                Verdict("ef", F(1), "balanced", 0, False),
            ),
        ))

    inst4, rows = four_agent_instance()
    out.append(CatalogEntry(
        "four_agents_mma1_not_mms", inst4, {"rows": rows},
        tuple(ShareValue(i, 4, F(1)) for i in range(4))
        + (
            Verdict("mmax", F(1), "rows", None, True),
            Verdict("mma1", F(1), "rows", None, True),
            Verdict("mms", F(1), "rows", 0, False),
            Verdict("mms", F(1), "rows", 1, False),
            Existence(ValueThreshold(1), False, slow=True),
        ),
        "eps = 2^-10, tiny eps = 2^-100",
    ))

    heavy_pair = Valuation.additive([1, 1, F(3, 5), F(2, 5), F(1, 5), F(1, 5), F(1, 5)])
    out.append(CatalogEntry(
        "identical_efx_not_mmax", Instance(3, 7, [heavy_pair] * 3),
        {"efx": Allocation.of([[1], [2, 4], [3, 5, 6, 7]])},
        (
            Verdict("efx", F(1), "efx", 0, True),
            Verdict("mmax", F(1), "efx", 0, False, "dropping good 7 leaves two bundles of 6/5 each"),
        ),
        "agents 2-3 copy agent 1's valuation",
    ))

    for n, k in ((2, 2), (3, 2), (2, 3)):
        out.append(CatalogEntry(
            f"unit_goods_n{n}_k{k}", unit_goods_instance(n, k), {},
            (
                Existence(Criterion("mma"), False),
                Existence(Criterion("mma1"), True),
                Existence(Criterion("mmax"), True),
            ),
        ))

    out.append(CatalogEntry(
        "three_agents_two_goods", Instance.additive([[1, 1]] * 3),
        {"one_empty": Allocation.of([[1], [2], []])},
        (
            Verdict("prop", F(1), "one_empty", 2, False, "the empty-handed agent gets nothing"),
            Verdict("eef", F(1), "one_empty", 2, False),
            Existence(Criterion("prop"), False),
            Existence(Criterion("eef"), False),
        ),
    ))
    return out


def catalog_entry(entry_id: str) -> CatalogEntry:
    for e in worked_instances():
        if e.id == entry_id:
            return e
    raise KeyError(entry_id)


def check_expectation(entry: CatalogEntry, exp, budget: SearchBudget | None = None) -> tuple[bool, str]:
    """Run one expectation; returns ``(reproduced, description)``."""
    inst = entry.instance
    if isinstance(exp, ShareValue):
        goods = inst.goods if exp.goods is None else exp.goods
        got = mms_value(inst.valuations[exp.agent], goods, exp.k, budget)[0]
        return got == exp.value, f"MMS agent {exp.agent + 1} over {sorted(goods)} into {exp.k} = {got} (want {exp.value})"
    if isinstance(exp, Verdict):
        rep = check(inst, entry.allocations[exp.allocation], exp.notion, exp.alpha, budget)
        agents = range(inst.n) if exp.agent is None else [exp.agent]
        ok = all(rep.agent(i).satisfied == exp.satisfied for i in agents)
        who = "all agents" if exp.agent is None else f"agent {exp.agent + 1}"
        return ok, f"{exp.notion}@{exp.alpha} on {exp.allocation}, {who}: want satisfied={exp.satisfied}"
    if isinstance(exp, Existence):
        found, witness = exhaustive_allocation_search(inst, exp.criterion, budget)
        return found == exp.exists, f"exists({exp.criterion}) = {found} (want {exp.exists})"
    raise TypeError(exp)
