"""Command-line front end.

Exit codes: 0 success / satisfied / exists, 1 violated / does not exist,
2 usage or input error, 3 search budget exhausted.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction

from .algorithms import (
    GUARANTEE_CHECKS,
    allocate_identical_leximin,
    allocate_matching,
    allocate_three_agents,
)
from .fairness import NOTIONS, Criterion, ValueThreshold, check
from .model import (
    InstanceError,
    allocation_to_dict,
    format_rational,
    instance_to_dict,
    parse_allocation,
    parse_instance,
    serialize_instance,
)
from .partition import (
    DEFAULT_MAX_NODES,
    BudgetExhausted,
    SearchBudget,
    exhaustive_allocation_search,
    leximin_partition,
    minimax_partition,
    mms_value,
)

EXIT_OK, EXIT_NO, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _instance(args):
    if not args.instance:
        raise UsageError("--instance is required")
    return parse_instance(_read(args.instance))


def _budget(args) -> SearchBudget:
    return SearchBudget(args.max_nodes)


def _goods(spec: str | None, inst) -> list[int]:
    if spec is None:
        return sorted(inst.goods)
    try:
        goods = [int(tok) for tok in spec.split(",") if tok.strip()]
    except ValueError:
        raise UsageError("--goods must be comma-separated good indices") from None
    bad = [g for g in goods if not 1 <= g <= inst.m]
    if bad:
        raise UsageError(f"goods out of range 1..{inst.m}: {bad}")
    return goods


def _agent(args, inst) -> int:
    if args.agent is None:
        raise UsageError("--agent is required")
    if not 1 <= args.agent <= inst.n:
        raise UsageError(f"--agent must lie in 1..{inst.n}")
    return args.agent - 1


def _check_spec(notion: str, alpha) -> dict:
    return {"notion": notion, "alpha": format_rational(Fraction(alpha))}


# --------------------------------------------------------------------------
# subcommands; each returns (document, exit code)

def cmd_solve(args):
    inst = _instance(args)
    doc: dict = {"algorithm": args.algo}
    if args.algo == "matching":
        result = allocate_matching(inst)
        alloc = result.allocation
        doc["guarantee"] = result.guarantee
        doc["checks"] = [_check_spec(*GUARANTEE_CHECKS[result.guarantee])]
        if args.trace:
            doc["trace"] = result.trace_dict()
    elif args.algo == "three-agents":
        trace: list = []
        alloc = allocate_three_agents(inst, _budget(args), trace)
        doc["checks"] = [_check_spec("mma1", 1)]
        if args.trace:
            doc["trace"] = trace
    else:
        v = inst.valuations[0]
        if any(w != v for w in inst.valuations):
            raise UsageError("identical-leximin needs every agent to share one valuation")
        alloc = allocate_identical_leximin(v, inst.n, _budget(args))
        flags = v.classify()
        checks = []
        if flags.submodular:
            checks.append(_check_spec("mma1", 1))
        if flags.subadditive and flags.strictly_increasing:
            checks.append(_check_spec("mmax", 1))
        doc["checks"] = checks
    doc["allocation"] = allocation_to_dict(alloc)
    return doc, EXIT_OK


def cmd_check(args):
    inst = _instance(args)
    if not args.allocation:
        raise UsageError("--allocation is required")
    if not args.notion:
        raise UsageError("--notion is required")
    alloc = parse_allocation(_read(args.allocation), inst)
    report = check(inst, alloc, args.notion, args.alpha, _budget(args))
    return report.to_dict(), EXIT_OK if report.satisfied else EXIT_NO


def _solver_args(args):
    inst = _instance(args)
    i = _agent(args, inst)
    k = args.k if args.k is not None else inst.n
    if k < 1:
        raise UsageError("--k must be at least 1")
    return inst.valuations[i], _goods(args.goods, inst), k, {"agent": i + 1, "k": k}


def cmd_mms(args):
    v, goods, k, doc = _solver_args(args)
    value, part = mms_value(v, goods, k, _budget(args))
    doc.update(goods=goods, value=format_rational(value), **part.to_dict())
    return doc, EXIT_OK


def cmd_leximin(args):
    v, goods, k, doc = _solver_args(args)
    part = leximin_partition(v, goods, k, _budget(args))
    doc.update(goods=goods, value=format_rational(part.value_vector[0]), **part.to_dict())
    return doc, EXIT_OK


def cmd_minimax(args):
    v, goods, k, doc = _solver_args(args)
    value, part = minimax_partition(v, goods, k, _budget(args))
    doc.update(goods=goods, value=format_rational(value), **part.to_dict())
    return doc, EXIT_OK


def cmd_search(args):
    inst = _instance(args)
    if args.min_value is not None:
        crit = ValueThreshold(args.min_value)
    elif args.notion:
        crit = Criterion(args.notion, args.alpha)
    else:
        raise UsageError("--notion or --min-value is required")
    budget = _budget(args)
    found, alloc = exhaustive_allocation_search(inst, crit, budget)
    doc = {"criterion": repr(crit), "exists": found, "nodes": budget.nodes,
           "allocation": allocation_to_dict(alloc) if alloc is not None else None}
    return doc, EXIT_OK if found else EXIT_NO


def cmd_gen(args):
    from .harness.generators import TrialConfig, generate_instance

    if args.seed is None:
        raise UsageError("--seed is required")
    if args.n is None or args.m is None:
        raise UsageError("--n and --m are required")
    try:
        cfg = TrialConfig(args.valuation_class, args.n, args.m, seed=args.seed, distribution=args.distribution)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return instance_to_dict(generate_instance(cfg, args.index)), EXIT_OK


def cmd_verify(args):
    from .harness.verify import run_suite, suite_ids

    if args.seed is None:
        raise UsageError("--seed is required")
    if not args.claim:
        raise UsageError("--claim is required; one of: " + ", ".join(suite_ids() + ["all"]))
    ids = [c for c in suite_ids() if c != "catalog_slow"] if args.claim == "all" else [args.claim]
    reports = []
    for cid in ids:
        try:
            reports.append(run_suite(cid, args.seed, args.trials))
        except KeyError:
            raise UsageError(f"unknown claim {cid!r}; one of: " + ", ".join(suite_ids() + ["all"])) from None
    doc = {"seed": args.seed, "claims": [r.to_dict() for r in reports]}
    return doc, EXIT_OK if all(r.ok for r in reports) else EXIT_NO


def cmd_examples(args):
    from .harness.catalog import catalog_entry, worked_instances
    from .harness.fixtures import write_fixtures

    if args.write:
        return {"written": [str(p) for p in write_fixtures(args.write)]}, EXIT_OK
    if not args.dump:
        return {"examples": [{"id": e.id, "n": e.instance.n, "m": e.instance.m,
                              "allocations": sorted(e.allocations), "note": e.note}
                             for e in worked_instances()]}, EXIT_OK
    try:
        entry = catalog_entry(args.dump)
    except KeyError:
        raise UsageError(f"unknown example {args.dump!r}") from None
    if args.allocation_name:
        if args.allocation_name not in entry.allocations:
            raise UsageError(f"{args.dump} has no allocation {args.allocation_name!r}")
        return allocation_to_dict(entry.allocations[args.allocation_name]), EXIT_OK
    return instance_to_dict(entry.instance), EXIT_OK


# --------------------------------------------------------------------------

def _human(doc, indent: int = 0) -> list[str]:
    """Readable rendering derived from the JSON document."""
    pad = "  " * indent
    lines = []
    if isinstance(doc, dict):
        for key, val in doc.items():
            if isinstance(val, (dict, list)) and val and any(isinstance(x, (dict, list)) for x in
                                                             (val.values() if isinstance(val, dict) else val)):
                lines.append(f"{pad}{key}:")
                lines.extend(_human(val, indent + 1))
            else:
                lines.append(f"{pad}{key}: {json.dumps(val)}")
    elif isinstance(doc, list):
        for item in doc:
            if isinstance(item, dict):
                sub = _human(item, indent + 1)
                lines.append(f"{pad}- " + sub[0].strip())
                lines.extend(sub[1:])
            else:
                lines.append(f"{pad}- {json.dumps(item)}")
    else:
        lines.append(f"{pad}{json.dumps(doc)}")
    return lines


def _emit(args, doc) -> None:
    if args.json:
        print(json.dumps(doc, indent=2))
        return
    if args.command in ("mms", "leximin", "minimax"):
        print(doc["value"])
    if args.command == "gen" or (args.command == "examples" and args.dump):
        if "bundles" in doc:
            print(json.dumps(doc), end="\n")
        else:
            print(serialize_instance(parse_instance(json.dumps(doc))), end="")
        return
    print("\n".join(_human(doc)))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--instance", metavar="PATH", help="instance JSON file")
    common.add_argument("--json", action="store_true", help="print the JSON document")
    common.add_argument("--max-nodes", type=int, default=DEFAULT_MAX_NODES, help="search node budget")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="mmaware", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common], help="run an allocation algorithm")
    p.add_argument("--algo", choices=["matching", "three-agents", "identical-leximin"], default="matching")
    p.add_argument("--trace", action="store_true", help="include the round-by-round trace")

    p = sub.add_parser("check", parents=[common], help="check an allocation against a fairness notion")
    p.add_argument("--allocation", metavar="PATH")
    p.add_argument("--notion", choices=NOTIONS)
    p.add_argument("--alpha", default="1", help="approximation factor, e.g. 1/2")

    for name, text in (("mms", "maximin share"), ("leximin", "leximin partition"),
                       ("minimax", "minimax partition")):
        p = sub.add_parser(name, parents=[common], help=f"{text} of one agent")
        p.add_argument("--agent", type=int, help="1-based agent index")
        p.add_argument("--k", type=int, help="number of parts (default: n)")
        p.add_argument("--goods", help="comma-separated goods (default: all)")

    p = sub.add_parser("search", parents=[common], help="does some allocation satisfy a notion?")
    p.add_argument("--notion", choices=NOTIONS)
    p.add_argument("--alpha", default="1")
    p.add_argument("--min-value", help="instead of a notion: every agent values her bundle at least this")

    p = sub.add_parser("gen", parents=[common], help="generate a random instance")
    p.add_argument("--seed", type=int)
    p.add_argument("--class", dest="valuation_class", default="additive")
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--index", type=int, default=0)
    p.add_argument("--distribution", default="rational", choices=["rational", "small-int"])

    p = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p.add_argument("--claim")
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)

    p = sub.add_parser("examples", parents=[common], help="list or dump the worked instances")
    p.add_argument("--dump", metavar="ID")
    p.add_argument("--allocation-name", metavar="NAME")
    p.add_argument("--write", metavar="DIR", help="write every fixture file into DIR")
    return parser


COMMANDS = {
    "solve": cmd_solve, "check": cmd_check, "mms": cmd_mms, "leximin": cmd_leximin,
    "minimax": cmd_minimax, "search": cmd_search, "gen": cmd_gen, "verify": cmd_verify,
    "examples": cmd_examples,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        doc, code = COMMANDS[args.command](args)
    except (UsageError, InstanceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExhausted as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    _emit(args, doc)
    return code


def main() -> None:
    sys.exit(run())
