"""JSON round-tripping for instances, costs, strategies, and policy trees.

Numbers travel as exact "p/q" strings (never floats), so a round trip is
bit-for-bit.  The loader normalizes: boxes that are constantly zero are
dropped with a warning (the cost is restricted accordingly), and a declared
cost class that the validators can check is re-checked on load -- a file
claiming submodularity for a non-submodular table is rejected, not trusted.
"""
from __future__ import annotations

import hashlib
import json
import warnings
from fractions import Fraction
from typing import IO

from .classes import VALIDATORS, validate_class
from .costs import (
    AdditiveCost,
    BudgetAdditiveCost,
    CostOracle,
    CoverageCost,
    ExplicitCost,
    HardnessCost,
    ProjectionCost,
    TreeClosureCost,
    XosCost,
)
from .errors import ParseError
from .instances import FiniteDistribution, Instance
from .limits import bound
from .rationals import fmt, parse_extended, rat
from .strategies import (
    FixedOrderThresholds,
    ImpulsiveStrategy,
    ImpulsiveWithDummies,
    PolicyTree,
)

FORMAT = "pandora-instance"
VERSION = 1


# ---------------------------------------------------------------------------
# costs
# ---------------------------------------------------------------------------

def cost_to_json(oracle: CostOracle) -> dict:
    return oracle.spec()


def _require(data: dict, key: str, context: str):
    if key not in data:
        raise ParseError(f"{context}: missing field {key!r}")
    return data[key]


def cost_from_json(data: dict) -> CostOracle:
    if not isinstance(data, dict):
        raise ParseError(f"cost must be an object, got {type(data).__name__}")
    kind = _require(data, "kind", "cost")
    try:
        if kind == "explicit":
            table = {}
            for key, value in _require(data, "table", "explicit cost").items():
                labels = tuple(int(part) for part in key.split(",") if part)
                table[labels] = rat(value)
            ground = sorted({b for key in table for b in key})
            return ExplicitCost(table, ground=ground)
        if kind == "additive":
            per_box = {int(b): rat(c) for b, c in _require(data, "per_box", kind).items()}
            return AdditiveCost(per_box)
        if kind == "budget_additive":
            per_box = {int(b): rat(c) for b, c in _require(data, "per_box", kind).items()}
            return BudgetAdditiveCost(per_box, rat(_require(data, "budget", kind)))
        if kind == "coverage":
            elements = [(rat(w), [int(b) for b in group])
                        for w, group in _require(data, "elements", kind)]
            return CoverageCost([int(b) for b in _require(data, "ground", kind)], elements)
        if kind == "xos":
            clauses = [{int(b): rat(w) for b, w in clause.items()}
                       for clause in _require(data, "clauses", kind)]
            return XosCost([int(b) for b in _require(data, "ground", kind)], clauses)
        if kind == "tree":
            parent = {int(b): int(p) for b, p in _require(data, "parent", kind).items()}
            node_costs = {int(b): rat(c)
                          for b, c in _require(data, "node_costs", kind).items()}
            return TreeClosureCost(parent, node_costs)
        if kind == "hardness":
            return HardnessCost(
                int(_require(data, "n", kind)),
                int(_require(data, "alpha", kind)),
                beta=int(data["beta"]) if "beta" in data else None,
                R=[int(b) for b in data["R"]] if "R" in data else None,
            )
        if kind == "projection":
            return ProjectionCost(
                [int(b) for b in _require(data, "ground", kind)],
                {int(b): int(i) for b, i in _require(data, "label_map", kind).items()},
                cost_from_json(_require(data, "inner", kind)),
            )
    except ParseError:
        raise
    except (ValueError, TypeError, AttributeError) as exc:
        raise ParseError(f"malformed {kind} cost: {exc}") from exc
    raise ParseError(f"unknown cost kind {kind!r}")


# ---------------------------------------------------------------------------
# instances
# ---------------------------------------------------------------------------

def instance_to_json(instance: Instance) -> dict:
    return {
        "format": FORMAT,
        "version": VERSION,
        "boxes": [
            {"label": label, "atoms": [[str(v), str(p)] for v, p in box.atoms]}
            for label, box in zip(instance.labels, instance.boxes)
        ],
        "cost": cost_to_json(instance.cost),
        "cost_class": instance.cost_class,
    }


def instance_from_json(data: dict) -> Instance:
    if not isinstance(data, dict):
        raise ParseError(f"instance must be an object, got {type(data).__name__}")
    if data.get("format", FORMAT) != FORMAT:
        raise ParseError(f"not a {FORMAT} document: format = {data.get('format')!r}")
    cost = cost_from_json(_require(data, "cost", "instance"))
    entries = []
    for item in _require(data, "boxes", "instance"):
        label = int(_require(item, "label", "box"))
        try:
            box = FiniteDistribution([(rat(v), rat(p))
                                      for v, p in _require(item, "atoms", "box")])
        except (ValueError, TypeError) as exc:
            raise ParseError(f"box {label}: {exc}") from exc
        entries.append((label, box))
    entries.sort(key=lambda pair: pair[0])
    labels = [label for label, _ in entries]
    if labels != list(cost.ground):
        raise ParseError(f"box labels {labels} do not match cost ground {list(cost.ground)}")

    kept = [(label, box) for label, box in entries if not box.is_constant_zero()]
    if len(kept) < len(entries):
        dropped = sorted(set(labels) - {label for label, _ in kept})
        warnings.warn(f"dropping constant-zero boxes {dropped}", stacklevel=2)
        survivors = [label for label, _ in kept]
        cost = ProjectionCost(survivors, {b: b for b in survivors}, cost)

    cls = data.get("cost_class")
    if cls is not None and cls in VALIDATORS:
        limit = bound("gross_substitutes" if cls == "gross_substitutes" else "validator")
        if cost.arity <= limit:
            report = validate_class(cost, cls)
            if not report.passed:
                raise ParseError(
                    f"declared cost class {cls!r} fails validation: {report.witness}"
                )
        else:
            warnings.warn(
                f"declared class {cls!r} left unchecked (arity {cost.arity} "
                f"exceeds the validator bound {limit})",
                stacklevel=2,
            )
    return Instance([box for _, box in kept], cost, cost_class=cls)


def dumps_instance(instance: Instance, *, indent: int | None = 2) -> str:
    return json.dumps(instance_to_json(instance), indent=indent)


def loads_instance(text: str) -> Instance:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno,
                         column=exc.colno) from exc
    return instance_from_json(data)


def save_instance(instance: Instance, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps_instance(instance))
        fh.write("\n")


def load_instance(source) -> Instance:
    """Load from a path or an open text file."""
    if hasattr(source, "read"):
        return loads_instance(source.read())
    with open(source) as fh:
        return loads_instance(fh.read())


def digest_instance(instance: Instance) -> str:
    canonical = json.dumps(instance_to_json(instance), sort_keys=True,
                           separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# strategies
# ---------------------------------------------------------------------------

def strategy_to_json(strategy) -> dict:
    if isinstance(strategy, ImpulsiveStrategy):
        return {"kind": "impulsive", "order": list(strategy.order)}
    if isinstance(strategy, ImpulsiveWithDummies):
        return {
            "kind": "impulsive_with_dummies",
            "order": list(strategy.order),
            "opened": sorted(strategy.opened),
        }
    if isinstance(strategy, FixedOrderThresholds):
        return {
            "kind": "fixed_order",
            "sigma": list(strategy.sigma),
            "thresholds": [fmt(t) for t in strategy.thresholds],
        }
    if isinstance(strategy, PolicyTree):
        return {"kind": "policy_tree", "root": _tree_to_json(strategy)}
    raise ParseError(f"not a serializable strategy: {type(strategy).__name__}")


def _tree_to_json(node: PolicyTree) -> dict:
    if node.is_halt:
        return {"halt": True}
    return {
        "open": node.box,
        "children": [[str(v), _tree_to_json(sub)] for v, sub in node.children],
    }


def strategy_from_json(data: dict):
    kind = _require(data, "kind", "strategy")
    if kind == "impulsive":
        return ImpulsiveStrategy(tuple(int(b) for b in _require(data, "order", kind)))
    if kind == "impulsive_with_dummies":
        base = ImpulsiveStrategy(tuple(int(b) for b in _require(data, "order", kind)))
        return ImpulsiveWithDummies(base, frozenset(int(b) for b in _require(data, "opened", kind)))
    if kind == "fixed_order":
        return FixedOrderThresholds(
            tuple(int(b) for b in _require(data, "sigma", kind)),
            tuple(parse_extended(t) for t in _require(data, "thresholds", kind)),
        )
    if kind == "policy_tree":
        return _tree_from_json(_require(data, "root", kind))
    raise ParseError(f"unknown strategy kind {kind!r}")


def _tree_from_json(data: dict) -> PolicyTree:
    if data.get("halt"):
        return PolicyTree.halt()
    children = {rat(v): _tree_from_json(sub)
                for v, sub in _require(data, "children", "policy tree node")}
    return PolicyTree.open(int(_require(data, "open", "policy tree node")), children)
