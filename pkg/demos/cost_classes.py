"""A field guide to the cost oracles and the complement-free hierarchy.

Additive < gross substitutes < matroid-rank-like < submodular < XOS <
subadditive: each inclusion is strict, and each level has a concrete oracle
here.  Validators decide membership exhaustively (with witnesses on
failure); XOS is the exception -- recognizing it from a value table is
intractable, so the clause list itself is the certificate.

Run:  python3 demos/cost_classes.py
"""
from fractions import Fraction

from pandora.classes import VALIDATORS, validate_class
from pandora.costs import (AdditiveCost, BudgetAdditiveCost, CoverageCost,
                           HardnessCost, QueryCountingOracle, TreeClosureCost,
                           XosCost, marginal_cost)
from pandora.instances import subadditive4

print("The zoo")
print("-------")
zoo = {
    "additive": AdditiveCost({1: 2, 2: Fraction(1, 2), 3: 1}),
    "coverage": CoverageCost(range(1, 4), [(1, [1, 2]), (2, [2, 3]), (1, [3])]),
    "tree closure": TreeClosureCost({1: 0, 2: 1, 3: 1}, {1: 1, 2: 2, 3: 1}),
    "uniform matroid": HardnessCost(3, 2),
    "budget additive": BudgetAdditiveCost({1: 2, 2: 2, 3: 2}, 3),
    "XOS": XosCost(range(1, 4), [{1: 2, 2: 1}, {2: 2, 3: 2}]),
    "capped XOS": subadditive4().cost,
}
for name, cost in zoo.items():
    full = cost.eval(cost.ground)
    singles = ", ".join(str(cost.eval({b})) for b in sorted(cost.ground))
    print(f"  {name:<16} singletons ({singles})  full set {full}")
print()

print("Validator verdicts (exhaustive, witness-producing)")
print("--------------------------------------------------")
cols = ("monotone_normalized", "submodular", "subadditive",
        "matroid_rank", "gross_substitutes")
assert set(cols) == set(VALIDATORS)
print(f"  {'oracle':<16}" + "".join(f"{c[:10]:>12}" for c in cols))
for name, cost in zoo.items():
    row = []
    for cls in cols:
        row.append("yes" if validate_class(cost, cls).passed else "no")
    print(f"  {name:<16}" + "".join(f"{v:>12}" for v in row))
print()

print("A witness, in full")
print("------------------")
rep = validate_class(subadditive4().cost, "submodular")
print(f"  capped-XOS vs submodularity: passed = {rep.passed}")
print(f"  witness: {rep.witness}")
w = rep.witness
c = subadditive4().cost
print(f"  replay: c({w['x']} | {w['A']}) = "
      f"{marginal_cost(c, {w['x']}, w['A'])} but c({w['x']} | {w['B']}) = "
      f"{marginal_cost(c, {w['x']}, w['B'])} -- the marginal grew, which")
print("  submodularity forbids.  Subadditivity still holds (see the table).")
print()

print("Certificates instead of recognition: XOS")
print("----------------------------------------")
g = zoo["XOS"]
ok, witness = g.matches(lambda S: max(
    sum(w for b, w in {1: 2, 2: 1}.items() if b in S),
    sum(w for b, w in {2: 2, 3: 2}.items() if b in S),
    Fraction(0)))
print(f"  the clause list is the certificate; consistency on all subsets: {ok}")
print()

print("Counting queries")
print("----------------")
counted = QueryCountingOracle(zoo["coverage"])
validate_class(counted, "submodular")
print(f"  a full submodularity validation of a 3-box coverage cost touches")
print(f"  the oracle {counted.count} times (every evaluation counts; no cache).")
