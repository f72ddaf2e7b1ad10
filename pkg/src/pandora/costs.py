"""Cost oracles: set functions c : 2^ground -> Q>=0 queried by evaluation.

Every concrete family is normalized (c(empty) = 0) and monotone, either by
construction (additive, coverage, ...) or by eager table validation
(ExplicitCost).  Oracles are immutable after construction and safe for
concurrent read-only use; the memo table may be racily filled from several
threads, which is harmless because values are deterministic.
"""
from __future__ import annotations

import itertools
import threading
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .errors import DomainError
from .limits import guard
from .rationals import rat

BoxSet = frozenset[int]

ZERO = Fraction(0)


def _boxset(boxes: Iterable[int]) -> BoxSet:
    return boxes if isinstance(boxes, frozenset) else frozenset(boxes)


class CostOracle:
    """Base class for all cost functions.

    `ground` is the sorted tuple of box labels the oracle is defined on.  The
    default labelling of an n-box instance is 1..n, but transformed oracles may
    use other labels (the XOS lift adds a box 0, the Bernoullification
    relabels copies).  Subclasses implement `_value(S)`; evaluation is
    memoized unless the subclass turns `memoize` off (cheap closed forms,
    wrappers).
    """

    memoize = True

    def __init__(self, ground: Iterable[int]):
        labels = tuple(sorted(ground))
        if len(set(labels)) != len(labels):
            raise DomainError(f"duplicate box labels: {labels}")
        if any(not isinstance(b, int) or isinstance(b, bool) for b in labels):
            raise DomainError(f"box labels must be ints: {labels}")
        self.ground = labels
        self._members = frozenset(labels)
        self._memo: dict[BoxSet, Fraction] = {}

    @property
    def arity(self) -> int:
        return len(self.ground)

    def eval(self, boxes: Iterable[int]) -> Fraction:
        S = _boxset(boxes)
        if not S <= self._members:
            raise DomainError(
                f"boxes {sorted(S - self._members)} outside ground set {self.ground}"
            )
        if not self.memoize:
            return self._value(S)
        hit = self._memo.get(S)
        if hit is None:
            hit = self._memo[S] = self._value(S)
        return hit

    def _value(self, S: BoxSet) -> Fraction:
        raise NotImplementedError

    def spec(self) -> dict:
        """JSON-ready description ({"kind": ..., ...}); see serialize module."""
        raise NotImplementedError(f"{type(self).__name__} has no serial form")


def eval_cost(oracle: CostOracle, S: Iterable[int]) -> Fraction:
    """Cost of opening exactly the boxes in S."""
    return oracle.eval(S)


def marginal_cost(oracle: CostOracle, S: Iterable[int], T: Iterable[int]) -> Fraction:
    """c(S | T) = c(S u T) - c(T); S and T must be disjoint."""
    S, T = _boxset(S), _boxset(T)
    if S & T:
        raise DomainError(f"marginal sets overlap on {sorted(S & T)}")
    return oracle.eval(S | T) - oracle.eval(T)


class ExplicitCost(CostOracle):
    """A full 2^n table.  Construction rejects bad tables immediately.

    `table` maps subsets (any iterable of labels; hashability not required) to
    rational costs and must contain every one of the 2^n subsets of the
    inferred ground set.  Normalization and monotonicity are checked eagerly
    rather than at query time, so a constructed ExplicitCost is trustworthy.
    """

    def __init__(self, table: Mapping, ground: Iterable[int] | None = None):
        entries: dict[BoxSet, Fraction] = {}
        for key, cost in table.items():
            entries[_boxset(key)] = rat(cost)
        if ground is None:
            inferred: set[int] = set()
            for key in entries:
                inferred |= key
            ground = inferred
        super().__init__(ground)
        n = self.arity
        if len(entries) != 1 << n:
            raise DomainError(
                f"table has {len(entries)} entries, need 2^{n} = {1 << n}"
            )
        empty = entries.get(frozenset())
        if empty is None:
            raise DomainError("table is missing the empty set")
        if empty != 0:
            raise DomainError(f"not normalized: c(empty) = {empty}")
        # monotonicity via single-element extensions; covers the full order
        for key, cost in entries.items():
            if cost < 0:
                raise DomainError(f"negative cost {cost} at {sorted(key)}")
            for b in self.ground:
                if b in key:
                    continue
                bigger = entries.get(key | {b})
                if bigger is None:
                    raise DomainError(f"table is missing subset {sorted(key | {b})}")
                if bigger < cost:
                    raise DomainError(
                        f"not monotone: c({sorted(key)}) = {cost} > "
                        f"c({sorted(key | {b})}) = {bigger}"
                    )
        self._table = entries

    def _value(self, S: BoxSet) -> Fraction:
        return self._table[S]

    def spec(self) -> dict:
        keys = sorted(self._table, key=lambda k: (len(k), sorted(k)))
        return {
            "kind": "explicit",
            "table": {",".join(str(b) for b in sorted(k)): str(self._table[k]) for k in keys},
        }


class AdditiveCost(CostOracle):
    """c(S) = sum of per-box costs."""

    memoize = False

    def __init__(self, per_box: Mapping[int, object] | Sequence[object]):
        if isinstance(per_box, Mapping):
            weights = {b: rat(c) for b, c in per_box.items()}
        else:
            weights = {i + 1: rat(c) for i, c in enumerate(per_box)}
        for b, c in weights.items():
            if c < 0:
                raise DomainError(f"negative cost {c} for box {b}")
        super().__init__(weights)
        self.per_box = weights

    def _value(self, S: BoxSet) -> Fraction:
        return sum((self.per_box[b] for b in S), ZERO)

    def spec(self) -> dict:
        return {"kind": "additive", "per_box": {str(b): str(self.per_box[b]) for b in self.ground}}


class BudgetAdditiveCost(CostOracle):
    """c(S) = min(budget, sum of per-box costs)."""

    memoize = False

    def __init__(self, per_box: Mapping[int, object] | Sequence[object], budget: object):
        if isinstance(per_box, Mapping):
            weights = {b: rat(c) for b, c in per_box.items()}
        else:
            weights = {i + 1: rat(c) for i, c in enumerate(per_box)}
        B = rat(budget)
        if B < 0:
            raise DomainError(f"negative budget {B}")
        for b, c in weights.items():
            if c < 0:
                raise DomainError(f"negative cost {c} for box {b}")
        super().__init__(weights)
        self.per_box = weights
        self.budget = B

    def _value(self, S: BoxSet) -> Fraction:
        return min(self.budget, sum((self.per_box[b] for b in S), ZERO))

    def spec(self) -> dict:
        return {
            "kind": "budget_additive",
            "per_box": {str(b): str(self.per_box[b]) for b in self.ground},
            "budget": str(self.budget),
        }


class CoverageCost(CostOracle):
    """c(S) = sum over elements e of w(e) * 1{S covers e}.

    An element is a (weight, group) pair; S covers e when it intersects e's
    group.  Weighted coverage functions are submodular, which is what the
    random-instance generators lean on.
    """

    def __init__(self, ground: Iterable[int], elements: Iterable[tuple[object, Iterable[int]]]):
        super().__init__(ground)
        elems = []
        for w, group in elements:
            weight = rat(w)
            if weight < 0:
                raise DomainError(f"negative element weight {weight}")
            g = _boxset(group)
            if not g <= self._members:
                raise DomainError(f"cover group {sorted(g)} outside ground {self.ground}")
            elems.append((weight, g))
        self.elements = tuple(elems)

    def _value(self, S: BoxSet) -> Fraction:
        return sum((w for w, g in self.elements if S & g), ZERO)

    def spec(self) -> dict:
        return {
            "kind": "coverage",
            "ground": list(self.ground),
            "elements": [[str(w), sorted(g)] for w, g in self.elements],
        }


class XosCost(CostOracle):
    """Max over additive clauses: c(S) = max_t sum_{i in S} a_t(i).

    Requires at least one clause; all clause weights must be >= 0, which
    makes the max monotone and normalized for free.  There is no validator
    that discovers XOS structure from a bare table -- the clause list IS the
    certificate, and `matches()` checks it against a reference function.
    """

    def __init__(self, ground: Iterable[int], clauses: Sequence[Mapping[int, object]]):
        super().__init__(ground)
        if not clauses:
            raise DomainError("an XOS cost needs at least one clause")
        store = []
        for t, clause in enumerate(clauses):
            weights = {}
            for b, w in clause.items():
                if b not in self._members:
                    raise DomainError(f"clause {t} mentions unknown box {b}")
                weight = rat(w)
                if weight < 0:
                    raise DomainError(f"clause {t} has negative weight {weight} on box {b}")
                if weight:
                    weights[b] = weight
            store.append(weights)
        self.clauses = tuple(store)

    def _value(self, S: BoxSet) -> Fraction:
        best = ZERO
        for clause in self.clauses:
            total = sum((w for b, w in clause.items() if b in S), ZERO)
            if total > best:
                best = total
        return best

    def matches(self, reference: Callable[[BoxSet], Fraction]) -> tuple[bool, BoxSet | None]:
        """Certificate consistency: max-of-clauses == reference on every subset.

        Returns (True, None) or (False, witness subset).  Exponential in the
        ground size, guarded accordingly.
        """
        guard("validator", self.arity)
        for r in range(self.arity + 1):
            for combo in itertools.combinations(self.ground, r):
                S = frozenset(combo)
                if self.eval(S) != reference(S):
                    return False, S
        return True, None

    def spec(self) -> dict:
        return {
            "kind": "xos",
            "ground": list(self.ground),
            "clauses": [{str(b): str(w) for b, w in sorted(c.items())} for c in self.clauses],
        }


class TreeClosureCost(CostOracle):
    """Cost of the minimal root-connected superset in a precedence tree.

    The tree lives on nodes {0} u ground with root 0 (cost 0): opening a box
    means paying for every node on its path to the root that has not been
    paid for yet, so c(S) = sum of node costs over closure(S).
    """

    def __init__(self, parent: Mapping[int, int], node_costs: Mapping[int, object]):
        nodes = set(parent)
        if 0 in nodes:
            raise DomainError("the root 0 must not have a parent entry")
        super().__init__(nodes)
        self.parent = dict(parent)
        costs = {0: ZERO}
        for b in nodes:
            costs[b] = rat(node_costs.get(b, 0))
            if costs[b] < 0:
                raise DomainError(f"negative node cost at {b}")
        if rat(node_costs.get(0, 0)) != 0:
            raise DomainError("the root's cost must be 0")
        self.node_costs = costs
        # reject cycles / dangling parents by walking every node to the root
        for b in nodes:
            seen = set()
            cur = b
            while cur != 0:
                if cur in seen:
                    raise DomainError(f"cycle through node {cur}")
                seen.add(cur)
                if cur not in self.parent:
                    raise DomainError(f"node {cur} is disconnected from the root")
                cur = self.parent[cur]

    def closure(self, S: Iterable[int]) -> BoxSet:
        """Union of root paths of the nodes in S; always contains the root."""
        S = _boxset(S)
        if not S <= self._members:
            raise DomainError(f"nodes {sorted(S - self._members)} not in the tree")
        out = {0}
        for b in S:
            cur = b
            while cur not in out:
                out.add(cur)
                cur = self.parent[cur]
        return frozenset(out)

    def _value(self, S: BoxSet) -> Fraction:
        return sum((self.node_costs[b] for b in self.closure(S)), ZERO)

    def spec(self) -> dict:
        return {
            "kind": "tree",
            "parent": {str(b): self.parent[b] for b in self.ground},
            "node_costs": {str(b): str(self.node_costs[b]) for b in self.ground},
        }


def closure(tree: TreeClosureCost, S: Iterable[int]) -> BoxSet:
    """Minimal connected node set containing S and the root."""
    return tree.closure(S)


class HardnessCost(CostOracle):
    """The query-complexity family: capped cardinality with an optional planted set.

    Baseline:  c0(S)  = min(|S|, alpha).
    Planted:   c_R(S) = min(|S|, alpha, beta + |S - R|)  for |R| = alpha.

    Both are matroid rank functions.  They agree on every S intersecting R
    in at most beta boxes, which is what makes the planted set hard to find
    by cost queries.  Evaluation is a closed form; no memoization (the
    experiment harness queries millions of large random sets).
    """

    memoize = False

    def __init__(self, n: int, alpha: int, beta: int | None = None, R: Iterable[int] | None = None):
        if n < 1:
            raise DomainError(f"need n >= 1, got {n}")
        if not 1 <= alpha <= n:
            raise DomainError(f"need 1 <= alpha <= n, got alpha = {alpha}")
        if beta is not None and not 0 < beta < alpha:
            raise DomainError(f"need 0 < beta < alpha, got beta = {beta}")
        super().__init__(range(1, n + 1))
        self.n = n
        self.alpha = alpha
        self.beta = beta
        if R is None:
            self.R = None
        else:
            if beta is None:
                raise DomainError("a planted set needs beta")
            R = _boxset(R)
            if not R <= self._members:
                raise DomainError("planted set outside 1..n")
            if len(R) != alpha:
                raise DomainError(f"planted set must have exactly alpha = {alpha} boxes, got {len(R)}")
            self.R = R

    def _value(self, S: BoxSet) -> Fraction:
        cap = min(len(S), self.alpha)
        if self.R is not None:
            cap = min(cap, self.beta + len(S - self.R))
        return Fraction(cap)

    def spec(self) -> dict:
        out: dict = {"kind": "hardness", "n": self.n, "alpha": self.alpha}
        if self.beta is not None:
            out["beta"] = self.beta
        if self.R is not None:
            out["R"] = sorted(self.R)
        return out


class MarginalOracle(CostOracle):
    """c(. | T) as an oracle on ground(inner) - T; normalized and monotone."""

    memoize = False

    def __init__(self, inner: CostOracle, T: Iterable[int]):
        T = _boxset(T)
        if not T <= inner._members:
            raise DomainError(f"conditioning set {sorted(T)} outside {inner.ground}")
        super().__init__(inner._members - T)
        self.inner = inner
        self.T = T
        self._base = inner.eval(T)

    def _value(self, S: BoxSet) -> Fraction:
        return self.inner.eval(S | self.T) - self._base


class ProjectionCost(CostOracle):
    """Pull a cost back through a relabelling: c'(S) = inner(image of S).

    `label_map` sends each new label to an inner label and may be
    many-to-one, in which case a second copy of an already-present box is
    free -- exactly the lifted-cost behavior the Bernoulli transformation
    needs.  With an injective map this is a plain restriction/renumbering.
    """

    memoize = False

    def __init__(self, ground: Iterable[int], label_map: Mapping[int, int], inner: CostOracle):
        super().__init__(ground)
        missing = self._members - set(label_map)
        if missing:
            raise DomainError(f"label map misses {sorted(missing)}")
        image = {label_map[b] for b in self._members}
        if not image <= inner._members:
            raise DomainError("label map leaves the inner ground set")
        self.label_map = {b: label_map[b] for b in self.ground}
        self.inner = inner

    def _value(self, S: BoxSet) -> Fraction:
        return self.inner.eval({self.label_map[b] for b in S})

    def spec(self) -> dict:
        return {
            "kind": "projection",
            "ground": list(self.ground),
            "label_map": {str(b): self.label_map[b] for b in self.ground},
            "inner": self.inner.spec(),
        }


class QueryCountingOracle(CostOracle):
    """Forwarding wrapper that tallies every eval call.

    Never caches (a cache would hide repeat queries from the tally); the
    count is exact under concurrent use thanks to a lock.
    """

    memoize = False

    def __init__(self, inner: CostOracle):
        super().__init__(inner.ground)
        self.inner = inner
        self._count = 0
        self._lock = threading.Lock()

    @property
    def count(self) -> int:
        return self._count

    def _value(self, S: BoxSet) -> Fraction:
        with self._lock:
            self._count += 1
        return self.inner.eval(S)


def with_counter(oracle: CostOracle) -> QueryCountingOracle:
    """Wrap an oracle so every evaluation is counted; the count starts at 0."""
    return QueryCountingOracle(oracle)


def xos_lift(f: CostOracle) -> XosCost:
    """Lift a monotone normalized f on X to an XOS g on {0} u X.

    g(S) = |X| * f(X) * 1{S nonempty} + f(S & X), realized by one clause per
    nonempty S <= X putting (|X|*f(X) + f(S)) / |S| on each box of S, plus a
    clause putting |X|*f(X) on the fresh box 0.  The marginal of g at {0} is
    exactly f, so any instance-level properties of f survive the lift while
    g itself stops being submodular in interesting cases.

    Tabulates all of f, so it shares the validator size guard.  Raises if f
    turns out not to be monotone (checked during tabulation).
    """
    n = f.arity
    guard("xos_lift", n)
    if 0 in f._members:
        raise DomainError("lift needs the label 0 to be free")
    X = f._members
    fX = f.eval(X)
    big = n * fX
    clauses: list[dict[int, Fraction]] = [{0: big}]
    values: dict[BoxSet, Fraction] = {}
    for r in range(n + 1):
        for combo in itertools.combinations(f.ground, r):
            S = frozenset(combo)
            values[S] = f.eval(S)
            if S:
                share = (big + values[S]) / len(S)
                clauses.append({b: share for b in S})
    # monotonicity of f feeds directly into the lift's correctness; verify
    for S, cost in values.items():
        for b in X - S:
            if values[S | {b}] < cost:
                raise DomainError(
                    f"lifted function must be monotone; violated at "
                    f"{sorted(S)} + {b}"
                )
    g = XosCost(sorted(X | {0}), clauses)
    if n <= 6:
        # the clause construction provably reproduces the formula; keep the
        # self-check where it costs nothing (it is quadratic in the 2^n
        # clause count, so only at toy sizes)
        ok, witness = g.matches(lambda S: (big if S else ZERO) + values[S - {0}])
        if not ok:
            raise AssertionError(f"XOS lift certificate broken at {sorted(witness)}")
    return g
