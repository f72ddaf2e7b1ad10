"""Strategy objects and their exact evaluation.

Three nested classes: impulsive tuples (Bernoulli instances; halt on the
first non-zero value), fixed orders with halting thresholds, and fully
adaptive policy trees.  On top of the impulsive layer sit the marginal
utilities u_N / u_Y / u_M and dummy slots -- the combinatorial machinery
behind the impulsive-optimality argument for submodular costs.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .costs import marginal_cost
from .errors import DomainError
from .instances import Instance
from .rationals import Extended, rat

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class ImpulsiveStrategy:
    """An ordered tuple of distinct boxes; empty means "halt immediately"."""

    order: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "order", tuple(self.order))
        if len(set(self.order)) != len(self.order):
            raise DomainError(f"repeated box in impulsive order {self.order}")

    def __len__(self) -> int:
        return len(self.order)

    def __iter__(self):
        return iter(self.order)


@dataclass(frozen=True)
class ImpulsiveWithDummies:
    """An impulsive tuple where only the boxes in `opened` are inspected.

    A slot outside `opened` is a dummy: the strategy halts there with the
    box's probability but never opens the box (so it pays nothing and cannot
    collect the value).  Dummies turn one tuple into a distribution over
    plain impulsive prefixes -- see `dummy_mixture`.
    """

    base: ImpulsiveStrategy
    opened: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "opened", frozenset(self.opened))
        if not self.opened <= set(self.base.order):
            raise DomainError(
                f"opened set {sorted(self.opened)} is not a subset of the order {self.base.order}"
            )

    @property
    def order(self) -> tuple[int, ...]:
        return self.base.order

    def slots(self) -> list[tuple[int, bool]]:
        """(box, is_opened) per slot, in order."""
        return [(b, b in self.opened) for b in self.base.order]


def _as_dummies(strategy) -> ImpulsiveWithDummies:
    if isinstance(strategy, ImpulsiveWithDummies):
        return strategy
    if isinstance(strategy, ImpulsiveStrategy):
        return ImpulsiveWithDummies(strategy, frozenset(strategy.order))
    if isinstance(strategy, (tuple, list)):
        base = ImpulsiveStrategy(tuple(strategy))
        return ImpulsiveWithDummies(base, frozenset(base.order))
    raise DomainError(f"not an impulsive strategy: {strategy!r}")


@dataclass(frozen=True)
class FixedOrderThresholds:
    """Open boxes in order sigma, halting at round i iff the best value so far
    is at least t_i (checked before opening round i's box; the running best
    starts at 0, so t_i = 0 halts on the spot and t_i = inf never halts)."""

    sigma: tuple[int, ...]
    thresholds: tuple[Extended, ...]

    def __post_init__(self):
        object.__setattr__(self, "sigma", tuple(self.sigma))
        object.__setattr__(self, "thresholds", tuple(self.thresholds))
        if len(set(self.sigma)) != len(self.sigma):
            raise DomainError(f"repeated box in sigma {self.sigma}")
        if len(self.thresholds) != len(self.sigma):
            raise DomainError("need exactly one threshold per round")


@dataclass(frozen=True)
class PolicyTree:
    """Halt, or open a box and continue per observed value.

    `children` pairs each atom value of the opened box's distribution with a
    subtree, kept sorted by value for a canonical layout.  box None = Halt.
    """

    box: int | None = None
    children: tuple[tuple[Fraction, "PolicyTree"], ...] = field(default=())

    @staticmethod
    def halt() -> "PolicyTree":
        return PolicyTree()

    @staticmethod
    def open(box: int, children: Mapping) -> "PolicyTree":
        kids = tuple(sorted((rat(v), sub) for v, sub in dict(children).items()))
        return PolicyTree(box, kids)

    @property
    def is_halt(self) -> bool:
        return self.box is None

    def child(self, value: Fraction) -> "PolicyTree":
        for v, sub in self.children:
            if v == value:
                return sub
        raise DomainError(f"no child for observed value {value} under box {self.box}")


@dataclass(frozen=True)
class MarginalUtilityContext:
    """The scenario behind u_N / u_Y / u_M: a Bernoulli root box r that was
    already opened (its cost is sunk), and a set T of further boxes treated
    as already opened for cost purposes."""

    root: int
    T: frozenset[int] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "T", frozenset(self.T))


def _require_bernoulli(instance: Instance) -> None:
    if not instance.is_bernoulli():
        raise DomainError("this operation needs a weighted-Bernoulli instance")


def _check_slots(instance: Instance, order: Sequence[int]) -> None:
    known = set(instance.labels)
    for b in order:
        if b not in known:
            raise DomainError(f"strategy mentions unknown box {b}")


def pq_of(strategy, instance: Instance) -> tuple[Fraction, Fraction]:
    """(p, q) of an impulsive strategy, dummies included.

    p is the probability that some *opened* slot triggers the halt with a
    non-zero value: sum over opened slots j of (prod of q over all earlier
    slots) * p_j.  q is the probability every slot passes: prod of q_i over
    all slots.  Without dummies p + q = 1 (asserted); with dummies p can
    fall short of 1 - q because a dummy may halt the run first.
    """
    _require_bernoulli(instance)
    s = _as_dummies(strategy)
    _check_slots(instance, s.order)
    prefix = ONE
    p = ZERO
    q_all = ONE
    for box, is_open in s.slots():
        wb = instance.bernoulli(box)
        if is_open:
            p += prefix * wb.prob
        prefix *= wb.q
        q_all *= wb.q
    if s.opened == set(s.order):
        assert p + q_all == 1, "p/q cross-check failed on a dummy-free strategy"
    return p, q_all


_KINDS = ("N", "Y", "M")


def marginal_utility(kind: str, strategy, ctx: MarginalUtilityContext,
                     instance: Instance) -> Fraction:
    """u_N / u_Y / u_M of an impulsive strategy given (root r, conditioning T).

    Per-slot expansion: an opened slot j contributes
        (prod of q over all earlier slots) * (p_j * g(v_j) - c(j | {r} u T u P_j))
    where P_j collects the opened boxes before slot j and g is the identity
    (N), (v - v_r)^+ (Y), or v - v_r (M).  Dummy slots only contribute their
    q factor to later prefixes.  The root's own cost is sunk and never
    appears; T may overlap dummy slots (they are never actually opened) but
    not the opened set.
    """
    if kind not in _KINDS:
        raise DomainError(f"kind must be one of {_KINDS}, got {kind!r}")
    _require_bernoulli(instance)
    s = _as_dummies(strategy)
    _check_slots(instance, s.order)
    if ctx.root in set(s.order):
        raise DomainError(f"root box {ctx.root} appears in the strategy")
    if ctx.T & s.opened:
        raise DomainError(
            f"conditioning set overlaps opened boxes on {sorted(ctx.T & s.opened)}"
        )
    v_r = instance.bernoulli(ctx.root).value
    base = {ctx.root} | ctx.T
    prefix = ONE
    total = ZERO
    opened_before: set[int] = set()
    for box, is_open in s.slots():
        wb = instance.bernoulli(box)
        if is_open:
            v = wb.value
            if kind == "N":
                gain = v
            elif kind == "Y":
                gain = max(v - v_r, ZERO)
            else:
                gain = v - v_r
            cost = marginal_cost(instance.cost, {box}, base | opened_before)
            total += prefix * (wb.prob * gain - cost)
            opened_before.add(box)
        prefix *= wb.q
    return total


def dummy_mixture(strategy, instance: Instance) -> list[tuple[ImpulsiveStrategy, Fraction]]:
    """Resolve dummy slots into a distribution over plain impulsive prefixes.

    Flipping all dummy coins up front: the realized strategy is the opened
    boxes before the first dummy that halts (with that joint probability),
    or all opened boxes when no dummy fires.  Equal prefixes are merged, so
    the result is a bona fide distribution (probabilities sum to 1).
    """
    _require_bernoulli(instance)
    s = _as_dummies(strategy)
    _check_slots(instance, s.order)
    outcomes: dict[tuple[int, ...], Fraction] = {}
    order_seen: list[tuple[int, ...]] = []

    def put(prefix_boxes: tuple[int, ...], prob: Fraction) -> None:
        if prob == 0:
            return
        if prefix_boxes not in outcomes:
            outcomes[prefix_boxes] = ZERO
            order_seen.append(prefix_boxes)
        outcomes[prefix_boxes] += prob

    dummy_pass = ONE
    opened: list[int] = []
    for box, is_open in s.slots():
        if is_open:
            opened.append(box)
        else:
            wb = instance.bernoulli(box)
            put(tuple(opened), dummy_pass * wb.prob)
            dummy_pass *= wb.q
    put(tuple(opened), dummy_pass)
    return [(ImpulsiveStrategy(t), outcomes[t]) for t in order_seen]


def eval_impulsive(instance: Instance, strategy) -> Fraction:
    """Expected utility of a plain impulsive strategy on a Bernoulli instance.

    Outcome expansion: halting at slot j (prob q_1..q_{j-1} * p_j) collects
    v_j and pays c(first j boxes); the all-zeros outcome pays for the whole
    tuple and collects nothing.
    """
    _require_bernoulli(instance)
    if isinstance(strategy, ImpulsiveWithDummies):
        raise DomainError("resolve dummies via dummy_mixture before evaluating")
    s = _as_dummies(strategy)
    order = s.order
    _check_slots(instance, order)
    cost = instance.cost
    prefix = ONE
    total = ZERO
    for j, box in enumerate(order):
        wb = instance.bernoulli(box)
        total += prefix * wb.prob * (wb.value - cost.eval(order[: j + 1]))
        prefix *= wb.q
    total -= prefix * cost.eval(order)
    return total


def eval_fixed_order(instance: Instance, s: FixedOrderThresholds) -> Fraction:
    """Exact utility of a fixed-order threshold strategy on any finite instance."""
    if set(s.sigma) != set(instance.labels):
        raise DomainError(f"sigma {s.sigma} is not a permutation of {instance.labels}")
    n = len(s.sigma)
    cost = instance.cost
    memo: dict[tuple[int, Fraction], Fraction] = {}

    def go(i: int, best: Fraction) -> Fraction:
        # expected (final value - remaining cost) on reaching round i with
        # running max `best`, before the round-i halting check
        if i >= n:
            return best
        if best >= s.thresholds[i]:
            return best
        key = (i, best)
        hit = memo.get(key)
        if hit is None:
            box = s.sigma[i]
            marg = cost.eval(s.sigma[: i + 1]) - cost.eval(s.sigma[:i])
            out = -marg
            for v, p in instance.box(box).atoms:
                out += p * go(i + 1, max(best, v))
            memo[key] = hit = out
        return hit

    return go(0, ZERO)


def eval_policy(instance: Instance, tree: PolicyTree) -> Fraction:
    """Exact utility of a policy tree: weight each root-to-leaf path by its
    probability; value is the running max at the leaf, costs accrue as
    marginals when boxes open.  Malformed trees (missing a child for some
    atom, reopening a box) raise DomainError."""

    cost = instance.cost

    def go(node: PolicyTree, opened: frozenset[int], best: Fraction) -> Fraction:
        if node.is_halt:
            return best
        box = node.box
        if box in opened:
            raise DomainError(f"tree reopens box {box}")
        atoms = instance.box(box).atoms  # raises DomainError on unknown labels
        keyed = dict(node.children)
        if set(keyed) != {v for v, _ in atoms}:
            raise DomainError(
                f"children of box {box} cover {sorted(keyed)} but its atoms are "
                f"{[v for v, _ in atoms]}"
            )
        now = frozenset(opened | {box})
        out = -(cost.eval(now) - cost.eval(opened))
        for v, p in atoms:
            out += p * go(keyed[v], now, max(best, v))
        return out

    return go(tree, frozenset(), ZERO)
