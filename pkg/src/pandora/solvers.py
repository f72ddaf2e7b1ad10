"""Exact optimal solvers per strategy class, plus the adaptivity-gap report.

All solvers are exhaustive and exact:

* adaptive: subset/running-max dynamic program (2^n * |support| states);
* fixed order with thresholds: per-permutation backward recursion, maximized
  over all n! permutations;
* impulsive: ordered-subset enumeration (Bernoulli instances);
* weitzman: the classical descending reservation-value rule, additive costs
  only, used as an independent cross-check of the DP.

Utilities are Fractions end to end; "strictly positive utility" always means
an exact comparison.
"""
from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .costs import AdditiveCost
from .errors import DomainError
from .instances import FiniteDistribution, Instance, support_union
from .limits import guard
from .rationals import INF, Extended, rat
from .strategies import (
    FixedOrderThresholds,
    ImpulsiveStrategy,
    PolicyTree,
    eval_fixed_order,
    eval_impulsive,
)

ZERO = Fraction(0)


def _mask_sets(labels: tuple[int, ...]) -> list[frozenset[int]]:
    n = len(labels)
    return [
        frozenset(labels[i] for i in range(n) if mask >> i & 1)
        for mask in range(1 << n)
    ]


def optimal_adaptive(instance: Instance) -> tuple[Fraction, PolicyTree]:
    """Optimum over all deterministic adaptive strategies, with a witness tree.

    State: (opened set, running max x).  Accounting is incremental -- the
    final collected value equals the sum of the increments (v - x)^+ observed
    along the way, since the running max telescopes from 0 to its final
    value.  Hence

        W(S, x) = max(0, max_{i not in S} [ -c(i|S)
                    + sum_v p_v ((v - x)^+ + W(S u {i}, max(x, v))) ])

    and the utility is W(empty, 0).  x only ever takes support values (plus
    0), so the state space is finite and the recursion exact.  Witness tree
    tie-breaks: Halt whenever W = 0; otherwise the smallest-labelled
    maximizing box.
    """
    guard("adaptive", instance.n)
    labels = instance.labels
    n = instance.n
    atoms = [instance.box(b).atoms for b in labels]
    cost = instance.cost
    sets = _mask_sets(labels)
    memo: dict[tuple[int, Fraction], Fraction] = {}

    def W(mask: int, x: Fraction) -> Fraction:
        key = (mask, x)
        hit = memo.get(key)
        if hit is not None:
            return hit
        best = ZERO
        base = cost.eval(sets[mask])
        for i in range(n):
            if mask >> i & 1:
                continue
            nxt = mask | 1 << i
            val = base - cost.eval(sets[nxt])  # == -marginal cost of box i
            for v, p in atoms[i]:
                gain = v - x if v > x else ZERO
                val += p * (gain + W(nxt, v if v > x else x))
            if val > best:
                best = val
        memo[key] = best
        return best

    def build(mask: int, x: Fraction) -> PolicyTree:
        target = W(mask, x)
        if target == 0:
            return PolicyTree.halt()
        base = cost.eval(sets[mask])
        chosen, chosen_val = None, ZERO
        for i in range(n):
            if mask >> i & 1:
                continue
            nxt = mask | 1 << i
            val = base - cost.eval(sets[nxt])
            for v, p in atoms[i]:
                gain = v - x if v > x else ZERO
                val += p * (gain + W(nxt, v if v > x else x))
            if chosen is None or val > chosen_val:
                chosen, chosen_val = i, val
        assert chosen is not None and chosen_val == target
        children = {
            v: build(mask | 1 << chosen, v if v > x else x)
            for v, _ in atoms[chosen]
        }
        return PolicyTree.open(labels[chosen], children)

    utility = W(0, ZERO)
    return utility, build(0, ZERO)


def _threshold_dp(instance: Instance, sigma: tuple[int, ...],
                  grid: tuple[Fraction, ...]) -> tuple[tuple[Extended, ...], Fraction]:
    """Backward recursion f_i over the support grid for one permutation.

    f_{n+1} = 0;  f_i(x) = max(0, sum_v p_v [ (v-x)^+ + f_{i+1}(max(v,x)) ]
                                 - c(sigma_i | sigma_1..sigma_{i-1})).

    t_i is the least grid x with f_i(x) = 0.  On-grid thresholds lose
    nothing: the running max only takes grid values, so "best >= t" behaves
    identically to "best >= (least grid value >= t)", and a least grid zero
    of f_i always exists because f_i(max grid) = 0 (no excess above the top
    value, and costs are nonnegative, by downward induction on i).  f_i is
    non-increasing and 1-Lipschitz in x, which the property tests exercise.
    """
    n = len(sigma)
    cost = instance.cost
    boxes = [instance.box(b) for b in sigma]
    nxt: dict[Fraction, Fraction] = {x: ZERO for x in grid}
    thresholds: list[Extended] = [INF] * n
    utility = ZERO
    for i in range(n - 1, -1, -1):
        marg = cost.eval(sigma[: i + 1]) - cost.eval(sigma[:i])
        here: dict[Fraction, Fraction] = {}
        t_i: Extended = INF
        for x in reversed(grid):
            val = -marg
            for v, p in boxes[i].atoms:
                big = v if v > x else x
                gain = v - x if v > x else ZERO
                val += p * (gain + nxt[big])
            if val <= 0:
                here[x] = ZERO
                t_i = x
            else:
                here[x] = val
        assert t_i is not INF, "f_i must vanish at the top of the grid"
        thresholds[i] = t_i
        nxt = here
    utility = nxt[ZERO]
    return tuple(thresholds), utility


def optimal_thresholds(instance: Instance,
                       sigma) -> tuple[FixedOrderThresholds, Fraction]:
    """Best thresholds for a given permutation, via the f_i backward recursion."""
    sigma = tuple(sigma)
    if set(sigma) != set(instance.labels) or len(sigma) != instance.n:
        raise DomainError(f"sigma {sigma} is not a permutation of {instance.labels}")
    grid = support_union(instance)
    thresholds, utility = _threshold_dp(instance, sigma, grid)
    return FixedOrderThresholds(sigma, thresholds), utility


def _fixed_order_chunk(instance: Instance, perms: list[tuple[int, ...]],
                       grid: tuple[Fraction, ...]):
    best = None
    for sigma in perms:
        thresholds, utility = _threshold_dp(instance, sigma, grid)
        if best is None or utility > best[1] or (utility == best[1] and sigma < best[0]):
            best = (sigma, utility, thresholds)
    return best


def optimal_fixed_order(instance: Instance,
                        jobs: int = 1) -> tuple[FixedOrderThresholds, Fraction]:
    """Maximize over all n! permutations; ties go to the lexicographically
    least sigma.  `jobs` > 1 splits the permutation stream over a process
    pool; the merge is a pure exact-max reduction, so results are identical
    regardless of worker count."""
    guard("order_enum", instance.n)
    grid = support_union(instance)
    perms = list(itertools.permutations(instance.labels))
    if jobs > 1 and len(perms) > 1:
        chunks = [perms[k::jobs] for k in range(jobs)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_fixed_order_chunk, [instance] * len(chunks),
                                    chunks, [grid] * len(chunks)))
    else:
        results = [_fixed_order_chunk(instance, perms, grid)]
    best = None
    for cand in results:
        if cand is None:
            continue
        if best is None or cand[1] > best[1] or (cand[1] == best[1] and cand[0] < best[0]):
            best = cand
    sigma, utility, thresholds = best
    return FixedOrderThresholds(sigma, thresholds), utility


def optimal_impulsive(instance: Instance) -> tuple[ImpulsiveStrategy, Fraction]:
    """Best impulsive strategy by enumerating every ordered subset of boxes.

    Bernoulli instances only.  The empty strategy (utility 0) is always a
    candidate; ties go to the lexicographically least tuple.
    """
    if not instance.is_bernoulli():
        raise DomainError("impulsive strategies need a weighted-Bernoulli instance")
    guard("order_enum", instance.n)
    best_order: tuple[int, ...] = ()
    best_u = ZERO
    for k in range(1, instance.n + 1):
        for order in itertools.permutations(instance.labels, k):
            u = eval_impulsive(instance, order)
            if u > best_u or (u == best_u and order < best_order):
                best_order, best_u = order, u
    return ImpulsiveStrategy(best_order), best_u


def reservation_value(box: FiniteDistribution, c_i) -> Fraction:
    """The z solving sum_{v > 0} p_v (v - z)^+ = c_i, exactly.

    Only the positive prizes enter the tail sum (the hypothetical "pay c,
    collect the prize if it beats z" trade), so below the least positive
    atom the function keeps slope -P(V > 0) and the solution extends to
    negative z -- a negative reservation value is precisely the "never worth
    opening in isolation" flag (it happens iff c_i exceeds E[V]).  For
    c_i = 0 the solution set is [v_max, inf); we return v_max.
    """
    c = rat(c_i)
    if c < 0:
        raise DomainError(f"need a nonnegative cost, got {c}")
    top = box.support[-1]
    if c == 0:
        return top
    positives = [(v, p) for v, p in box.atoms if v > 0]
    if not positives:
        raise DomainError("a constant-zero box has no reservation value for c > 0")
    values = [v for v, _ in positives]
    probs = [p for _, p in positives]
    # h at each positive atom, built top-down: moving the evaluation point
    # from v_prev down to v adds tail * (v_prev - v) with tail = P(V > v_prev)
    h_at = {}
    acc = ZERO
    tail = ZERO
    prev = None
    for v, p in zip(reversed(values), reversed(probs)):
        if prev is not None:
            acc += tail * (prev - v)
        h_at[v] = acc
        tail += p
        prev = v
    for j in range(len(values) - 1, -1, -1):
        v = values[j]
        if h_at[v] >= c:
            mass = sum(probs[j + 1:], ZERO)
            return v + (h_at[v] - c) / mass
    bottom = values[0]
    return bottom - (c - h_at[bottom]) / tail


def weitzman(instance: Instance) -> tuple[Fraction, FixedOrderThresholds]:
    """The classical index rule: open in descending reservation-value order,
    halting once the best observed value reaches the next box's reservation
    value.  Rejects non-additive costs outright -- with combinatorial costs
    the index logic gives wrong answers (two boxes can be worth opening
    jointly while each alone is not), and silently running it would bury
    that fact."""
    if not isinstance(instance.cost, AdditiveCost):
        raise DomainError(
            "weitzman needs an additive cost; combinatorial costs have no "
            "per-box reservation value (use optimal_adaptive instead)"
        )
    z = {
        b: reservation_value(instance.box(b), instance.cost.per_box[b])
        for b in instance.labels
    }
    sigma = tuple(sorted(instance.labels, key=lambda b: (-z[b], b)))
    thresholds = tuple(max(z[b], ZERO) for b in sigma)
    strategy = FixedOrderThresholds(sigma, thresholds)
    return eval_fixed_order(instance, strategy), strategy


@dataclass(frozen=True)
class GapReport:
    """Exact utilities of the three strategy classes plus strict-gap flags.

    opt_impulsive / witness_impulsive are None off the Bernoulli domain.
    The class chain opt_adaptive >= opt_fixed_order >= opt_impulsive >= 0 is
    asserted during construction.
    """

    opt_adaptive: Fraction
    opt_fixed_order: Fraction
    opt_impulsive: Fraction | None
    witness_adaptive: PolicyTree
    witness_fixed_order: FixedOrderThresholds
    witness_impulsive: ImpulsiveStrategy | None
    strict_gap: dict

    def __post_init__(self):
        assert self.opt_adaptive >= self.opt_fixed_order >= 0
        if self.opt_impulsive is not None:
            assert self.opt_fixed_order >= self.opt_impulsive >= 0


def adaptivity_gap(instance: Instance, jobs: int = 1) -> GapReport:
    """Run every applicable solver and compare the optima exactly."""
    utility_a, tree = optimal_adaptive(instance)
    fixed, utility_f = optimal_fixed_order(instance, jobs=jobs)
    if instance.is_bernoulli():
        imp, utility_i = optimal_impulsive(instance)
        gaps = {
            "adaptive_vs_fixed": utility_a > utility_f,
            "fixed_vs_impulsive": utility_f > utility_i,
            "adaptive_vs_impulsive": utility_a > utility_i,
        }
    else:
        imp, utility_i = None, None
        gaps = {"adaptive_vs_fixed": utility_a > utility_f}
    return GapReport(
        opt_adaptive=utility_a,
        opt_fixed_order=utility_f,
        opt_impulsive=utility_i,
        witness_adaptive=tree,
        witness_fixed_order=fixed,
        witness_impulsive=imp,
        strict_gap=gaps,
    )
