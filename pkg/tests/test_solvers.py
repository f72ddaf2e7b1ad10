import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from pandora import (
    AdditiveCost,
    CapabilityError,
    DomainError,
    Instance,
    adaptivity_gap,
    bernoulli,
    deterministic,
    eval_fixed_order,
    eval_impulsive,
    eval_policy,
    example1,
    optimal_adaptive,
    optimal_fixed_order,
    optimal_impulsive,
    optimal_thresholds,
    random_instance,
    rat,
    reservation_value,
    subadditive4,
    unit_demand_pair,
    weitzman,
)

from oracles import (
    best_adaptive_utility,
    best_fixed_order_utility,
    best_impulsive_utility,
    fixed_order_free_halting,
)

seeds = st.integers(0, 2 ** 31 - 1)


class TestOptimalAdaptive:
    def test_frozen_corpus_values(self):
        assert optimal_adaptive(example1())[0] == rat("21/2")
        assert optimal_adaptive(unit_demand_pair())[0] == rat("1/9")
        assert optimal_adaptive(subadditive4())[0] == rat("4253/120")

    def test_witness_tree_replays(self):
        for inst in (example1(), unit_demand_pair(), subadditive4()):
            u, tree = optimal_adaptive(inst)
            assert eval_policy(inst, tree) == u

    def test_halts_when_nothing_pays(self):
        inst = Instance([bernoulli(1, "1/2")], AdditiveCost([10]))
        u, tree = optimal_adaptive(inst)
        assert u == 0 and tree.is_halt

    def test_empty_instance(self):
        inst = Instance([], AdditiveCost([]))
        u, tree = optimal_adaptive(inst)
        assert u == 0 and tree.is_halt

    def test_size_guard(self):
        boxes = [bernoulli(1, "1/2")] * 15
        inst = Instance(boxes, AdditiveCost([1] * 15))
        with pytest.raises(CapabilityError):
            optimal_adaptive(inst)

    @settings(max_examples=30, deadline=None)
    @given(seeds)
    def test_matches_exhaustive_oracle(self, seed):
        family = ("general_coverage", "additive", "explicit_subadditive")[seed % 3]
        inst = random_instance(family, (seed % 3) + 1, seed)
        u, tree = optimal_adaptive(inst)
        assert u == best_adaptive_utility(inst)
        assert eval_policy(inst, tree) == u


class TestOptimalFixedOrder:
    def test_frozen_example1(self):
        s, u = optimal_fixed_order(example1())
        assert u == 10
        assert eval_fixed_order(example1(), s) == 10

    def test_per_permutation_thresholds_are_optimal(self):
        # thresholds can only condition on the running max, but along a fixed
        # order that is all history buys you: free halting does no better
        for inst in (example1(), unit_demand_pair()):
            for sigma in itertools.permutations(inst.labels):
                s, u = optimal_thresholds(inst, sigma)
                assert u == fixed_order_free_halting(inst, sigma)
                assert eval_fixed_order(inst, s) == u

    def test_thresholds_live_on_the_grid(self):
        from pandora import support_union

        inst = subadditive4()
        s, u = optimal_fixed_order(inst)
        grid = set(support_union(inst))
        assert all(t in grid for t in s.thresholds)

    def test_sigma_tie_break_is_lexicographic(self):
        inst = unit_demand_pair()           # fully symmetric boxes and cost
        s, _ = optimal_fixed_order(inst)
        assert s.sigma == (1, 2)

    def test_rejects_non_permutation(self):
        with pytest.raises(DomainError, match="permutation"):
            optimal_thresholds(example1(), (1, 2))

    def test_size_guard(self):
        boxes = [bernoulli(1, "1/2")] * 9
        inst = Instance(boxes, AdditiveCost([0] * 9))
        with pytest.raises(CapabilityError):
            optimal_fixed_order(inst)

    def test_jobs_do_not_change_the_answer(self):
        inst = random_instance("general_coverage", 4, 7)
        assert optimal_fixed_order(inst, jobs=2) == optimal_fixed_order(inst)

    @settings(max_examples=25, deadline=None)
    @given(seeds)
    def test_matches_exhaustive_oracle(self, seed):
        inst = random_instance("general_coverage", (seed % 3) + 1, seed)
        _, u = optimal_fixed_order(inst)
        assert u == best_fixed_order_utility(inst)


class TestOptimalImpulsive:
    def test_frozen_unit_demand(self):
        s, u = optimal_impulsive(unit_demand_pair())
        assert u == rat("1/9")
        assert s.order == (1, 2)            # symmetric tie -> least tuple

    def test_example1(self):
        s, u = optimal_impulsive(example1())
        assert u == 10
        assert s.order == (1, 3)
        assert eval_impulsive(example1(), s.order) == 10

    def test_empty_when_nothing_pays(self):
        inst = Instance([bernoulli(1, "1/2")], AdditiveCost([10]))
        s, u = optimal_impulsive(inst)
        assert u == 0 and s.order == ()

    def test_rejects_general_distributions(self):
        with pytest.raises(DomainError, match="Bernoulli"):
            optimal_impulsive(subadditive4())

    @settings(max_examples=25, deadline=None)
    @given(seeds)
    def test_matches_exhaustive_oracle(self, seed):
        inst = random_instance("bernoulli_coverage", (seed % 3) + 1, seed)
        s, u = optimal_impulsive(inst)
        assert u == best_impulsive_utility(inst)
        assert eval_impulsive(inst, s.order) == u


class TestReservationValue:
    def test_frozen_values(self):
        assert reservation_value(bernoulli(2, "1/3"), 1) == -1
        assert reservation_value(bernoulli(10, "1/2"), 1) == 8
        assert reservation_value(deterministic(10), "1/2") == rat("19/2")

    def test_zero_cost_gives_top_value(self):
        assert reservation_value(bernoulli(10, "1/2"), 0) == 10

    def test_sign_flips_at_the_mean(self):
        box = bernoulli(6, "1/2")           # E[V] = 3
        assert reservation_value(box, 3) == 0
        assert reservation_value(box, "7/2") < 0 < reservation_value(box, "5/2")

    def test_rejects_bad_inputs(self):
        with pytest.raises(DomainError, match="nonnegative"):
            reservation_value(bernoulli(1, "1/2"), -1)
        with pytest.raises(DomainError, match="constant-zero"):
            reservation_value(deterministic(0), 1)

    @settings(max_examples=40, deadline=None)
    @given(seeds, st.integers(1, 30), st.integers(1, 5))
    def test_solves_the_tail_equation(self, seed, num, den):
        inst = random_instance("additive", 1, seed)
        box = inst.box(1)
        c = Fraction(num, den)
        z = reservation_value(box, c)
        tail = sum((p * (v - z) for v, p in box.atoms if v > 0 and v > z), Fraction(0))
        assert tail == c
        # and it is decreasing in the cost
        assert reservation_value(box, c + 1) < z


class TestWeitzman:
    def test_rejects_combinatorial_costs(self):
        with pytest.raises(DomainError, match="additive"):
            weitzman(unit_demand_pair())

    def test_hand_computed(self):
        inst = Instance(
            [bernoulli(10, "1/2"), bernoulli(12, "1/2")],
            AdditiveCost({1: 1, 2: 5}),
        )
        u, s = weitzman(inst)
        # z_1 = 8, z_2 = 2: open box 1 first, then box 2 only on a miss
        assert s.sigma == (1, 2)
        assert s.thresholds == (8, 2)
        assert u == rat("1/2") * 10 + rat("1/2") * (rat("1/2") * 12 - 5) - 1

    def test_negative_reservation_means_skip(self):
        inst = Instance([bernoulli(2, "1/3")], AdditiveCost([1]))
        u, s = weitzman(inst)
        assert u == 0
        assert s.thresholds == (0,)         # clamped: halt before opening

    @settings(max_examples=40, deadline=None)
    @given(seeds)
    def test_matches_adaptive_on_additive_costs(self, seed):
        inst = random_instance("additive", (seed % 4) + 1, seed)
        assert weitzman(inst)[0] == optimal_adaptive(inst)[0]


class TestAdaptivityGap:
    def test_example1_report(self):
        r = adaptivity_gap(example1())
        assert r.opt_adaptive == rat("21/2")
        assert r.opt_fixed_order == 10
        assert r.opt_impulsive == 10
        assert r.strict_gap == {
            "adaptive_vs_fixed": True,
            "fixed_vs_impulsive": False,
            "adaptive_vs_impulsive": True,
        }

    def test_witnesses_replay(self):
        inst = example1()
        r = adaptivity_gap(inst)
        assert eval_policy(inst, r.witness_adaptive) == r.opt_adaptive
        assert eval_fixed_order(inst, r.witness_fixed_order) == r.opt_fixed_order
        assert eval_impulsive(inst, r.witness_impulsive.order) == r.opt_impulsive

    def test_off_bernoulli_domain(self):
        r = adaptivity_gap(subadditive4())
        assert r.opt_impulsive is None and r.witness_impulsive is None
        assert set(r.strict_gap) == {"adaptive_vs_fixed"}
        assert r.strict_gap["adaptive_vs_fixed"] is True

    @settings(max_examples=15, deadline=None)
    @given(seeds)
    def test_class_chain(self, seed):
        inst = random_instance("bernoulli_coverage", (seed % 3) + 2, seed)
        r = adaptivity_gap(inst)
        assert r.opt_adaptive >= r.opt_fixed_order >= r.opt_impulsive >= 0
        assert r.strict_gap["adaptive_vs_fixed"] == (r.opt_adaptive > r.opt_fixed_order)
