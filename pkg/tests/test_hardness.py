import itertools
import math
from fractions import Fraction

import pytest
from scipy.stats import hypergeom

from pandora import (
    DomainError,
    HardnessParams,
    distinguish_experiment,
    hardness_params,
    hypergeometric_tail,
    replay_trial,
    symmetric_impulsive_utility,
    symmetric_impulsive_utility_exact,
    verify_family,
)


class TestParams:
    def test_frozen_large_n(self):
        p = hardness_params(100000)
        assert (p.alpha, p.beta, p.M) == (729, 27, 135)
        assert p.p == Fraction(1, 729)
        assert p.q == Fraction(728, 729)
        p = hardness_params(4096)
        assert (p.alpha, p.beta, p.M) == (107, 14, 70)

    def test_ceilings_really_are_ceilings(self):
        for n in (100, 4096, 100000, 10 ** 6):
            p = hardness_params(n)
            a_exact = math.log(n) * math.sqrt(n) / 5
            b_exact = math.log(n) ** 2 / 5
            assert p.alpha - 1 < a_exact < p.alpha + 1e-9
            assert p.beta - 1 < b_exact < p.beta + 1e-9

    def test_overrides(self):
        p = hardness_params(6, alpha=4, beta=1)
        assert p == HardnessParams(n=6, alpha=4, beta=1, M=5, p=Fraction(1, 4))

    def test_validation(self):
        with pytest.raises(DomainError, match="n >= 3"):
            hardness_params(2)
        with pytest.raises(DomainError, match="alpha"):
            hardness_params(6, alpha=7, beta=1)
        with pytest.raises(DomainError, match="beta"):
            hardness_params(6, alpha=4, beta=4)
        with pytest.raises(DomainError, match="beta"):
            hardness_params(6, alpha=4, beta=0)


class TestSymmetricUtility:
    def test_float_matches_exact_up_to_s30(self):
        params = hardness_params(100000)
        for variant in ("baseline", "planted_subsetR"):
            for s in range(0, 31):
                f = symmetric_impulsive_utility(params, s, variant)
                e = symmetric_impulsive_utility_exact(params, s, variant)
                assert abs(f - float(e)) <= 1e-9 * max(1.0, abs(float(e)))

    def test_expected_cost_identity(self):
        # E[min(#opened, m)] for halt-at-first-success telescopes to (1-q^k)/p
        p = Fraction(1, 4)
        q = 1 - p
        for s in range(1, 9):
            for m in (1, 3, 8):
                k = min(s, m)
                direct = Fraction(0)
                for t in range(1, s + 1):        # halt at slot t
                    direct += q ** (t - 1) * p * min(t, m)
                direct += q ** s * min(s, m)     # every box came up empty
                assert direct == (1 - q ** k) / p

    def test_s_one_is_exact(self):
        params = hardness_params(100000)
        assert symmetric_impulsive_utility_exact(params, 1) == Fraction(5, 27) - 1

    def test_bounds_checked(self):
        params = hardness_params(6, alpha=4, beta=1)
        with pytest.raises(DomainError, match="0 <= s <= n"):
            symmetric_impulsive_utility(params, 7)
        with pytest.raises(DomainError, match="s <= alpha"):
            symmetric_impulsive_utility(params, 5, "planted_subsetR")
        with pytest.raises(DomainError, match="variant"):
            symmetric_impulsive_utility(params, 1, "nonesuch")

    def test_zero_strategy_is_free(self):
        params = hardness_params(6, alpha=4, beta=1)
        assert symmetric_impulsive_utility(params, 0) == 0.0
        assert symmetric_impulsive_utility_exact(params, 0) == 0


class TestVerifyFamily:
    def test_large_n_passes(self):
        r = verify_family(100000)
        assert r.verdict == "pass"
        assert (r.alpha, r.beta, r.M) == (729, 27, 135)
        assert r.regime == {"alpha_gt_20beta": True, "alpha_gt_26beta": True}
        assert r.argmax_s == 1
        assert r.max_baseline_utility == pytest.approx(-22 / 27, abs=1e-12)
        assert r.planted_lower_bound == pytest.approx(135 * (1 - 1 / math.e) - 27)
        assert r.planted_utility > r.planted_lower_bound
        assert r.violations == ()

    def test_case_bounds_hold_with_margin(self):
        r = verify_family(100000)
        names = {c["case"] for c in r.cases}
        assert names == {"case1:s>=alpha", "case2:21beta<=s<alpha",
                         "case3:0<s<21beta", "case4:s=0"}
        for c in r.cases:
            assert c["min_margin"] >= 0
        by_name = {c["case"]: c for c in r.cases}
        assert by_name["case3:0<s<21beta"]["bound"] == "varies (s/alpha)*(26beta-alpha)"
        assert sum(c["count"] for c in r.cases) == 100000 + 1

    def test_small_n_regime_not_reached(self):
        r = verify_family(6, alpha=4, beta=1)
        assert r.verdict == "regime not reached"
        assert r.regime["alpha_gt_20beta"] is False

    def test_regime_edge_that_still_passes(self):
        r = verify_family(27, alpha=27, beta=1)
        assert r.regime == {"alpha_gt_20beta": True, "alpha_gt_26beta": True}
        assert r.verdict == "pass"
        assert r.planted_utility > 0

    def test_json_carries_the_banner(self):
        j = verify_family(6, alpha=4, beta=1).to_json()
        assert "not desk-reproducible" in j["banner"]
        assert j["verdict"] == "regime not reached"
        assert isinstance(j["cases"], list)


class TestHypergeometricTail:
    def test_tiny_case_by_enumeration(self):
        n, alpha, beta = 6, 3, 1
        exact = hypergeometric_tail(n, alpha, beta)
        assert exact == Fraction(1, 2)
        R = frozenset({1, 2, 3})
        hits = sum(
            1 for S in itertools.combinations(range(1, n + 1), alpha)
            if len(frozenset(S) & R) > beta
        )
        assert exact == Fraction(hits, math.comb(n, alpha))

    def test_against_scipy(self):
        for n, alpha, beta in ((4096, 107, 14), (100, 10, 2), (50, 7, 3)):
            ours = float(hypergeometric_tail(n, alpha, beta))
            ref = float(hypergeom.sf(beta, n, alpha, alpha))
            assert ours == pytest.approx(ref, rel=1e-8, abs=1e-300)


class TestReplayTrial:
    def test_transcript_and_counting(self):
        queries = [{1, 2, 3}, {4, 5, 6}, {1, 4, 5}]
        t = replay_trial(6, 3, 1, {1, 2, 3}, queries)
        assert t.budget == 3
        assert [(sorted(S), c0, cR) for S, c0, cR in t.transcript] == [
            ([1, 2, 3], 3, 1),
            ([4, 5, 6], 3, 3),
            ([1, 4, 5], 3, 3),
        ]
        assert t.distinguishing

    def test_agreeing_queries(self):
        t = replay_trial(6, 3, 1, {1, 2, 3}, [{4, 5}, {1,}])
        assert not t.distinguishing


class TestDistinguishExperiment:
    def test_forced_distinguisher(self):
        # the full ground set always betrays the plant: beta + (n - alpha) < alpha
        r = distinguish_experiment(6, [range(1, 7)], budget=5, trials=20,
                                   seed=3, alpha=4, beta=1)
        assert r.algorithm == "caller_query_list"
        assert r.rate == 1.0
        assert r.distinguishing_count == 20
        assert r.query_count_ok
        assert r.aborted_count == 0
        assert r.queries_per_trial == 1
        assert r.fixed_set_stats == ()       # no size-alpha queries to track
        assert r.witness["S"] == [1, 2, 3, 4, 5, 6]
        assert r.witness["overlap"] == 4     # R always sits inside the full set
        assert r.witness["c0"] == "4" and r.witness["cR"] == "3"

    def test_budget_truncates_caller_lists(self):
        queries = [{1, 2, 3, 4}, {1, 2, 3, 5}, {1, 2, 3, 6}]
        r = distinguish_experiment(6, queries, budget=2, trials=10,
                                   seed=0, alpha=4, beta=1)
        assert r.queries_per_trial == 2
        assert r.aborted_count == 10

    def test_builtin_rate_matches_hypergeometric(self):
        r = distinguish_experiment(6, budget=1, trials=2000, seed=11,
                                   alpha=3, beta=1)
        # one uniform alpha-set per trial distinguishes iff overlap > beta
        exact = 0.5
        se3 = 3 * math.sqrt(exact * (1 - exact) / 2000)
        assert abs(r.rate - exact) <= se3
        assert all(s["within"] for s in r.fixed_set_stats)
        assert all(s["exact_tail"] == exact for s in r.fixed_set_stats)

    def test_deterministic_in_the_seed(self):
        a = distinguish_experiment(8, budget=3, trials=50, seed=5, alpha=4, beta=2)
        b = distinguish_experiment(8, budget=3, trials=50, seed=5, alpha=4, beta=2)
        c = distinguish_experiment(8, budget=3, trials=50, seed=6, alpha=4, beta=2)
        assert a.to_json() == b.to_json()
        assert a.to_json() != c.to_json()

    def test_input_validation(self):
        with pytest.raises(DomainError, match="budget"):
            distinguish_experiment(6, budget=0, trials=1, alpha=4, beta=1)
        with pytest.raises(DomainError, match="trials"):
            distinguish_experiment(6, budget=1, trials=10 ** 9, alpha=4, beta=1)
        with pytest.raises(DomainError, match="unknown algorithm"):
            distinguish_experiment(6, "sneaky", budget=1, trials=1, alpha=4, beta=1)
        with pytest.raises(DomainError, match="outside"):
            distinguish_experiment(6, [{7}], budget=1, trials=1, alpha=4, beta=1)
