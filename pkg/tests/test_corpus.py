import json
from fractions import Fraction

import pytest

from pandora import (
    BudgetAdditiveCost,
    DomainError,
    ENTRIES,
    THEOREMS,
    budget_counterexample,
    run_corpus,
    run_theorem_suite,
    validate_class,
)
from pandora.corpus import CheckResult, CorpusReport


def test_theorem_names():
    assert THEOREMS == ("T31", "T44", "L35", "cancellation", "preservation", "chain")


def test_entry_names_and_frozen_values():
    frozen = {
        (e.name, x.solver): x.value
        for e in ENTRIES
        for x in e.expected
    }
    assert frozen == {
        ("example1", "adaptive"): Fraction(21, 2),
        ("example1", "fixed_order"): Fraction(10),
        ("unit_demand_pair", "impulsive"): Fraction(1, 9),
        ("unit_demand_pair", "adaptive"): Fraction(1, 9),
        ("subadditive4", "adaptive"): Fraction(4253, 120),
    }
    assert [e.name for e in ENTRIES] == [
        "example1", "unit_demand_pair", "subadditive4",
        "xos_lift_example1", "hardness_planted_n6",
    ]


def test_provenance_vocabulary():
    tags = {x.provenance for e in ENTRIES for x in e.expected}
    assert tags == {"published", "recomputed:policy-dp", "recomputed:order-scan"}


class TestRunCorpus:
    def test_everything_passes(self):
        report = run_corpus()
        assert report.passed
        assert len(report.results) == 15
        failing = [r for r in report.results if not r.passed]
        assert failing == []

    def test_kinds_are_labelled(self):
        report = run_corpus()
        kinds = {r.kind for r in report.results}
        assert "solver:adaptive" in kinds
        assert "check:example1_tree" in kinds
        assert "check:hardness_agreement" in kinds
        assert all(k.startswith(("solver:", "check:")) for k in kinds)

    def test_json_shape(self):
        data = run_corpus().to_json()
        assert data["passed"] is True
        assert {"entry", "kind", "passed", "expected", "got", "provenance"} \
            == set(data["results"][0])
        json.dumps(data)                      # must be serializable as-is

    def test_failure_aggregation(self):
        bad = CheckResult(entry="x", kind="solver:adaptive", passed=False,
                          expected="1", got="2", provenance="published")
        report = CorpusReport((bad,))
        assert not report.passed
        assert report.to_json()["results"][0]["got"] == "2"


def test_budget_counterexample_shape():
    inst = budget_counterexample()
    assert inst.n == 3
    assert isinstance(inst.cost, BudgetAdditiveCost)
    assert inst.cost.eval({1, 2, 3}) == 2
    assert validate_class(inst.cost, "submodular").passed
    assert inst.box(1).support == (0, 1, 2)


class TestTheoremSuites:
    @pytest.mark.parametrize("theorem,trials", [
        ("T31", 20), ("T44", 10), ("L35", 40),
        ("cancellation", 40), ("preservation", 12), ("chain", 40),
    ])
    def test_small_runs_pass(self, theorem, trials):
        report = run_theorem_suite(theorem, trials, seed=0)
        assert report.passed, report.failures
        assert report.theorem == theorem
        assert report.trials == trials
        assert report.note

    def test_deterministic_replay(self):
        a = run_theorem_suite("cancellation", 25, seed=9)
        b = run_theorem_suite("cancellation", 25, seed=9)
        assert json.dumps(a.to_json()) == json.dumps(b.to_json())

    def test_unknown_theorem(self):
        with pytest.raises(DomainError, match="unknown theorem"):
            run_theorem_suite("T99", 1, 0)

    def test_needs_a_trial(self):
        with pytest.raises(DomainError, match="at least one"):
            run_theorem_suite("T31", 0, 0)

    def test_json_shape(self):
        data = run_theorem_suite("chain", 5, seed=2).to_json()
        assert data["passed"] is True
        assert data["failures"] == []
        assert data["seed"] == 2
        json.dumps(data)
