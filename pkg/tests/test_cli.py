import json

import pytest

from pandora import dumps_instance, example1, save_instance, subadditive4, unit_demand_pair
from pandora.cli import main


@pytest.fixture
def example1_path(tmp_path):
    path = tmp_path / "example1.json"
    save_instance(example1(), path)
    return str(path)


@pytest.fixture
def unit_demand_path(tmp_path):
    path = tmp_path / "unit_demand.json"
    save_instance(unit_demand_pair(), path)
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, json.loads(out)


class TestSolve:
    def test_adaptive_default(self, capsys, example1_path):
        code, data = run_json(capsys, "solve", "-i", example1_path)
        assert code == 0
        assert data["command"] == "solve"
        assert data["solver"] == "adaptive"
        assert data["utility"] == "21/2"
        assert data["strategy"]["kind"] == "policy_tree"
        assert data["strategy"]["root"]["open"] == 1
        assert data["query_count"] > 0
        assert data["wall_time_ms"] >= 0
        assert len(data["instance_digest"]) == 16

    def test_each_solver_class(self, capsys, example1_path):
        for cls, utility in [("fixed_order", "10"), ("impulsive", "10")]:
            code, data = run_json(capsys, "solve", "-i", example1_path,
                                  "--class", cls)
            assert code == 0
            assert data["utility"] == utility

    def test_weitzman_needs_additive(self, capsys, example1_path):
        code, data = run_json(capsys, "solve", "-i", example1_path,
                              "--class", "weitzman")
        assert code == 2
        assert data["error"]["type"] == "domain"
        assert "additive" in data["error"]["message"]

    def test_stdin_instance(self, capsys, monkeypatch):
        import io

        monkeypatch.setattr("sys.stdin", io.StringIO(dumps_instance(example1())))
        code, data = run_json(capsys, "solve", "-i", "-")
        assert code == 0
        assert data["utility"] == "21/2"

    def test_jobs_flag_disables_query_counting(self, capsys, example1_path):
        code, data = run_json(capsys, "solve", "-i", example1_path,
                              "--class", "fixed_order", "--jobs", "2")
        assert code == 0
        assert data["utility"] == "10"
        assert data["query_count"] is None

    def test_missing_file(self, capsys, tmp_path):
        code, data = run_json(capsys, "solve", "-i", str(tmp_path / "nope.json"))
        assert code == 2
        assert data["error"]["type"] == "io"

    def test_parse_error_has_position(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{\n  "format": oops\n}\n')
        code, data = run_json(capsys, "solve", "-i", str(bad))
        assert code == 2
        assert data["error"]["type"] == "parse"
        assert data["error"]["line"] == 2

    def test_capability_exit(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setenv("PANDORA_MAX_N", "2")
        path = tmp_path / "e1.json"
        save_instance(example1(), path)
        code, data = run_json(capsys, "solve", "-i", str(path))
        assert code == 3
        assert data["error"]["type"] == "capability"


class TestGap:
    def test_example1(self, capsys, example1_path):
        code, data = run_json(capsys, "gap", "-i", example1_path)
        assert code == 0
        assert data["opt_adaptive"] == "21/2"
        assert data["opt_fixed_order"] == "10"
        assert data["opt_impulsive"] == "10"
        assert data["strict_gap"]["adaptive_vs_fixed"] is True
        assert data["witnesses"]["adaptive"]["kind"] == "policy_tree"
        assert data["witnesses"]["impulsive"]["order"] == [1, 3]

    def test_off_bernoulli(self, capsys, tmp_path):
        path = tmp_path / "sub4.json"
        save_instance(subadditive4(), path)
        code, data = run_json(capsys, "gap", "-i", str(path))
        assert code == 0
        assert data["opt_impulsive"] is None
        assert data["witnesses"]["impulsive"] is None
        assert data["opt_adaptive"] == "4253/120"


class TestValidate:
    def test_pass(self, capsys, unit_demand_path):
        code, data = run_json(capsys, "validate", "--class", "submodular",
                              "-i", unit_demand_path)
        assert code == 0
        assert data["passed"] is True
        assert data["witness"] is None

    def test_fail_carries_witness(self, capsys, tmp_path):
        path = tmp_path / "sub4.json"
        save_instance(subadditive4(), path)
        code, data = run_json(capsys, "validate", "--class", "submodular",
                              "-i", str(path))
        assert code == 1
        assert data["passed"] is False
        assert data["witness"]["reason"] == "marginal grows"
        assert set(data["witness"]) == {
            "reason", "x", "A", "B", "c_x_given_A", "c_x_given_B"}
        assert isinstance(data["witness"]["A"], list)

    def test_unknown_class_is_usage_error(self, capsys, unit_demand_path):
        code, out = run(capsys, "validate", "--class", "psychic",
                        "-i", unit_demand_path)
        assert code == 2


class TestTransform:
    def test_discretize_needs_epsilon(self, capsys, example1_path):
        code, data = run_json(capsys, "transform", "discretize",
                              "-i", example1_path)
        assert code == 2
        assert "epsilon" in data["error"]["message"]

    def test_discretize(self, capsys, example1_path):
        code, data = run_json(capsys, "transform", "discretize",
                              "--epsilon", "5", "-i", example1_path)
        assert code == 0
        assert data["params"] == {"epsilon": "5", "kappa": "8"}
        assert data["map"] is None
        assert data["instance"]["format"] == "pandora-instance"
        assert data["instance_digest"] != data["instance_digest_in"]

    def test_pipeline_discretize_then_bernoullify(self, capsys, example1_path):
        code, data = run_json(capsys, "transform", "discretize", "bernoullify",
                              "--epsilon", "5", "-i", example1_path)
        assert code == 0
        assert data["steps"] == ["discretize", "bernoullify"]
        assert data["params"]["kappa"] == "8"
        assert data["map"]["pairs"]          # nonempty copy bookkeeping
        boxes = data["instance"]["boxes"]
        assert all(len(b["atoms"]) <= 2 for b in boxes)

    def test_bernoullify_alone(self, capsys, tmp_path):
        path = tmp_path / "sub4.json"
        save_instance(subadditive4(), path)
        code, data = run_json(capsys, "transform", "bernoullify", "-i", str(path))
        assert code == 0
        assert data["params"] is None
        assert [p[:2] for p in data["map"]["pairs"]] == [
            [1, 2], [1, 3], [2, 1], [3, 2], [4, 2]]
        assert data["instance"]["cost"]["kind"] == "projection"


class TestHardness:
    def test_params(self, capsys):
        code, data = run_json(capsys, "hardness", "params", "--n", "100000")
        assert code == 0
        assert (data["alpha"], data["beta"], data["M"]) == (729, 27, 135)
        assert data["p"] == "1/729"

    def test_verify_small_n_fails(self, capsys):
        code, data = run_json(capsys, "hardness", "verify", "--n", "6",
                              "--alpha", "4", "--beta", "1")
        assert code == 1
        assert data["verdict"] == "regime not reached"

    def test_verify_large_n_passes(self, capsys):
        code, data = run_json(capsys, "hardness", "verify", "--n", "100000")
        assert code == 0
        assert data["verdict"] == "pass"
        assert "banner" in data

    def test_distinguish(self, capsys):
        code, data = run_json(capsys, "hardness", "distinguish", "--n", "64",
                              "--trials", "50", "--budget", "5", "--seed", "1")
        assert code == 0
        assert data["mode"] == "distinguish"
        assert data["trials"] == 50
        assert data["query_count_ok"] is True

    def test_domain_error_exit(self, capsys):
        code, data = run_json(capsys, "hardness", "params", "--n", "2")
        assert code == 2
        assert data["error"]["type"] == "domain"


class TestCorpusAndVerify:
    def test_corpus_run(self, capsys):
        code, data = run_json(capsys, "corpus")
        assert code == 0
        assert data["passed"] is True
        assert len(data["results"]) == 15

    def test_verify_suite(self, capsys):
        code, data = run_json(capsys, "verify", "--theorem", "cancellation",
                              "--trials", "30", "--seed", "4")
        assert code == 0
        assert data["theorem"] == "cancellation"
        assert data["passed"] is True

    def test_verify_unknown_theorem_is_usage(self, capsys):
        code, out = run(capsys, "verify", "--theorem", "T99")
        assert code == 2


class TestPlumbing:
    def test_no_command_is_usage(self, capsys):
        assert main([]) == 2

    def test_help_exits_zero(self, capsys):
        assert main(["--help"]) == 0

    def test_human_rendering(self, capsys, example1_path):
        code, out = run(capsys, "solve", "-i", example1_path, "--human")
        assert code == 0
        assert "utility: 21/2" in out
        assert "solver: adaptive" in out
        assert "{" not in out.splitlines()[0]

    def test_human_booleans_and_nulls(self, capsys, unit_demand_path):
        code, out = run(capsys, "validate", "--class", "submodular",
                        "-i", unit_demand_path, "--human")
        assert code == 0
        assert "passed: yes" in out
        assert "witness: -" in out
