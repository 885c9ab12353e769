"""End-to-end tests for the command-line interface.

Every command runs in process via main(argv); artifacts land in a fresh
tmp directory through the OMITLAB_OUT override.
"""

import json
import os

import pytest

from omitlab.cli import main
from omitlab.formats import read_bipartite, read_edge_list, write_json


def run_cli(monkeypatch, out_dir, argv):
    monkeypatch.setenv("OMITLAB_OUT", str(out_dir))
    try:
        return main(argv)
    except SystemExit as exc:
        return exc.code


def load_record(out_dir, name):
    with open(out_dir / name, encoding="utf-8") as fh:
        return json.load(fh)


@pytest.fixture
def out(tmp_path):
    d = tmp_path / "artifacts"
    d.mkdir()
    return d


@pytest.fixture
def sunflower_file(tmp_path, monkeypatch):
    d = tmp_path / "seed-construct"
    d.mkdir()
    code = run_cli(monkeypatch, d, ["construct", "sunflower", "--k", "3", "--l", "1", "--lam", "3"])
    assert code == 0
    return d / "sunflower-k3-l1-lam3.edges"


class TestConstruct:
    def test_narrow_grid(self, monkeypatch, out):
        code = run_cli(monkeypatch, out, ["construct", "l", "--m", "4", "--n", "3", "--k", "3"])
        assert code == 0
        H = read_edge_list(out / "l-m4-n3-k3.edges")
        assert H.n == 12
        assert H.num_edges == 18
        record = load_record(out, "construct-l-record.json")
        assert record["command"] == "construct-l"
        assert "l-m4-n3-k3.edges" in record["artifacts"]

    def test_fan(self, monkeypatch, out):
        code = run_cli(monkeypatch, out, ["construct", "fan", "--k", "3"])
        assert code == 0
        H = read_edge_list(out / "fan-k3.edges")
        assert (H.n, H.num_edges) == (7, 4)

    def test_polynomial_graph(self, monkeypatch, out):
        code = run_cli(monkeypatch, out, ["construct", "polygraph", "--q", "3", "--l", "3"])
        assert code == 0
        G = read_bipartite(out / "polygraph-q3-l3.bip")
        assert G.m == 27
        assert G.n_right == 9

    def test_incidence(self, monkeypatch, out):
        code = run_cli(monkeypatch, out, ["construct", "incidence", "--q", "3", "--l", "2"])
        assert code == 0
        H = read_edge_list(out / "incidence-q3-l2.edges")
        assert H.n == 9
        assert H.uniform_k == 3

    def test_subcritical_omitting_build(self, monkeypatch, out):
        code = run_cli(monkeypatch, out, ["construct", "omitting", "--q", "5", "--l", "2", "--k", "3"])
        assert code == 0
        record = load_record(out, "construct-omitting-record.json")
        assert record["verification"]["omitting_checked"] is True
        assert record["verification"]["preflight_q"] == 223
        assert record["parameters"]["build"]["preflight_met"] is False
        assert (out / "omitting-q5-l2-k3-s0.edges").exists()

    def test_missing_flag_is_an_input_error(self, monkeypatch, out):
        code = run_cli(monkeypatch, out, ["construct", "fan"])
        assert code == 4

    def test_unknown_kind_is_a_usage_error(self, monkeypatch, out):
        code = run_cli(monkeypatch, out, ["construct", "moebius", "--k", "3"])
        assert code == 4

    def test_replay_is_byte_identical(self, monkeypatch, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        a.mkdir(), b.mkdir()
        argv = ["construct", "linear-regular", "--n", "12", "--k", "3", "--d", "3", "--seed", "5"]
        assert run_cli(monkeypatch, a, argv) == 0
        assert run_cli(monkeypatch, b, argv) == 0
        name = "linear-regular-n12-k3-d3-s5.edges"
        assert (a / name).read_bytes() == (b / name).read_bytes()


class TestAnalyze:
    def test_report_fields(self, monkeypatch, out, sunflower_file):
        code = run_cli(
            monkeypatch,
            out,
            ["analyze", str(sunflower_file), "--sunflower", "1,3", "--omitting", "2", "--fan"],
        )
        assert code == 0
        report = load_record(out, "analyze-report.json")
        assert report["n"] == 7
        assert report["linear"] is True
        assert report["omits"] is True
        assert report["sunflower_found"] is True
        assert report["sunflower_witness"]["vertices"] == [[0]]
        assert report["fan_found"] is False
        record = load_record(out, "analyze-record.json")
        assert "analyze-report.json" in record["artifacts"]

    def test_missing_file_is_an_input_error(self, monkeypatch, out):
        code = run_cli(monkeypatch, out, ["analyze", "no-such-file.edges"])
        assert code == 4

    def test_malformed_file_is_a_parse_error(self, monkeypatch, out, tmp_path):
        bad = tmp_path / "bad.edges"
        bad.write_text("3 1\n0 zero 2\n")
        code = run_cli(monkeypatch, out, ["analyze", str(bad)])
        assert code == 4


class TestGreedyAndAlpha:
    def test_greedy_trials(self, monkeypatch, out, sunflower_file):
        code = run_cli(monkeypatch, out, ["greedy", str(sunflower_file), "--trials", "4"])
        assert code == 0
        record = load_record(out, "greedy-record.json")
        assert record["verification"]["independent"] is True
        assert record["verification"]["mean_size"] > 0
        assert (out / "greedy-sizes.csv").exists()

    def test_alpha_with_matching(self, monkeypatch, out, sunflower_file, capsys):
        code = run_cli(monkeypatch, out, ["alpha", str(sunflower_file), "--matching"])
        assert code == 0
        printed = capsys.readouterr().out
        assert "alpha = 6" in printed
        assert "matching number = 1" in printed
        record = load_record(out, "alpha-record.json")
        assert record["verification"]["alpha"] == 6
        assert record["verification"]["matching_number"] == 1
        assert record["verification"]["revalidated"] is True

    def test_alpha_budget_exhaustion(self, monkeypatch, out, tmp_path):
        big = tmp_path / "grid.edges"
        run_cli(monkeypatch, tmp_path / "g", ["construct", "l", "--m", "5", "--n", "4", "--k", "3"])
        code = run_cli(
            monkeypatch, out, ["alpha", str(tmp_path / "g" / "l-m5-n4-k3.edges"), "--budget", "3"]
        )
        assert code == 3


class TestDecompose:
    def test_family_artifacts(self, monkeypatch, out, sunflower_file):
        code = run_cli(monkeypatch, out, ["decompose", str(sunflower_file), "--k0", "2", "--lam", "2"])
        assert code == 0
        record = load_record(out, "decompose-record.json")
        v = record["verification"]
        assert v["family_size"] <= v["family_cap"]
        assert v["indecomposable"] is True
        assert v["containment"] is True
        assert (out / "member-0.edges").exists()


class TestRamseyFan:
    def test_verified_bounds(self, monkeypatch, out, capsys):
        code = run_cli(monkeypatch, out, ["ramsey-fan", "--t", "7", "--k", "3", "--verify"])
        assert code == 0
        printed = capsys.readouterr().out
        assert "lower: r > 9; upper: 43" in printed
        record = load_record(out, "ramsey-fan-record.json")
        assert record["verification"]["fan_free"] is True
        assert record["verification"]["alpha"] <= 6

    def test_degenerate_witness_reports_the_trivial_bound(self, monkeypatch, out, capsys):
        code = run_cli(monkeypatch, out, ["ramsey-fan", "--t", "3", "--k", "3"])
        assert code == 0
        printed = capsys.readouterr().out
        assert "lower: r > 0; upper: 7" in printed
        record = load_record(out, "ramsey-fan-record.json")
        assert record["verification"]["degenerate"] is True

    def test_budget_refusal_prints_unverified_bounds(self, monkeypatch, out, capsys):
        code = run_cli(monkeypatch, out, ["ramsey-fan", "--t", "9", "--k", "3", "--verify", "--budget", "3"])
        assert code == 3
        captured = capsys.readouterr()
        assert "(unverified)" in captured.out
        assert "refusing to certify" in captured.err

    def test_tiny_t_is_rejected(self, monkeypatch, out):
        assert run_cli(monkeypatch, out, ["ramsey-fan", "--t", "2", "--k", "3"]) == 4


class TestSpectrumAndMixing:
    def test_reference_spectrum(self, monkeypatch, out, capsys):
        code = run_cli(monkeypatch, out, ["spectrum", "--q", "3", "--l", "2"])
        assert code == 0
        assert "lambda2 = 1.73205" in capsys.readouterr().out
        record = load_record(out, "spectrum-record.json")
        assert record["verification"]["reference_match"] is True
        # eigenvalue text stays out of the digest map by design
        assert "spectrum.csv" not in record["artifacts"]
        assert (out / "spectrum.csv").exists()

    def test_spectrum_from_file(self, monkeypatch, out, tmp_path):
        run_cli(monkeypatch, tmp_path / "g", ["construct", "polygraph", "--q", "2", "--l", "2"])
        code = run_cli(
            monkeypatch, out, ["spectrum", "--file", str(tmp_path / "g" / "polygraph-q2-l2.bip")]
        )
        assert code == 0
        record = load_record(out, "spectrum-record.json")
        assert record["verification"]["lambda2"] == pytest.approx(2 ** 0.5)

    def test_mixing_stays_within_bound(self, monkeypatch, out):
        code = run_cli(monkeypatch, out, ["mixing", "--q", "7", "--l", "2", "--pairs", "30"])
        assert code == 0
        record = load_record(out, "mixing-record.json")
        assert record["verification"]["within"] is True
        assert record["verification"]["pairs"] == 30


class TestExperiment:
    def test_flags_only(self, monkeypatch, out):
        code = run_cli(
            monkeypatch, out,
            ["experiment", "--kind", "greedy-scaling", "--trials", "2", "--sizes", "12"],
        )
        assert code == 0
        assert (out / "greedy-scaling.csv").exists()
        record = load_record(out, "experiment-greedy-scaling-record.json")
        assert record["verification"]["cells"] == 1

    def test_config_file(self, monkeypatch, out, tmp_path):
        cfg = tmp_path / "sweep.json"
        write_json(
            {"kind": "greedy-scaling", "seed": 3, "params": {"trials": 2, "sizes": [12, 15]}},
            cfg,
        )
        code = run_cli(monkeypatch, out, ["experiment", str(cfg)])
        assert code == 0
        record = load_record(out, "experiment-greedy-scaling-record.json")
        assert record["seed"] == 3
        assert record["verification"]["cells"] == 2

    def test_kind_contradiction(self, monkeypatch, out, tmp_path):
        cfg = tmp_path / "sweep.json"
        write_json({"kind": "greedy-scaling"}, cfg)
        code = run_cli(monkeypatch, out, ["experiment", str(cfg), "--kind", "mixing-sweep"])
        assert code == 4

    def test_unknown_config_key(self, monkeypatch, out, tmp_path):
        cfg = tmp_path / "sweep.json"
        write_json({"kind": "greedy-scaling", "walltime": 5}, cfg)
        assert run_cli(monkeypatch, out, ["experiment", str(cfg)]) == 4

    def test_missing_kind(self, monkeypatch, out):
        assert run_cli(monkeypatch, out, ["experiment"]) == 4


class TestHarnessBehavior:
    def test_lock_collision(self, monkeypatch, out):
        (out / ".lock").touch()
        code = run_cli(monkeypatch, out, ["construct", "fan", "--k", "3"])
        assert code == 4

    def test_lock_is_released_after_a_run(self, monkeypatch, out):
        assert run_cli(monkeypatch, out, ["construct", "fan", "--k", "3"]) == 0
        assert not (out / ".lock").exists()
        assert run_cli(monkeypatch, out, ["analyze", str(out / "fan-k3.edges")]) == 0

    def test_env_override_beats_the_flag(self, monkeypatch, tmp_path):
        env_dir = tmp_path / "env"
        flag_dir = tmp_path / "flag"
        env_dir.mkdir(), flag_dir.mkdir()
        code = run_cli(
            monkeypatch, env_dir,
            ["construct", "fan", "--k", "3", "--out-dir", str(flag_dir)],
        )
        assert code == 0
        assert (env_dir / "fan-k3.edges").exists()
        assert not (flag_dir / "fan-k3.edges").exists()

    def test_usage_error_exit_code(self, monkeypatch, out):
        assert run_cli(monkeypatch, out, ["no-such-command"]) == 4
        assert run_cli(monkeypatch, out, ["alpha"]) == 4
