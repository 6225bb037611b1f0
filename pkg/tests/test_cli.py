"""CLI behavior: spec parsing, config precedence, outputs, exit codes."""

import json

import pytest
from click.testing import CliRunner

from pcosync.cli import main
from pcosync.mc import QUANTILE_CSV_HEADER, SWEEP_CSV_HEADER


@pytest.fixture()
def runner():
    return CliRunner()


SIM_ARGS = ["simulate", "--graph", "complete:n=5", "--prc", "sf",
            "--tau", "0.05", "--seed", "1", "--max-periods", "10"]


class TestTopLevel:
    def test_help_lists_commands(self, runner):
        r = runner.invoke(main, ["--help"])
        assert r.exit_code == 0
        for cmd in ("simulate", "estimate", "bound", "classify", "sweep",
                    "gen-graph", "serve"):
            assert cmd in r.output

    def test_version(self, runner):
        r = runner.invoke(main, ["--version"])
        assert r.exit_code == 0
        assert "pcosync" in r.output


class TestSimulate:
    def test_summary_json_to_stdout(self, runner):
        r = runner.invoke(main, SIM_ARGS)
        assert r.exit_code == 0, r.output
        doc = json.loads(r.output)
        assert doc["config"]["tau"] == 0.05
        assert doc["config"]["graph"] == "complete:n=5"
        assert doc["summary"]["mode"] == "trajectory"
        assert doc["summary"]["synced"] is True

    def test_out_writes_csv_and_sidecar(self, runner, tmp_path):
        out = tmp_path / "run.csv"
        r = runner.invoke(main, SIM_ARGS + ["--out", str(out)])
        assert r.exit_code == 0, r.output
        lines = out.read_text().splitlines()
        assert lines[0].startswith("# config: {")
        assert lines[1] == "t,spread"
        assert len(lines) > 10
        sidecar = tmp_path / "run.summary.json"
        doc = json.loads(sidecar.read_text())
        assert doc["summary"]["synced"] is True
        # output destination must not leak into the embedded config
        assert "out" not in json.loads(lines[0][len("# config: "):])

    def test_quantile_mode_header(self, runner, tmp_path):
        out = tmp_path / "q.csv"
        r = runner.invoke(main, SIM_ARGS + ["--quantiles", "--trials", "4",
                                            "--sample-dt", "1.0",
                                            "--out", str(out)])
        assert r.exit_code == 0, r.output
        lines = out.read_text().splitlines()
        assert lines[1] == QUANTILE_CSV_HEADER
        assert len(lines) == 2 + 11  # t = 0..10 inclusive

    def test_event_log_file(self, runner, tmp_path):
        ev = tmp_path / "events.csv"
        r = runner.invoke(main, SIM_ARGS + ["--log-events", str(ev)])
        assert r.exit_code == 0, r.output
        lines = ev.read_text().splitlines()
        assert lines[1] == "t,kind,node,src"
        assert any(",fire," in ln for ln in lines[2:])

    def test_quantiles_exclude_event_log(self, runner, tmp_path):
        r = runner.invoke(main, SIM_ARGS + ["--quantiles", "--trials", "2",
                                            "--log-events",
                                            str(tmp_path / "x.csv")])
        assert r.exit_code == 2

    def test_missing_tau_is_usage_error(self, runner):
        r = runner.invoke(main, ["simulate", "--graph", "complete:n=5",
                                 "--prc", "sf"])
        assert r.exit_code == 2
        assert "--tau" in r.output

    def test_unknown_graph_kind(self, runner):
        r = runner.invoke(main, SIM_ARGS[:2] + ["torus:n=5"] + SIM_ARGS[3:])
        assert r.exit_code == 2
        assert "unknown graph spec" in r.output

    def test_rho0_required_for_charging(self, runner):
        args = ["simulate", "--graph", "complete:n=5", "--prc", "charging",
                "--tau", "0.05", "--max-periods", "5"]
        r = runner.invoke(main, args)
        assert r.exit_code == 2
        assert "rho0" in r.output
        r = runner.invoke(main, args + ["--rho0", "0.2"])
        assert r.exit_code == 0, r.output


class TestEstimate:
    ARGS = ["estimate", "--graph", "rgg:n=20,dim=2,r=0.35", "--prc", "sf",
            "--tau", "0.05", "--estimator", "certificate", "--trials", "8",
            "--seed", "3"]

    def test_json_payload(self, runner):
        r = runner.invoke(main, self.ARGS)
        assert r.exit_code == 0, r.output
        doc = json.loads(r.output)
        assert doc["estimator"] == "certificate"
        assert doc["estimate"]["trials"] == 8
        assert doc["config"]["estimator"] == "certificate"

    def test_missing_estimator(self, runner):
        r = runner.invoke(main, self.ARGS[:7] + self.ARGS[9:])
        assert r.exit_code == 2
        assert "--estimator" in r.output

    def test_zero_trials_rejected(self, runner):
        args = [a if a != "8" else "0" for a in self.ARGS]
        r = runner.invoke(main, args)
        assert r.exit_code == 2

    def test_dead_server_is_exit_3(self, runner):
        r = runner.invoke(main, self.ARGS + ["--server",
                                             "http://127.0.0.1:9"])
        assert r.exit_code == 3
        assert "failed" in r.output


class TestBound:
    def test_delta_n_values(self, runner):
        r = runner.invoke(main, ["bound", "--s", "0.55", "--delta-n",
                                 "--p", "0.95", "--n", "400"])
        assert r.exit_code == 0, r.output
        doc = json.loads(r.output)
        assert doc["delta_n"]["value"] == pytest.approx(15.032854790357305)
        assert doc["delta_n"]["coeff_const"] == pytest.approx(5.010951596785767)

    def test_delta_n_needs_p_and_n(self, runner):
        r = runner.invoke(main, ["bound", "--s", "0.55", "--delta-n"])
        assert r.exit_code == 2

    def test_rgg_threshold_with_radius(self, runner):
        r = runner.invoke(main, ["bound", "--B", "0.55", "--tau", "0.0",
                                 "--rgg-threshold", "--n", "400", "--dim", "2"])
        assert r.exit_code == 0, r.output
        doc = json.loads(r.output)
        assert doc["rgg_threshold"]["c"] == pytest.approx(6.637486671684517)
        assert doc["rgg_threshold"]["r"] == pytest.approx(0.1778948583303864)

    def test_graph_bounds(self, runner):
        r = runner.invoke(main, ["bound", "--graph", "complete:n=5",
                                 "--B", "0.55", "--tau", "0.05", "--k", "1"])
        assert r.exit_code == 0, r.output
        doc = json.loads(r.output)
        assert len(doc["sf"]["per_node"]) == 5
        assert doc["stii"] is not None

    def test_selecting_nothing_fails(self, runner):
        r = runner.invoke(main, ["bound", "--s", "0.55"])
        assert r.exit_code == 2
        assert "selects nothing" in r.output


class TestClassify:
    def test_sf(self, runner):
        r = runner.invoke(main, ["classify", "--prc", "sf"])
        assert r.exit_code == 0, r.output
        doc = json.loads(r.output)
        assert doc["is_stii"] is True and doc["k"] == 1

    def test_degrees_list(self, runner):
        r = runner.invoke(main, ["classify", "--prc", "stii:h=2,m=3",
                                 "--degrees", "5,10"])
        assert r.exit_code == 0, r.output
        doc = json.loads(r.output)
        assert [b["d"] for b in doc["degree_bounds"]] == [5, 10]

    def test_bad_degrees(self, runner):
        r = runner.invoke(main, ["classify", "--prc", "sf",
                                 "--degrees", "a,b"])
        assert r.exit_code == 2

    def test_table_prc_from_file(self, runner, tmp_path):
        # interpolation cannot express the jump at B, so no table is a
        # member; this exercises the table: loading path, not membership
        table = tmp_path / "curve.csv"
        table.write_text("0,0\n0.5,-0.5\n1,0\n")
        r = runner.invoke(main, ["classify", "--prc", f"table:{table}",
                                 "--B", "0.55"])
        assert r.exit_code == 0, r.output
        doc = json.loads(r.output)
        assert doc["is_stii"] is False
        assert doc["config"]["prc"] == f"table:{table}"

    def test_bad_table_file(self, runner, tmp_path):
        table = tmp_path / "curve.csv"
        table.write_text("0,0\n")
        r = runner.invoke(main, ["classify", "--prc", f"table:{table}",
                                 "--B", "0.55"])
        assert r.exit_code == 2

    def test_config_prc_from_file(self, runner, tmp_path):
        cfg = tmp_path / "prc.json"
        cfg.write_text(json.dumps({"family": "stii_synthetic", "h": 2,
                                   "m": 3, "B": 0.55}))
        r = runner.invoke(main, ["classify", "--prc", f"config:{cfg}"])
        assert r.exit_code == 0, r.output
        assert json.loads(r.output)["k"] == 4


class TestSweep:
    ARGS = ["sweep", "--n", "15", "--dim", "2", "--prc", "sf",
            "--tau", "0.05", "--trials", "4", "--seed", "2"]

    def test_csv_shape(self, runner):
        r = runner.invoke(main, self.ARGS + ["--radii", "0.3,0.4"])
        assert r.exit_code == 0, r.output
        lines = r.output.splitlines()
        assert lines[1] == SWEEP_CSV_HEADER
        assert len(lines) == 2 + 2

    def test_radii_range_inclusive(self, runner):
        r = runner.invoke(main, self.ARGS + ["--radii", "0.2:0.4:0.1"])
        assert r.exit_code == 0, r.output
        rows = r.output.splitlines()[2:]
        assert [row.split(",")[0] for row in rows] == ["0.2", "0.3", "0.4"]

    def test_missing_radii(self, runner):
        r = runner.invoke(main, self.ARGS)
        assert r.exit_code == 2
        assert "radii" in r.output


class TestGenGraph:
    def test_edge_list_and_structure(self, runner, tmp_path):
        out = tmp_path / "g.csv"
        r = runner.invoke(main, ["gen-graph", "--graph", "er:n=12,p=0.4",
                                 "--seed", "5", "--out", str(out)])
        assert r.exit_code == 0, r.output
        doc = json.loads(r.output)
        assert doc["n"] == 12
        assert "strongly_connected" in doc["structure"]
        assert out.read_text().splitlines()[0] == "# n=12"

    def test_meta_out_for_rgg(self, runner, tmp_path):
        meta = tmp_path / "meta.json"
        r = runner.invoke(main, ["gen-graph", "--graph",
                                 "rgg:n=10,dim=2,r=0.4", "--seed", "1",
                                 "--meta-out", str(meta)])
        assert r.exit_code == 0, r.output
        assert len(json.loads(meta.read_text())["positions"]) == 10

    def test_meta_out_rejected_for_er(self, runner, tmp_path):
        r = runner.invoke(main, ["gen-graph", "--graph", "er:n=10,p=0.4",
                                 "--meta-out", str(tmp_path / "m.json")])
        assert r.exit_code == 2

    def test_file_graph_round_trip(self, runner, tmp_path):
        out = tmp_path / "g.csv"
        r = runner.invoke(main, ["gen-graph", "--graph", "er:n=8,p=0.5",
                                 "--seed", "4", "--out", str(out)])
        assert r.exit_code == 0
        r = runner.invoke(main, ["simulate", "--graph", f"file:{out}",
                                 "--prc", "sf", "--tau", "0.05",
                                 "--max-periods", "5"])
        assert r.exit_code == 0, r.output
        assert json.loads(r.output)["config"]["graph"] == f"file:{out}"


class TestConfigFile:
    def test_config_supplies_defaults(self, runner, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"graph": "complete:n=4", "prc": "sf",
                                   "tau": 0.1, "max_periods": 5}))
        r = runner.invoke(main, ["simulate", "--config", str(cfg)])
        assert r.exit_code == 0, r.output
        assert json.loads(r.output)["config"]["tau"] == 0.1

    def test_flag_beats_config(self, runner, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"graph": "complete:n=4", "prc": "sf",
                                   "tau": 0.1, "max_periods": 5}))
        r = runner.invoke(main, ["simulate", "--config", str(cfg),
                                 "--tau", "0.05"])
        assert r.exit_code == 0, r.output
        assert json.loads(r.output)["config"]["tau"] == 0.05

    def test_unreadable_config(self, runner, tmp_path):
        r = runner.invoke(main, ["simulate", "--config",
                                 str(tmp_path / "nope.json")])
        assert r.exit_code == 2

    def test_non_object_config(self, runner, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text("[1, 2]")
        r = runner.invoke(main, ["simulate", "--config", str(cfg)])
        assert r.exit_code == 2
        assert "JSON object" in r.output

    def test_sweep_prcs_from_config(self, runner, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "n": 12, "radii": [0.35], "tau": 0.05, "trials": 3,
            "prcs": ["sf", {"family": "stii_synthetic", "h": 1, "m": 4,
                            "B": 0.55}],
        }))
        r = runner.invoke(main, ["sweep", "--config", str(cfg)])
        assert r.exit_code == 0, r.output
        rows = r.output.splitlines()[2:]
        assert len(rows) == 2
        assert rows[0].split(",")[2] == "sf"
        assert rows[1].split(",")[2] == "stii_h1_m4"


class TestReproducibility:
    def test_simulate_reruns_byte_identical(self, runner, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert runner.invoke(main, SIM_ARGS + ["--out", str(a)]).exit_code == 0
        assert runner.invoke(main, SIM_ARGS + ["--out", str(b)]).exit_code == 0
        assert a.read_bytes() == b.read_bytes()
        assert (tmp_path / "a.summary.json").read_bytes() == \
            (tmp_path / "b.summary.json").read_bytes()

    def test_estimate_stdout_identical(self, runner):
        args = TestEstimate.ARGS
        first = runner.invoke(main, args)
        second = runner.invoke(main, args)
        assert first.output == second.output
