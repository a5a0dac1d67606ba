import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lvniche.cli import main
from lvniche.dynamics import SimulationProtocol, Trajectory, simulate
from lvniche.model import CompetitionModel, PopulationState
from lvniche.scenario import (
    BUNDLED,
    Scenario,
    ScenarioError,
    bundled_scenario,
    parse_scenario,
    read_trajectory_csv,
    serialize_scenario,
    write_trajectory_csv,
)


def doc(**overrides):
    d = json.loads(serialize_scenario(bundled_scenario("unca_2species")))
    d.update(overrides)
    return d


class TestParse:
    def test_unca(self):
        sc = bundled_scenario("unca_2species")
        assert sc.model.K.tolist() == [26, 32]
        assert sc.model.alpha.tolist() == [[1, 0.25], [1, 1]]
        assert sc.model.r.tolist() == [1, 1]
        assert sc.initial.N.tolist() == [24, 8]

    def test_nova_k31(self):
        sc = bundled_scenario("nova_k31")
        assert sc.model.K.tolist() == [26, 32, 31]
        assert sc.model.alpha.tolist() == [[1, 0.25, 0.25], [1, 1, 0.7], [1, 0.3, 1]]
        assert (sc.protocol.steps, sc.protocol.step, sc.protocol.method) == (15000, 0.01, "euler")
        assert sc.initial.N.tolist() == [24, 8, 24]

    @pytest.mark.parametrize("name", BUNDLED)
    def test_all_bundled_load(self, name):
        assert isinstance(bundled_scenario(name), Scenario)

    def test_diagonal_error(self):
        d = doc(alpha=[[0.9, 0.25], [1, 1]])
        with pytest.raises(ScenarioError, match=r"alpha\[0\]\[0\]"):
            parse_scenario(json.dumps(d))

    def test_syntax_error_has_line(self):
        with pytest.raises(ScenarioError, match="line 3"):
            parse_scenario('{\n  "title": "x",\n  "species": [,]\n}')

    @pytest.mark.parametrize(
        "mutate, match",
        [
            (lambda d: d.update(extra=1), "unknown"),
            (lambda d: d["species"][1].update(color="red"), r"species\[1\]: unknown"),
            (lambda d: d["species"][0].pop("K"), r"species\[0\]: missing"),
            (lambda d: d["species"][1].update(K="32"), r"species\[1\]\.K"),
            (lambda d: d["species"][1].update(K=0), "capacity"),
            (lambda d: d["species"][0].update(N0=-1), "N0"),
            (lambda d: d["sim"].update(method="heun"), "sim.method"),
            (lambda d: d["sim"].update(steps=1.5), "sim.steps"),
            (lambda d: d["sim"].update(record_every=0), "sim"),
            (lambda d: d.update(alpha=[[1, 0.25]]), "alpha"),
            (lambda d: d["species"][1].update(name="external"), "duplicate"),
        ],
    )
    def test_schema_errors(self, mutate, match):
        d = doc()
        mutate(d)
        with pytest.raises(ScenarioError, match=match):
            parse_scenario(json.dumps(d))


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_parse_serialize_identity(n, seed):
    rng = np.random.default_rng(seed)
    alpha = rng.uniform(0, 2, (n, n))
    np.fill_diagonal(alpha, 1.0)
    model = CompetitionModel([f"u{i}" for i in range(n)], rng.uniform(0.1, 3, n), rng.uniform(1, 100, n), alpha)
    steps = int(rng.integers(1, 5000))
    sc = Scenario(
        model,
        PopulationState(rng.uniform(0, 50, n)),
        SimulationProtocol(str(rng.choice(["euler", "rk4"])), float(rng.uniform(1e-3, 1)), steps, int(rng.integers(1, steps + 1))),
        "random scenario",
    )
    back = parse_scenario(serialize_scenario(sc))
    assert back == sc


class TestCsv:
    def test_single_row(self):
        traj = Trajectory(np.array([0.0]), np.array([[24.0, 8.0]]))
        assert write_trajectory_csv(traj, ["external", "unca"]) == "t,external,unca\n0,24,8\n"

    def test_round_trip(self, nova):
        traj = simulate(nova(29.0), PopulationState([24, 8, 24]), SimulationProtocol("euler", 0.01, 500, 7))
        names, back = read_trajectory_csv(write_trajectory_csv(traj, ["external", "unca", "nova"]))
        assert names == ["external", "unca", "nova"]
        assert np.max(np.abs(back.N - traj.N)) <= 1e-6 and np.max(np.abs(back.t - traj.t)) <= 1e-9

    def test_name_mismatch(self):
        with pytest.raises(ValueError):
            write_trajectory_csv(Trajectory(np.array([0.0]), np.array([[1.0, 2.0]])), ["a"])

    def test_k16_final_row(self, scenario):
        sc = scenario("nova_k16")
        text = write_trajectory_csv(simulate(sc.model, sc.initial, sc.protocol), sc.model.species_names)
        last = text.rstrip("\n").split("\n")[-1].split(",")
        assert float(last[0]) == pytest.approx(15.0) and float(last[3]) < 1.0


class TestCli:
    def test_simulate(self, tmp_path, capsys):
        out = tmp_path / "k16.csv"
        assert main(["simulate", "--scenario", "nova_k16", "--out", str(out)]) == 0
        names, traj = read_trajectory_csv(out.read_text())
        assert names == ["external", "unca", "nova"] and traj.final.N[2] < 1

    def test_simulate_overrides(self, tmp_path):
        out = tmp_path / "u.csv"
        assert main(["simulate", "--scenario", "unca_2species", "--out", str(out), "--method", "rk4", "--steps", "5", "--record-every", "1"]) == 0
        _, traj = read_trajectory_csv(out.read_text())
        assert len(traj) == 6 and traj.final.N.tolist() == [24, 8]

    def test_scenario_file_path(self, tmp_path):
        path = tmp_path / "s.json"
        path.write_text(serialize_scenario(bundled_scenario("tehuacan_k1_plus10")))
        out = tmp_path / "o.csv"
        assert main(["simulate", "--scenario", str(path), "--out", str(out), "--steps", "10"]) == 0

    def test_failure_leaves_no_output(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(doc(alpha=[[0.9, 0.25], [1, 1]])))
        out = tmp_path / "o.csv"
        assert main(["simulate", "--scenario", str(bad), "--out", str(out)]) != 0
        assert not out.exists()
        assert "alpha[0][0]" in capsys.readouterr().err
        assert list(tmp_path.iterdir()) == [bad]

    def test_equilibria_json(self, capsys):
        assert main(["equilibria", "--scenario", "unca_2species", "--format", "json"]) == 0
        d = json.loads(capsys.readouterr().out)
        assert d["regime"] == "STABLE_COEXISTENCE"
        assert [e["stable"] for e in d["equilibria"]] == [False, False, False, True]
        assert d["equilibria"][3]["state"] == pytest.approx([24, 8])

    def test_equilibria_table(self, capsys):
        assert main(["equilibria", "--scenario", "nova_k31"]) == 0
        out = capsys.readouterr().out
        assert out.count("stable") >= 8 and "{external, unca, nova}" in out

    def test_sensitivity_flags_discrepancies(self, capsys):
        assert main(["sensitivity", "--scenario", "unca_2species", "--species", "2"]) == 0
        out = capsys.readouterr().out
        assert "8.42667" in out and "published unca* = 8.42 [agrees" in out
        assert "8.31894" in out and "published unca* = 8.29 [DISCREPANCY]" in out
        assert "+2.3437%" in out and "-3.1579%" in out
        assert "published -3.5% [DISCREPANCY]" in out

    def test_sweep(self, tmp_path):
        out = tmp_path / "sweep.csv"
        rc = main(["sweep", "--scenario", "nova_k16", "--param", "K[3]", "--from", "16", "--to", "32", "--points", "3", "--steps", "1500", "--out", str(out)])
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[0].startswith("K[3],external,unca,nova,settled,extinct_external")
        assert len(lines) == 4 and lines[1].startswith("16,")

    def test_sweep_bad_param(self, tmp_path, capsys):
        out = tmp_path / "s.csv"
        assert main(["sweep", "--scenario", "nova_k16", "--param", "K[4]", "--from", "1", "--to", "2", "--points", "2", "--out", str(out)]) == 2
        assert not out.exists()

    def test_estimate(self, capsys):
        assert main(["estimate", "--income-fraction", "0.25"]) == 0
        out = capsys.readouterr().out
        assert "alpha[1][2] = 0.25" in out and "alpha[2][1] = 1" in out
        assert main(["estimate", "--pop-ratio", "8966", "30004"]) == 0
        assert "0.298827" in capsys.readouterr().out

    def test_estimate_invalid(self, capsys):
        assert main(["estimate", "--income-fraction", "1.5"]) != 0

    def test_missing_file(self, tmp_path, capsys):
        assert main(["equilibria", "--scenario", str(tmp_path / "nope.json")]) != 0


def test_console_script(tmp_path):
    import shutil
    import subprocess

    exe = shutil.which("lvniche")
    if exe is None:
        pytest.skip("package not installed")
    res = subprocess.run([exe, "estimate", "--income-fraction", "0.2131"], capture_output=True, text=True)
    assert res.returncode == 0 and "0.2131" in res.stdout
    res = subprocess.run([exe, "equilibria", "--scenario", str(tmp_path / "missing.json")], capture_output=True, text=True)
    assert res.returncode != 0 and "error" in res.stderr
