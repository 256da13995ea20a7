import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from archetypal.cli import main
from archetypal.fixtures import write_fixture


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def run(argv, capsys):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr().err


@pytest.fixture(scope="module")
def fixture_dir(tmp_path_factory, triangle_fx, nba2d_fx, soccer_fx):
    d = tmp_path_factory.mktemp("fixtures")
    for fx in (triangle_fx, nba2d_fx, soccer_fx):
        write_fixture(fx, d)
    return d


@pytest.fixture(scope="module")
def triangle_model(fixture_dir, tmp_path_factory):
    out = tmp_path_factory.mktemp("tri_fit")
    code = main(["fit", "--input", str(fixture_dir / "triangle.csv"), "--label-column", "Name",
                 "--k", "3", "--out-dir", str(out)])
    assert code == 0
    return out / "model.json"


class TestFit:
    def test_k1_gives_column_means(self, fixture_dir, nba2d_fx, tmp_path, capsys):
        code, _ = run(["fit", "--input", fixture_dir / "nba2d.csv", "--label-column", "Name",
                       "--k", 1, "--restarts", 2, "--out-dir", tmp_path], capsys)
        assert code == 0
        doc = json.loads((tmp_path / "model.json").read_text())
        np.testing.assert_allclose(doc["archetypes_original"][0], nba2d_fx.data.values.mean(axis=0), rtol=1e-6)
        assert doc["row_labels"][0] == nba2d_fx.data.row_labels[0]
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert manifest["selected_columns"] == ["Min", "FGM"]
        assert manifest["fit_config"]["k"] == 1 and manifest["scaling_method"] == "zscore"

    def test_triangle_model_recovers_vertices(self, triangle_model):
        doc = json.loads(triangle_model.read_text())
        Z = np.array(doc["archetypes_original"])
        assert doc["rss"] <= 1e-6
        assert sorted(map(tuple, np.round(Z, 6))) == [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0)]

    def test_seed_from_environment(self, fixture_dir, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("ARCHETYPES_SEED", "17")
        run(["fit", "--input", fixture_dir / "triangle.csv", "--k", 2, "--out-dir", tmp_path], capsys)
        assert json.loads((tmp_path / "manifest.json").read_text())["fit_config"]["seed"] == 17
        monkeypatch.setenv("ARCHETYPES_SEED", "abc")
        code, err = run(["fit", "--input", fixture_dir / "triangle.csv", "--k", 2, "--out-dir", tmp_path], capsys)
        assert code == 2 and "ARCHETYPES_SEED" in err

    def test_constant_column_warning_recorded(self, tmp_path, capsys):
        path = tmp_path / "flat.csv"
        path.write_text("a,b\n1,5\n2,5\n4,5\n")
        code, _ = run(["fit", "--input", path, "--k", 2, "--out-dir", tmp_path / "o"], capsys)
        assert code == 0
        assert any("b" in w for w in json.loads((tmp_path / "o" / "model.json").read_text())["warnings"])


class TestErrors:
    @pytest.mark.parametrize(
        "argv",
        [
            [],
            ["fit", "--k", "3"],
            ["fit", "--input", "x.csv", "--k", "three", "--out-dir", "o"],
            ["fit", "--input", "x.csv", "--k", "3", "--out-dir", "o", "--scale", "log"],
        ],
    )
    def test_usage(self, argv, capsys):
        code, err = run(argv, capsys)
        assert code == 2
        assert json.loads(err)["error"] == "usage"

    def test_missing_file(self, tmp_path, capsys):
        code, err = run(["fit", "--input", tmp_path / "nope.csv", "--k", 2, "--out-dir", tmp_path], capsys)
        doc = json.loads(err)
        assert code == 3 and doc["exit_code"] == 3 and "not found" in doc["message"]

    def test_bad_cell(self, tmp_path, capsys):
        path = tmp_path / "bad.csv"
        path.write_text("a,b\n1,2\n3,x\n")
        code, err = run(["fit", "--input", path, "--columns", "a,b", "--k", 1, "--out-dir", tmp_path], capsys)
        assert code == 3 and "line 3" in json.loads(err)["message"]

    def test_k_too_large_is_configuration_error(self, fixture_dir, tmp_path, capsys):
        code, err = run(["fit", "--input", fixture_dir / "triangle.csv", "--k", 50, "--out-dir", tmp_path], capsys)
        assert code == 2 and json.loads(err)["error"] == "configuration"

    def test_fit_failure_exit_code(self, fixture_dir, tmp_path, capsys, monkeypatch):
        import archetypal.cli as cli
        from archetypal.errors import FitError

        def failing(data, config):
            raise FitError("every start failed")

        monkeypatch.setattr(cli, "fit", failing)
        code, err = run(["fit", "--input", fixture_dir / "triangle.csv", "--k", 2, "--out-dir", tmp_path], capsys)
        assert code == 4 and json.loads(err)["error"] == "FitError"


class TestScree:
    def test_triangle(self, fixture_dir, tmp_path, capsys):
        code, _ = run(["scree", "--input", fixture_dir / "triangle.csv", "--k-max", 5,
                       "--restarts", 3, "--out-dir", tmp_path], capsys)
        assert code == 0
        rows = read_rows(tmp_path / "scree.csv")
        rss = [float(r["rss"]) for r in rows]
        assert [int(r["k"]) for r in rows] == [1, 2, 3, 4, 5]
        assert rss[2] <= 1e-6 and np.all(np.diff(rss) <= 1e-9)
        assert json.loads((tmp_path / "elbow.json").read_text())["suggested_k"] == 3

    def test_two_points_has_no_elbow(self, fixture_dir, tmp_path, capsys):
        code, _ = run(["scree", "--input", fixture_dir / "triangle.csv", "--k-max", 2,
                       "--restarts", 1, "--out-dir", tmp_path], capsys)
        assert code == 0
        assert json.loads((tmp_path / "elbow.json").read_text())["suggested_k"] is None


class TestAnalytics:
    def test_profile(self, fixture_dir, triangle_model, tmp_path, capsys):
        code, _ = run(["profile", "--model", triangle_model, "--input", fixture_dir / "triangle.csv",
                       "--out-dir", tmp_path], capsys)
        assert code == 0
        rows = read_rows(tmp_path / "percentiles.csv")
        assert len(rows) == 3
        assert max(float(r["x"]) for r in rows) == 100.0
        assert max(float(r["y"]) for r in rows) == 100.0

    def test_assign_default_tables(self, fixture_dir, triangle_model, tmp_path, capsys):
        code, _ = run(["assign", "--model", triangle_model, "--input", fixture_dir / "triangle.csv",
                       "--out-dir", tmp_path], capsys)
        assert code == 0
        rows = read_rows(tmp_path / "assignments.csv")
        assert len(rows) == 23 and rows[0]["Name"] == "P01"
        sums = [sum(float(r[f"alpha_{j}"]) for j in (1, 2, 3)) for r in rows]
        np.testing.assert_allclose(sums, 1.0, atol=1e-12)
        nearest = read_rows(tmp_path / "nearest.csv")
        assert sorted(r["Name"] for r in nearest) == ["P01", "P02", "P03"]

    def test_assign_threshold_cohort(self, fixture_dir, triangle_fx, triangle_model, tmp_path, capsys):
        Z = np.array(json.loads(triangle_model.read_text())["archetypes_original"])
        archetype = int(np.argmin(np.linalg.norm(Z - [1.0, 0.0], axis=1))) + 1
        code, _ = run(["assign", "--model", triangle_model, "--input", fixture_dir / "triangle.csv",
                       "--archetype", archetype, "--threshold", 0.8, "--out-dir", tmp_path], capsys)
        assert code == 0
        names = {r["Name"] for r in read_rows(tmp_path / "cohort.csv")}
        labels = triangle_fx.data.row_labels
        assert names == {labels[i] for i in np.flatnonzero(triangle_fx.weights[:, 1] > 0.8)}

    def test_assign_pair_and_sample(self, fixture_dir, nba2d_fx, tmp_path, capsys):
        fit_dir = tmp_path / "fit"
        run(["fit", "--input", fixture_dir / "nba2d.csv", "--label-column", "Name", "--k", 3,
             "--restarts", 2, "--out-dir", fit_dir], capsys)
        code, _ = run(["assign", "--model", fit_dir / "model.json", "--input", fixture_dir / "nba2d.csv",
                       "--pair", "1,2", "--out-dir", tmp_path], capsys)
        assert code == 0
        rows = read_rows(tmp_path / "composition.csv")
        # the observation at archetype 1 always qualifies
        assert rows
        assert all(float(r["alpha_3"]) <= 0.005 for r in rows)
        assert all(float(r["alpha_1"]) > float(r["alpha_2"]) for r in rows)
        assert {"Team", "Role"} <= set(rows[0])
        code, _ = run(["assign", "--model", fit_dir / "model.json", "--input", fixture_dir / "nba2d.csv",
                       "--sample", 5, "--seed", 1, "--out-dir", tmp_path / "s"], capsys)
        assert code == 0 and len(read_rows(tmp_path / "s" / "assignments.csv")) == 5

    @pytest.mark.parametrize(
        "extra",
        [["--archetype", "1"], ["--archetype", "9", "--threshold", "0.5"], ["--pair", "1"],
         ["--pair", "1,1"], ["--archetype", "1", "--threshold", "2"]],
    )
    def test_assign_usage_errors(self, fixture_dir, triangle_model, tmp_path, capsys, extra):
        code, _ = run(["assign", "--model", triangle_model, "--input", fixture_dir / "triangle.csv",
                       "--out-dir", tmp_path, *extra], capsys)
        assert code == 2

    def test_row_count_mismatch(self, triangle_model, tmp_path, capsys):
        path = tmp_path / "short.csv"
        path.write_text("Name,x,y\nA,0,0\n")
        code, err = run(["profile", "--model", triangle_model, "--input", path, "--out-dir", tmp_path], capsys)
        assert code == 3 and "rows" in json.loads(err)["message"]

    def test_ternary(self, triangle_model, tmp_path, capsys):
        code, _ = run(["ternary", "--model", triangle_model, "--out-dir", tmp_path], capsys)
        assert code == 0
        rows = read_rows(tmp_path / "ternary.csv")
        assert len(rows) == 23
        corners = {(round(float(r["x"]), 9), round(float(r["y"]), 9)) for r in rows[:3]}
        assert corners == {(0.0, 0.0), (1.0, 0.0), (0.5, round(np.sqrt(3) / 2, 9))}

    def test_ternary_needs_three(self, fixture_dir, tmp_path, capsys):
        run(["fit", "--input", fixture_dir / "triangle.csv", "--k", 2, "--restarts", 1,
             "--out-dir", tmp_path], capsys)
        code, err = run(["ternary", "--model", tmp_path / "model.json", "--out-dir", tmp_path], capsys)
        assert code == 2 and "k = 3" in json.loads(err)["message"]


class TestHull:
    def test_with_overlay(self, fixture_dir, triangle_model, tmp_path, capsys):
        code, _ = run(["hull", "--input", fixture_dir / "triangle.csv", "--label-column", "Name",
                       "--model", triangle_model, "--out-dir", tmp_path], capsys)
        assert code == 0
        rows = read_rows(tmp_path / "hull.csv")
        hull = [r for r in rows if r["kind"] == "hull"]
        overlay = [r for r in rows if r["kind"] == "archetype"]
        assert {r["label"] for r in hull} == {"P01", "P02", "P03"}
        assert len(overlay) == 3 and {r["position"] for r in overlay} <= {"on", "inside"}

    def test_three_columns_rejected(self, fixture_dir, tmp_path, capsys):
        code, err = run(["hull", "--input", fixture_dir / "soccer.csv", "--columns", "Attack,Defence,Balance",
                         "--out-dir", tmp_path], capsys)
        assert code == 2 and "exactly 2" in json.loads(err)["message"]


def test_module_entry_point(fixture_dir, tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "archetypal", "hull", "--input", str(fixture_dir / "triangle.csv"),
         "--out-dir", str(tmp_path)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "hull.csv").exists()
