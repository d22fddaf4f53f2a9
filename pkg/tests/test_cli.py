import csv
import json

import numpy as np
import pytest

from lv4 import cli
from lv4.emit import read_ppm

FIG1A_FP = (3333.3, 1666.7, 277.78, 83.333)


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def write_config(tmp_path, data, name="run.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def fig1a_params():
    return {
        "r": [1.5, 1.5], "K": [1e4, 1e4], "s": [0.01, 0.01], "p": [0.3, 0.3],
        "E": [[0.3, 0.3], [0.2, 0.5]], "Q": [[0.02, 0.02], [0.02, 0.02]],
    }


def assert_one_line_error(err, kind):
    lines = err.strip().splitlines()
    assert len(lines) == 1
    assert json.loads(lines[0])["error"] == kind


class TestSimulate:
    def test_fig1a_converges(self, tmp_path, capsys):
        code, _, _ = run(capsys, "simulate", "--preset", "fig1a", "--generations", "5000",
                         "--out", str(tmp_path), "--no-plot")
        assert code == 0
        rows = read_csv(tmp_path / "trajectory.csv")
        assert rows[0] == ["generation", "x1", "x2", "X1", "X2"]
        assert len(rows) == 5002
        np.testing.assert_allclose([float(v) for v in rows[-1][1:]], FIG1A_FP, rtol=0.01)
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert summary["persistence"]["collapse_generation"] is None
        assert summary["generations_completed"] == 5000

    def test_zero_generations(self, tmp_path, capsys):
        code, _, _ = run(capsys, "simulate", "--preset", "fig1a", "--generations", "0",
                         "--out", str(tmp_path), "--no-plot")
        assert code == 0
        rows = read_csv(tmp_path / "trajectory.csv")
        assert rows[1:] == [["0", "100.0", "100.0", "100.0", "100.0"]]

    def test_writes_figure(self, tmp_path, capsys):
        run(capsys, "simulate", "--preset", "fig1b", "--generations", "50", "--out", str(tmp_path))
        assert (tmp_path / "trajectory.png").read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"

    def test_fig1f_collapse_window(self, tmp_path, capsys):
        run(capsys, "simulate", "--preset", "fig1f", "--generations", "1000", "--out", str(tmp_path), "--no-plot")
        summary = json.loads((tmp_path / "summary.json").read_text())
        g = summary["persistence"]["collapse_generation"]
        assert g is not None and 400 <= g <= 900

    def test_blowup_exit_code(self, tmp_path, capsys):
        params = fig1a_params() | {"K": ["inf", "inf"], "E": [[0, 0], [0, 0]]}
        cfg = write_config(tmp_path, {"params": params, "init": [1, 1, 1, 1], "generations": 1000})
        code, _, err = run(capsys, "simulate", "--config", cfg, "--out", str(tmp_path), "--no-plot")
        assert code == 3
        assert_one_line_error(err, "blowup")
        assert (tmp_path / "trajectory.csv").exists()

    def test_params_need_init(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {"params": fig1a_params()})
        code, _, err = run(capsys, "simulate", "--config", cfg, "--out", str(tmp_path))
        assert code == 2
        assert_one_line_error(err, "config")

    def test_repeat_is_byte_identical(self, tmp_path, capsys):
        outputs = []
        for sub in ("a", "b"):
            run(capsys, "simulate", "--preset", "fig1c", "--generations", "300",
                "--out", str(tmp_path / sub), "--no-plot")
            outputs.append([(tmp_path / sub / f).read_bytes() for f in ("trajectory.csv", "summary.json")])
        assert outputs[0] == outputs[1]


class TestClassify:
    def test_fig1a(self, tmp_path, capsys):
        code, out, _ = run(capsys, "classify", "--preset", "fig1a", "--out", str(tmp_path))
        assert code == 0
        report = json.loads(out)
        assert report["class"] == "Stable"
        assert report["fixed_point"]["positive"] is True
        assert len(report["eigenvalues"]) == 4
        assert all(set(z) == {"re", "im", "modulus"} for z in report["eigenvalues"])
        assert json.loads((tmp_path / "classify.json").read_text()) == report

    def test_fig1b(self, tmp_path, capsys):
        _, out, _ = run(capsys, "classify", "--preset", "fig1b", "--out", str(tmp_path))
        report = json.loads(out)
        assert report["class"] == "Unstable"
        assert 1 < report["spectral_radius"] < 1.1

    def test_no_search(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {"params": fig1a_params() | {"s": [0, 0]}})
        _, out, _ = run(capsys, "classify", "--config", cfg, "--out", str(tmp_path))
        assert json.loads(out)["class"] in ("NonPositive", "NoUniqueFixedPoint")


class TestDiagram:
    def test_smallest_grid(self, tmp_path, capsys):
        code, _, _ = run(capsys, "diagram", "--preset", "fig4a", "--resolution", "2",
                         "--out", str(tmp_path), "--no-plot")
        assert code == 0
        rows = read_csv(tmp_path / "grid.csv")
        assert rows[0] == ["h1", "h2", "class", "rho"]
        assert [(r[0], r[1]) for r in rows[1:]] == [("0.25", "0.25"), ("0.25", "0.75"),
                                                    ("0.75", "0.25"), ("0.75", "0.75")]

    @pytest.mark.parametrize("n", [3, 17])
    def test_image_dimensions(self, tmp_path, capsys, n):
        run(capsys, "diagram", "--preset", "fig1a", "--resolution", str(n), "--out", str(tmp_path), "--no-plot")
        assert read_ppm((tmp_path / "diagram.ppm").read_bytes()).shape == (n, n, 3)

    def test_fig4a_image_symmetric(self, tmp_path, capsys):
        run(capsys, "diagram", "--preset", "fig4a", "--resolution", "40", "--out", str(tmp_path), "--no-plot")
        img = read_ppm((tmp_path / "diagram.ppm").read_bytes())
        # pixel (row n-1-j, column i) holds cell (i, j); transposition is the anti-diagonal flip
        assert np.array_equal(img, img[::-1, ::-1].transpose(1, 0, 2))

    def test_colours(self, tmp_path, capsys):
        # the normalized fig1a template has both stable and unstable cells
        cfg = write_config(tmp_path, {"params": fig1a_params() | {"s": [0.006, 0.007]}, "resolution": 20})
        run(capsys, "diagram", "--config", cfg, "--out", str(tmp_path), "--no-plot")
        img = read_ppm((tmp_path / "diagram.ppm").read_bytes())
        rows = read_csv(tmp_path / "grid.csv")[1:]
        for idx, (_, _, kind, rho) in enumerate(rows):
            i, j = divmod(idx, 20)
            px = tuple(img[19 - j, i])
            if kind == "Stable":
                assert px == (255, 0, 0)
            elif kind == "Unstable":
                level = round(200 * (2 - min(max(float(rho), 1.0), 2.0)))
                assert px == (level, level, level)
            else:
                assert px == (255, 255, 255)
        assert any(r[2] == "Stable" for r in rows)

    def test_writes_figure(self, tmp_path, capsys):
        run(capsys, "diagram", "--preset", "fig4a", "--resolution", "10", "--out", str(tmp_path))
        assert (tmp_path / "diagram.png").read_bytes()[:4] == b"\x89PNG"

    def test_fig5b_stable_cells_off_centre(self, tmp_path, capsys):
        run(capsys, "diagram", "--preset", "fig5b", "--resolution", "100", "--out", str(tmp_path), "--no-plot")
        stable = [float(r[0]) for r in read_csv(tmp_path / "grid.csv")[1:] if r[2] == "Stable"]
        assert stable
        assert not any(0.45 <= h1 <= 0.55 for h1 in stable)

    def test_repeat_is_byte_identical(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {"preset": "fig3a", "resolution": 25, "plot": False})
        blobs = []
        for sub in ("a", "b"):
            run(capsys, "diagram", "--config", cfg, "--out", str(tmp_path / sub))
            blobs.append([(tmp_path / sub / f).read_bytes() for f in ("grid.csv", "diagram.ppm")])
        assert blobs[0] == blobs[1]


class TestNormalize:
    def test_example(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {"params": fig1a_params()})
        code, out, _ = run(capsys, "normalize", "--config", cfg, "--out", str(tmp_path))
        assert code == 0
        report = json.loads(out)
        np.testing.assert_allclose(report["normalized"]["E"], [[0.5, 0.5], [2 / 7, 5 / 7]], rtol=1e-15)
        np.testing.assert_allclose(report["normalized"]["s"], [0.006, 0.007], rtol=1e-15)
        inv = report["invariance"]
        assert inv["identical"] is True
        assert inv["before"] == inv["after"]

    def test_normalized_input_unchanged(self, tmp_path, capsys):
        params = fig1a_params() | {"E": [[1.0, 0.0], [0.25, 0.75]]}
        cfg = write_config(tmp_path, {"params": params})
        _, out, _ = run(capsys, "normalize", "--config", cfg, "--out", str(tmp_path))
        report = json.loads(out)
        assert report["normalized"] == report["params"]

    def test_zero_row(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {"params": fig1a_params() | {"E": [[0.3, 0.3], [0, 0]]}})
        code, _, err = run(capsys, "normalize", "--config", cfg, "--out", str(tmp_path))
        assert code == 4
        assert_one_line_error(err, "normalize")


class TestPresets:
    def test_listing(self, capsys):
        code, out, _ = run(capsys, "presets")
        assert code == 0
        names = [line.split("\t")[0] for line in out.splitlines()]
        assert len(names) == 21
        assert len(set(names)) == 21
        assert "fig1a" in names


class TestConfigErrors:
    @pytest.mark.parametrize(
        "data",
        [
            {"preset": "fig1a", "params": fig1a_params()},
            {"preset": "nope"},
            {},
            {"preset": "fig1a", "bogus": 1},
            {"preset": "fig1a", "generations": -1},
            {"preset": "fig1a", "resolution": 1},
            {"preset": "fig1a", "init": [1, 2]},
            {"params": fig1a_params() | {"p": [1.5, 0.3]}},
            [1, 2, 3],
        ],
    )
    def test_exit_2(self, tmp_path, capsys, data):
        cfg = write_config(tmp_path, data)
        code, _, err = run(capsys, "classify", "--config", cfg, "--out", str(tmp_path))
        assert code == 2
        assert_one_line_error(err, "config")

    def test_bad_json(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        code, _, err = run(capsys, "classify", "--config", str(path))
        assert code == 2
        assert_one_line_error(err, "config")

    def test_unknown_subcommand(self, capsys):
        code, _, err = run(capsys, "explode")
        assert code == 2
        assert_one_line_error(err, "config")

    def test_flag_overrides_file(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {"preset": "fig1a", "generations": 10})
        run(capsys, "simulate", "--config", cfg, "--generations", "3", "--out", str(tmp_path), "--no-plot")
        assert len(read_csv(tmp_path / "trajectory.csv")) == 5
