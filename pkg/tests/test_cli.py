import json
import math

import pandas as pd
import pytest

from app.cli import main
from app.services.cohomology import BRANCH_COLUMNS
from app.services.reports import HISTORY_COLUMNS


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def error_payload(err):
    lines = [line for line in err.splitlines() if line.startswith("{")]
    return json.loads(lines[-1])


class TestCounterexample:
    def test_defaults(self, capsys):
        code, out, _ = run(capsys, "counterexample")
        assert code == 0
        report = json.loads(out)
        row = report["rows"][0]
        assert row["constant_angle"] == pytest.approx(9 * math.pi / 4, abs=1e-12)
        assert row["arg"] == pytest.approx(math.pi / 4, abs=1e-12)
        assert row["in_p"] and row["in_k"] == "no"
        assert report["counterexample_found"]

    def test_surface_sweep(self, capsys):
        code, out, _ = run(capsys, "counterexample", "--n", "2", "--sweep", "-2", "2", "5")
        report = json.loads(out)
        assert code == 0
        assert [row["A"] for row in report["rows"]] == pytest.approx([-2, -1, 0, 1, 2])
        assert not report["counterexample_found"]

    def test_huge_A_gives_a_verdict(self, capsys):
        code, out, _ = run(capsys, "counterexample", "--n", "6", "--A", "1e60")
        assert code == 0
        row = json.loads(out)["rows"][0]
        assert not row["in_p"] and row["in_k"] == "no"

    def test_infinite_A_is_an_input_error(self, capsys):
        code, out, err = run(capsys, "counterexample", "--A", "inf")
        assert code == 2
        assert out == ""
        assert error_payload(err)["error"] == "ValueError"


class TestAngle:
    def test_counterexample_class(self, capsys, torus_file):
        code, out, _ = run(capsys, "angle", torus_file(3, -1.0))
        assert code == 0
        assert json.loads(out)["arg"] == pytest.approx(math.pi / 4)

    def test_zero_form(self, capsys, write_manifold):
        code, out, _ = run(capsys, "angle", write_manifold({"n": 3, "intersection": [1, 0, 0, 0]}))
        report = json.loads(out)
        assert code == 0
        assert report["arg"] == pytest.approx(-math.pi / 2)
        assert not report["supercritical"]

    def test_zero_volume(self, capsys, write_manifold):
        code, _, err = run(capsys, "angle", write_manifold({"n": 3, "intersection": [3, 1, 1, 3]}))
        assert code == 3
        assert error_payload(err)["error"] == "ZeroVolume"

    def test_malformed_file(self, capsys, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        code, out, err = run(capsys, "angle", str(path))
        assert code == 2
        assert out == ""
        assert error_payload(err)["error"] == "ManifoldFileError"

    def test_missing_file(self, capsys, tmp_path):
        code, _, _ = run(capsys, "angle", str(tmp_path / "absent.json"))
        assert code == 2

    def test_invalid_numbers(self, capsys, write_manifold):
        code, _, _ = run(capsys, "angle", write_manifold({"n": 2, "intersection": [0, 1, 1]}))
        assert code == 2


class TestGammaTrack:
    def test_root_is_an_obstruction(self, capsys, write_manifold):
        code, out, _ = run(
            capsys, "gamma-track", write_manifold({"n": 3, "intersection": [3, 1, 1, 3]})
        )
        report = json.loads(out)
        assert code == 4
        assert report["obstruction"]
        assert report["roots"] == pytest.approx([1.0], abs=1e-8)

    def test_root_on_surface_is_a_warning(self, capsys, write_manifold):
        code, out, _ = run(
            capsys, "gamma-track", write_manifold({"n": 2, "intersection": [1, 0, 1]})
        )
        report = json.loads(out)
        assert code == 0
        assert not report["obstruction"]
        assert report["roots"] == pytest.approx([1.0], abs=1e-8)
        assert report["warnings"]

    def test_lifted_angle_and_csv(self, capsys, torus_file, tmp_path):
        csv = tmp_path / "branch.csv"
        code, out, _ = run(
            capsys, "gamma-track", torus_file(3, 1.0), "--samples", "32", "--csv", str(csv)
        )
        report = json.loads(out)
        assert code == 0
        assert report["theta_end"] == pytest.approx(3 * math.pi / 4, abs=1e-10)
        frame = pd.read_csv(csv)
        assert list(frame.columns) == BRANCH_COLUMNS
        assert len(frame) == report["samples"]
        assert frame["theta"].iloc[-1] == pytest.approx(report["theta_end"], abs=1e-12)

    def test_lifted_angle_past_two_pi(self, capsys, torus_file):
        code, out, _ = run(capsys, "gamma-track", torus_file(3, -1.0))
        report = json.loads(out)
        assert code == 0
        assert report["theta_end"] == pytest.approx(9 * math.pi / 4, abs=1e-10)
        assert report["chern_inequality"] is False
        assert not report["im_monotone"]["sign_definite"]


class TestCjyCheck:
    def test_in_p(self, capsys, torus_file):
        code, out, _ = run(capsys, "cjy-check", torus_file(3, -1.0))
        assert code == 0
        assert json.loads(out)["verdict"]["in_p"]

    def test_negative_curve(self, capsys, write_manifold):
        data = {
            "n": 2,
            "intersection": [1, 1, 1],
            "subvarieties": [{"name": "C", "p": 1, "restricted": [1, -10]}],
        }
        code, out, _ = run(capsys, "cjy-check", write_manifold(data), "--tmax", "5")
        report = json.loads(out)
        assert code == 4
        assert report["verdict"]["margins"]["C"] == pytest.approx(-10.0)
        assert report["monotone"] == {"C": True}

    def test_degenerate_angle(self, capsys, write_manifold):
        code, out, err = run(capsys, "cjy-check", write_manifold({"n": 2, "intersection": [1, 0, 2]}))
        report = json.loads(out)
        assert code == 3
        assert report["family"] is None
        assert error_payload(err)["error"] == "DegenerateAngle"


class TestSolveTorus:
    def test_solve_with_history(self, capsys, torus_file, tmp_path):
        path = torus_file(
            1,
            1.0,
            grid=16,
            psi_modes=[{"wave": [1, 0], "amplitude": 1.0}],
            psi_amplitude=0.3,
        )
        csv = tmp_path / "history.csv"
        code, out, _ = run(capsys, "solve-torus", path, "--steps", "2", "--csv", str(csv))
        report = json.loads(out)
        assert code == 0
        assert report["converged"]
        assert report["achieved_constant"] == pytest.approx(math.pi / 4, abs=1e-9)
        frame = pd.read_csv(csv)
        assert list(frame.columns) == HISTORY_COLUMNS
        assert len(frame) == sum(len(r["history"]) for r in report["reports"])

    def test_explicit_theta_on_finer_grid(self, capsys, torus_file):
        code, out, _ = run(
            capsys, "solve-torus", torus_file(1, 1.0, grid=8), "--theta", str(math.pi / 4), "--grid", "32"
        )
        report = json.loads(out)
        assert code == 0
        assert report["grid"] == 32
        assert report["theta_source"] == "given"

    def test_wrong_constant_stalls(self, capsys, torus_file):
        code, _, err = run(
            capsys, "solve-torus", torus_file(1, 1.0, grid=16), "--theta", str(math.pi / 4 + 0.1)
        )
        payload = error_payload(err)
        assert code == 5
        assert payload["error"] == "ContinuationStalled"
        assert payload["reports"]

    def test_lifted_constant(self, capsys, torus_file):
        path = torus_file(2, -1.0, grid=4)
        code, _, err = run(capsys, "solve-torus", path)
        assert code == 2
        assert error_payload(err)["error"] == "NotSupercritical"

        code, out, _ = run(capsys, "solve-torus", path, "--lifted")
        assert code == 0
        assert json.loads(out)["achieved_constant"] == pytest.approx(1.5 * math.pi)

    def test_bad_theta_argument(self, torus_file):
        with pytest.raises(SystemExit):
            main(["solve-torus", torus_file(1, 1.0, grid=8), "--theta", "pi"])

    def test_grid_above_the_point_cap(self, capsys, torus_file):
        code, out, err = run(capsys, "solve-torus", torus_file(2, 1.0, grid=8), "--grid", "4096")
        assert code == 2
        assert out == ""
        assert "MAX_GRID_POINTS" in error_payload(err)["detail"]


@pytest.mark.parametrize("tmax", ["-1", "0", "nan"])
def test_tmax_must_be_positive(tmax, write_manifold):
    path = write_manifold({"n": 2, "intersection": [1, 1, 1]})
    with pytest.raises(SystemExit):
        main(["cjy-check", path, "--tmax", tmax])
