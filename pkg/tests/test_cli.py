import json
import subprocess
import sys

import pytest

from ixfootprint.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_project_and_unproject_round_trip(capsys):
    code, out, _ = run(capsys, "project", "150", "80")
    assert code == 0
    g = json.loads(out)
    assert g["camera"] == "cam1" and g["in_frame"] is True
    code, out, _ = run(capsys, "unproject", str(g["x"]), str(g["y"]))
    p = json.loads(out)
    assert p["c"] == pytest.approx(150, abs=1e-9) and p["r"] == pytest.approx(80, abs=1e-9)


def test_camera_selection(capsys):
    _, a, _ = run(capsys, "project", "0", "0")
    _, b, _ = run(capsys, "project", "0", "0", "--camera", "cam2")
    assert json.loads(a)["x"] != json.loads(b)["x"]
    code, _, err = run(capsys, "project", "0", "0", "--camera", "nope")
    assert code == 1 and "nope" in err


def test_jacobian(capsys):
    code, out, _ = run(capsys, "jacobian", "100", "50")
    doc = json.loads(out)
    assert code == 0
    assert doc["flagged"] == []
    assert len(doc["analytic"]) == 2 and len(doc["analytic"][0]) == 8


def test_propagate_budget_sums(capsys):
    code, out, _ = run(capsys, "propagate", "100", "50", "--preset", "Basler1", "--preset", "BW-Cube1",
                       "--confidence", "p95")
    doc = json.loads(out)
    assert code == 0
    assert [r["preset"] for r in doc["results"]] == ["Basler1", "BW-Cube1"]
    for r in doc["results"]:
        assert sum(b["var_x"] for b in r["budget"]) == pytest.approx(r["covariance"][0][0], rel=1e-9)
        assert r["ellipse"]["k"] == pytest.approx(2.4477468306808166)


def test_footprint(capsys):
    code, out, _ = run(capsys, "footprint", "--center", "20", "-8", "--yaw-deg", "30")
    doc = json.loads(out)
    assert code == 0
    res = doc["results"][0]
    assert len(res["corners"]) == 4
    assert res["largest_point"]["semi_major_1sigma"] == max(c["ellipse"]["semi_major"] for c in res["corners"])


def test_trajectory_outputs(tmp_path, capsys):
    svg = tmp_path / "t.svg"
    code, out, _ = run(capsys, "trajectory", "--svg", str(svg))
    assert code == 0
    assert out.splitlines()[0].startswith("s,camera,preset,report")
    assert svg.read_text().count("<ellipse") > 0
    code, out, _ = run(capsys, "trajectory", "--report", "corners", "--preset", "Basler1")
    assert code == 0
    assert {line.split(",")[3] for line in out.splitlines()[1:]} == {"corner0", "corner1", "corner2", "corner3"}


def test_calib_stats(tmp_path, capsys):
    src = tmp_path / "c.csv"
    rows = ["board_id,detected_u,detected_v,reprojected_u,reprojected_v"]
    for b, (u0, v0) in enumerate(((2, 2), (10, 3))):
        for du in (0, 5):
            for dv in (0, 5):
                rows.append(f"b{b},{u0 + du},{v0 + dv},{u0 + du + 0.3},{v0 + dv + 0.4}")
    src.write_text("\n".join(rows) + "\n")
    grid, cover, summary = tmp_path / "g.csv", tmp_path / "cov.csv", tmp_path / "s.json"
    code, _, _ = run(capsys, "calib-stats", str(src), "--width", "20", "--height", "10",
                     "--out", str(grid), "--coverage-out", str(cover), "--summary-out", str(summary))
    assert code == 0
    doc = json.loads(summary.read_text())
    assert doc["reprojection"]["global_mean_error"] == pytest.approx(0.5)
    assert doc["reprojection"]["observations"] == 8
    assert grid.read_text().startswith("cell_row,cell_col,count,mean_error\n")
    assert len(cover.read_text().splitlines()) == 1 + 2 * 4
    code, out, err = run(capsys, "calib-stats", str(src), "--width", "20", "--height", "10")
    assert json.loads(err)["coverage"]["cells"] == 8


def test_mc_validate_small(capsys):
    code, out, _ = run(capsys, "mc-validate", "150", "80", "--samples", "100000", "--seed", "4")
    doc = json.loads(out)
    assert code == 0
    assert doc["seed"] == 4
    assert all(r["max_discrepancy_over_trace"] < 0.02 for r in doc["results"])


def test_exit_codes(tmp_path, capsys):
    assert run(capsys, "bogus")[0] == 1
    assert run(capsys, "project", "x", "0")[0] == 1
    assert run(capsys, "project", "0", "-600")[0] == 2  # above the horizon
    assert run(capsys, "unproject", "-20", "20")[0] == 2  # behind the camera
    assert run(capsys, "project", "0", "0", "--config", str(tmp_path / "missing.json"))[0] == 3
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert run(capsys, "project", "0", "0", "--config", str(bad))[0] == 1
    assert run(capsys, "propagate", "0", "0", "--preset", "nope")[0] == 1
    assert run(capsys, "calib-stats", str(tmp_path / "none.csv"), "--width", "1", "--height", "1")[0] == 3


def _cli(*argv):
    return subprocess.run([sys.executable, "-m", "ixfootprint.cli", *argv], check=True, capture_output=True)


@pytest.mark.parametrize("argv", [
    ("trajectory", "--report", "corners"),
    ("mc-validate", "150", "80", "--samples", "200000", "--seed", "3", "--workers", "2"),
])
def test_repeat_runs_are_byte_identical(tmp_path, argv):
    a, b = tmp_path / "a", tmp_path / "b"
    _cli(*argv, "--out", str(a))
    _cli(*argv, "--out", str(b))
    assert a.read_bytes() == b.read_bytes()
    assert a.stat().st_size > 0
