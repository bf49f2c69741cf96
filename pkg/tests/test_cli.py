import json
import subprocess
import sys

import numpy as np
import pytest

from gtspline.cli import main
from gtspline.classify import classification_report
from gtspline.tmesh import anchors, load_mesh


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


# -- check -------------------------------------------------------------------------------


def test_check_tensor_fixture(fixture_path, capsys):
    code, out, _ = run(["check", "--input", fixture_path("tensor_4x4")], capsys)
    report = json.loads(out)
    assert code == 0
    assert report["admissible"] and report["ad_plus"] and report["vmcr"]
    assert report["analysis_suitable"] and report["dual_compatible"]
    assert report["weakly_dc_types"] == ["LD", "LU", "RD", "RU"]


def test_check_corner_step(fixture_path, tmp_path, capsys):
    target = tmp_path / "report.json"
    code, _, _ = run(["check", "--input", fixture_path("corner_step_03"), "--output", target], capsys)
    report = json.loads(target.read_text())
    assert code == 0
    assert report["vmcr"] is True
    assert "LU" in report["weakly_dc_types"]
    assert report["dual_compatible"] is False


def test_check_truncated_file(fixture_path, tmp_path, capsys):
    broken = tmp_path / "broken.json"
    broken.write_text(fixture_path("tensor_4x4").read_text()[:120])
    code, _, err = run(["check", "--input", broken], capsys)
    assert code == 2
    assert "line" in err and "column" in err


def test_check_missing_file(tmp_path, capsys):
    code, _, err = run(["check", "--input", tmp_path / "nope.json"], capsys)
    assert code == 2
    assert "cannot read" in err


def test_check_malformed_partition(fixture_path, capsys):
    code, _, _ = run(["check", "--input", fixture_path("malformed_overlap")], capsys)
    assert code == 2


def test_check_not_admissible(fixture_path, capsys):
    code, out, _ = run(["check", "--input", fixture_path("not_admissible")], capsys)
    assert code == 3
    assert json.loads(out)["admissible"] is False


def test_check_writes_figure(fixture_path, tmp_path, capsys):
    fig = tmp_path / "mesh.png"
    code, _, _ = run(["check", "--input", fixture_path("extension_demo"), "--figure", fig], capsys)
    assert code == 0
    assert fig.read_bytes()[:4] == b"\x89PNG"


# -- matrix ------------------------------------------------------------------------------------


def matrix_summary(out):
    header, row = out.strip().splitlines()[-2:]
    return dict(zip(header.split(","), row.split(",")))


def test_matrix_tensor_fixture(fixture_path, capsys):
    code, out, _ = run(["matrix", "--input", fixture_path("tensor_4x4")], capsys)
    info = matrix_summary(out)
    assert code == 0
    assert info["n"] == info["n_hat"] == "16"
    assert info["full_rank"] == "true"


def test_matrix_patterns_match_across_flavors(fixture_path, tmp_path, capsys):
    dumps = {}
    for flavor in ("gb", "poly"):
        pat = tmp_path / f"{flavor}.txt"
        code, _, _ = run(["matrix", "--input", fixture_path("corner_step_02"), "--flavor", flavor,
                          "--pattern", pat, "--output", tmp_path / f"{flavor}.csv"], capsys)
        assert code == 0
        dumps[flavor] = pat.read_text()
    assert dumps["gb"] == dumps["poly"]
    assert (tmp_path / "gb.csv").read_text().startswith("anchor,")


def test_matrix_three_junction_fixture_full_rank(fixture_path, tmp_path, capsys):
    fig = tmp_path / "pattern.png"
    code, out, _ = run(["matrix", "--input", fixture_path("wdc_rd_ru"), "--figure", fig], capsys)
    info = matrix_summary(out)
    assert code == 0
    assert info["full_rank"] == "true" and info["pattern_void"] == "true"
    assert fig.exists()


def test_matrix_rejects_non_admissible(fixture_path, capsys):
    code, _, _ = run(["matrix", "--input", fixture_path("not_admissible")], capsys)
    assert code == 3


def test_matrix_rejects_bad_tolerance(fixture_path, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["matrix", "--input", str(fixture_path("tensor_4x4")), "--rank-tol", "-1"])
    assert exc.value.code == 2


# -- refine ---------------------------------------------------------------------------------------


def test_refine_zero_steps(tmp_path, capsys):
    code, _, _ = run(["refine", "--steps", 0, "--output", tmp_path], capsys)
    assert code == 0
    assert [p.name for p in tmp_path.iterdir()] == ["step_00.json"]


def test_refine_four_steps_classify(tmp_path, capsys):
    code, _, _ = run(["refine", "--steps", 4, "--output", tmp_path, "--figure", tmp_path / "last.png"], capsys)
    assert code == 0
    files = sorted(tmp_path.glob("step_*.json"))
    assert len(files) == 5
    for k, path in enumerate(files):
        report = classification_report(*load_mesh(path))
        assert report["vmcr"] is True
        assert report["dual_compatible"] is (k == 0)


def test_refine_step_limit(tmp_path, capsys):
    code, _, err = run(["refine", "--steps", 9, "--output", tmp_path], capsys)
    assert code == 2
    assert "limit" in err


# -- surface --------------------------------------------------------------------------------------


def test_surface_helicoid_error_line(tmp_path, capsys):
    target = tmp_path / "helicoid.csv"
    code, out, _ = run(["surface", "--shape", "helicoid", "--r1", 0.5, "--r2", 1, "--omega", 3,
                        "--output", target], capsys)
    assert code == 0
    err = float(out.strip().split(",")[1])
    assert err <= 1e-6
    assert len(target.read_text().splitlines()) == 101 * 101 + 1


def test_surface_polynomial_flavor_is_worse(capsys):
    code, _, err_text = run(["surface", "--shape", "helicoid", "--flavor", "poly", "--resolution", 21], capsys)
    assert code == 0
    assert float(err_text.strip().split(",")[1]) >= 1e-3


def test_surface_constant_net(fixture_path, tmp_path, capsys):
    mesh, _ = load_mesh(fixture_path("wdc_rd_ru"))
    n = len(anchors(mesh))
    net = tmp_path / "net.json"
    net.write_text(json.dumps({"points": [[1.0, 2.0, 3.0]] * n, "weights": list(np.linspace(1, 2, n))}))
    target = tmp_path / "out.csv"
    code, _, _ = run(["surface", "--input", fixture_path("wdc_rd_ru"), "--net", net, "--resolution", 5,
                      "--output", target], capsys)
    assert code == 0
    rows = np.array([[float(v) for v in line.split(",")] for line in target.read_text().splitlines()[1:]])
    assert rows.shape == (25, 5)
    assert np.abs(rows[:, 2:] - [1.0, 2.0, 3.0]).max() <= 1e-12


def test_surface_resolution_two(fixture_path, tmp_path, capsys):
    net = tmp_path / "net.json"
    net.write_text(json.dumps({"points": [[0.0, 0.0, 1.0]] * 16}))
    code, out, _ = run(["surface", "--input", fixture_path("tensor_4x4"), "--net", net, "--resolution", 2], capsys)
    lines = out.strip().splitlines()
    assert code == 0
    assert lines[0] == "s,t,x,y,z"
    assert len(lines) == 5


def test_surface_obj_and_figure(tmp_path, capsys):
    obj = tmp_path / "spring.obj"
    fig = tmp_path / "spring.png"
    code, _, _ = run(["surface", "--shape", "spring", "--resolution", 15, "--output", obj, "--figure", fig], capsys)
    assert code == 0
    text = obj.read_text()
    assert text.startswith("v ") and "\nf " in text
    assert fig.exists()


def test_surface_net_size_mismatch(fixture_path, tmp_path, capsys):
    net = tmp_path / "net.json"
    net.write_text(json.dumps({"points": [[0.0, 0.0, 0.0]] * 3}))
    code, _, err = run(["surface", "--input", fixture_path("tensor_4x4"), "--net", net], capsys)
    assert code == 2
    assert "anchors" in err


def test_surface_needs_a_source(capsys):
    code, _, _ = run(["surface"], capsys)
    assert code == 2


def test_surface_rejects_tiny_resolution():
    with pytest.raises(SystemExit):
        main(["surface", "--shape", "helicoid", "--resolution", "1"])


# -- random ------------------------------------------------------------------------------------------


def test_random_mesh_reproducible(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(["random", "--seed", 4, "--output", a, "--ad-plus"], capsys)
    run(["random", "--seed", 4, "--output", b, "--ad-plus"], capsys)
    assert a.read_text() == b.read_text()
    assert classification_report(*load_mesh(a))["ad_plus"] is True


def test_module_entry_point(fixture_path):
    proc = subprocess.run([sys.executable, "-m", "gtspline.cli", "check", "--input", str(fixture_path("tensor_4x4"))],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["vmcr"] is True
