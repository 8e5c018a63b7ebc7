import io
from pathlib import Path

import numpy as np
import pytest

from contactlab import models
from contactlab.cli.main import main, run
from contactlab.cli.scene import parse_scene
from contactlab.cli.tasks import emit_plane_field_grid
from contactlab.contact import StrictContactManifold
from contactlab.errors import SceneError
from contactlab.geometry import Chart, DifferentialForm, ManifoldSpec

STANDARD = """
[manifold r3]
coords = x, y, z
coeff(z) = 1
coeff(y) = x

[task verify-contact]
manifold = r3
"""


def write(tmp_path, text, name="s.scene"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_standard_scene_passes(tmp_path, capsys):
    code = main(["run", str(write(tmp_path, STANDARD)), "--out", str(tmp_path / "out")])
    assert code == 0
    line = capsys.readouterr().out.strip()
    assert line.startswith("TASK verify-contact-1 PASS max_residual=")
    report = (tmp_path / "out" / "verify-contact-1.txt").read_text()
    assert "is_contact: true" in report
    assert (tmp_path / "out" / "summary.txt").read_text().strip() == line


def test_failed_check_exits_one_and_keeps_reports(tmp_path):
    text = STANDARD + "\n[task verify-contact]\nname = wrong\nmanifold = r3\nexpect = false\n"
    assert run(write(tmp_path, text), tmp_path / "out", stream=io.StringIO()) == 1
    assert (tmp_path / "out" / "verify-contact-1.txt").exists()
    assert "FAIL" in (tmp_path / "out" / "wrong.txt").read_text()


@pytest.mark.parametrize("line, col", [("coeff(z) = 1 +", 15), ("coeff(z) = 1 + w", 16), ("coeff(z) = (1", 14)])
def test_malformed_expression_exits_two_with_position(tmp_path, capsys, line, col):
    text = STANDARD.replace("coeff(z) = 1", line)
    path = write(tmp_path, text)
    assert run(path, tmp_path / "out") == 2
    err = capsys.readouterr().err
    assert err.startswith(f"{path}:4:{col}:")


@pytest.mark.parametrize("text, msg", [
    ("[task frobnicate]\n", "unknown task kind"),
    ("[manifold]\n", "needs a name"),
    ("x = 1\n", "unknown global option"),
    ("[task reeb]\nmanifold = nowhere\n", "unknown manifold"),
    ("[manifold m]\ncatalog = standard\nn = 0\n", "n must be at least 1"),
    ("[task lens]\np = two\nq = 1\n", "expected an integer"),
])
def test_resolution_errors(tmp_path, capsys, text, msg):
    assert run(write(tmp_path, text), tmp_path / "out") == 2
    assert msg in capsys.readouterr().err


def test_option_precedence(tmp_path, monkeypatch):
    text = "samples = 7\n" + STANDARD
    path = write(tmp_path, text)
    monkeypatch.setenv("CONTACTLAB_SAMPLES", "11")
    main(["run", str(path), "--out", str(tmp_path / "a")])
    assert "samples: 11" in (tmp_path / "a" / "verify-contact-1.txt").read_text()
    main(["run", str(path), "--out", str(tmp_path / "b"), "--samples", "13"])
    assert "samples: 13" in (tmp_path / "b" / "verify-contact-1.txt").read_text()
    monkeypatch.delenv("CONTACTLAB_SAMPLES")
    main(["run", str(path), "--out", str(tmp_path / "c")])
    assert "samples: 7" in (tmp_path / "c" / "verify-contact-1.txt").read_text()


def test_torus_reeb_task(tmp_path):
    text = """
[manifold T]
catalog = torus_family
n = 2

[task reeb]
manifold = T
expect(0) = 0
expect(1) = cos(2*t)
expect(2) = sin(2*t)
"""
    assert run(write(tmp_path, text), tmp_path / "out", stream=io.StringIO()) == 0
    report = (tmp_path / "out" / "reeb-1.txt").read_text()
    dev = float(report.split("closed_form_deviation: ")[1].split()[0])
    assert dev < 1e-12


def test_scene_parser_columns():
    scene = parse_scene("[manifold m]\n  coeff(z)   =   x + 1\n")
    e = scene.sections[0].entries[0]
    assert (e.key, e.arg, e.value, e.line, e.column) == ("coeff", "z", "x + 1", 2, 18)
    with pytest.raises(SceneError):
        parse_scene("[manifold m]\njunk\n")


def standard_r3():
    return models.build("standard", n=1).manifold


def test_plane_grid_shape_and_horizontal_planes_at_x0():
    text, flagged = emit_plane_field_grid(standard_r3(), [(-2, 2)] * 3, 9)
    lines = text.strip().splitlines()
    assert lines[0] == "x,y,z,u1x,u1y,u1z,u2x,u2y,u2z" and len(lines) == 730 and flagged == 0
    data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    alpha = np.stack([np.zeros(len(data)), data[:, 0], np.ones(len(data))], axis=1)  # (dx, dy, dz) coefficients
    for u in (data[:, 3:6], data[:, 6:9]):
        np.testing.assert_allclose(np.einsum("pi,pi->p", alpha, u), 0.0, atol=1e-14)
        np.testing.assert_allclose(np.linalg.norm(u, axis=1), 1.0, atol=1e-14)
    np.testing.assert_allclose(np.einsum("pi,pi->p", data[:, 3:6], data[:, 6:9]), 0.0, atol=1e-14)
    at0 = data[data[:, 0] == 0.0]
    assert len(at0) == 81
    np.testing.assert_allclose(at0[:, 5], 0.0, atol=1e-15)
    np.testing.assert_allclose(at0[:, 8], 0.0, atol=1e-15)


def test_plane_grid_single_point_at_centre():
    text, _ = emit_plane_field_grid(standard_r3(), [(0, 2), (-1, 1), (4, 6)], 1)
    rows = text.strip().splitlines()[1:]
    assert len(rows) == 1 and rows[0].startswith("1,0,5,")


def test_plane_grid_flags_degenerate_points():
    chart = Chart(("x", "y", "z"))
    a = DifferentialForm.from_coefficients(chart, {"z": 1.0, "y": "x^3"})
    M = StrictContactManifold(ManifoldSpec(chart), a, "degenerate")
    with pytest.warns(UserWarning, match="NaN"):
        text, flagged = emit_plane_field_grid(M, [(-1, 1)] * 3, 3)
    assert flagged == 9
    nan_rows = [ln for ln in text.splitlines()[1:] if "nan" in ln]
    assert len(nan_rows) == 9 and all(ln.startswith("0,") for ln in nan_rows)


SCENES = sorted((Path(__file__).resolve().parent.parent / "scenes").glob("*.scene"))


@pytest.mark.parametrize("scene", SCENES, ids=lambda p: p.stem)
def test_scene_corpus_passes(scene, tmp_path):
    out = io.StringIO()
    assert run(scene, tmp_path, stream=out) == 0, out.getvalue()
