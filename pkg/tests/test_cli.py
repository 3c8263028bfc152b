import re
import subprocess
import sys
from pathlib import Path

import pytest

from quasitopy import catalog
from quasitopy.cli import main
from quasitopy.curve import count_crossings
from quasitopy.invariants import class_vector
from quasitopy.qsc import parse, serialize
from quasitopy.surface import evaluation_basis

SAMPLES = Path(__file__).resolve().parent.parent / "samples"
ML = str(SAMPLES / "ml.qsc")


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def test_crossings_on_ml(capsys):
    code, out, _ = run(capsys, "crossings", ML)
    assert code == 0
    assert "total: 1" in out
    assert out.rstrip().endswith("rho_mod2: 1")


def test_class_on_ml(capsys):
    code, out, _ = run(capsys, "class", ML)
    assert (code, out) == (0, "(1, 1)\n")


def test_norm_example(capsys):
    code, out, _ = run(capsys, "norm", "--class", "3,4")
    assert (code, out) == (0, "5.000000000\n")
    code, out, _ = run(capsys, "norm", "--class", "6,8", "-v")
    assert "2 parallel closed geodesic(s) of class (3, 4)" in out


def test_resolve_writes_embedded_curve(capsys, tmp_path):
    dest = tmp_path / "r.qsc"
    code, out, _ = run(capsys, "resolve", ML, "-o", dest)
    assert code == 0 and "smoothings: 1" in out
    _, m, _ = parse(dest.read_text())
    assert count_crossings(m) == 0
    assert class_vector(m, evaluation_basis(m.complex)).values == (1, 1)
    code, out, _ = run(capsys, "crossings", dest)
    assert "total: 0" in out


def test_realize_and_flip(capsys, tmp_path):
    torus = SAMPLES / "torus.qsc"
    dest = tmp_path / "m.qsc"
    assert run(capsys, "realize", torus, "--class", "2,-3", "-o", dest)[0] == 0
    assert run(capsys, "class", dest)[1] == "(2, -3)\n"
    flipped = tmp_path / "f.qsc"
    run(capsys, "flip", dest, "-o", flipped)
    assert run(capsys, "class", flipped)[1] == "(-2, 3)\n"


def test_bsigma_and_validate(capsys):
    code, out, _ = run(capsys, "bsigma", SAMPLES / "fig8.qsc")
    assert code == 0 and "1" in out
    code, out, _ = run(capsys, "validate", ML)
    assert code == 0 and out.startswith("complex: ok")


def test_info(capsys):
    code, out, _ = run(capsys, "info", SAMPLES / "genus2.qsc")
    assert code == 0
    assert re.search(r"euler_characteristic\D+-2", out)


def test_bsum(capsys, tmp_path):
    disk = tmp_path / "d.qsc"
    disk.write_text("face D 2\n")
    code, out, _ = run(capsys, "bsum", disk, disk, "--side1", "D.0", "--side2", "D.1", "-o", tmp_path / "s.qsc")
    assert code == 0
    code, out, _ = run(capsys, "info", tmp_path / "s.qsc")
    assert re.search(r"euler_characteristic\D+1\b", out)


def test_perturb_random_is_deterministic(capsys):
    torus = SAMPLES / "torus.qsc"
    a = run(capsys, "perturb", torus, "--random", "--seed", "4", "--kinks", "1")
    b = run(capsys, "perturb", torus, "--random", "--seed", "4", "--kinks", "1")
    assert a == b and a[0] == 0
    assert "# expected_crossings:" in a[1]


def test_perturb_kink(capsys, tmp_path):
    src = tmp_path / "m.qsc"
    src.write_text(serialize(catalog.torus(), catalog.meridian()))
    dest = tmp_path / "k.qsc"
    assert run(capsys, "perturb", src, "--kink", "m:g0", "-o", dest)[0] == 0
    assert "rho_mod2: 1" in run(capsys, "crossings", dest)[1]


def test_localmodel_and_flow(capsys, tmp_path):
    code, out, _ = run(capsys, "localmodel", "--q", "2", "--eps", "0,0.25")
    assert code == 0 and "2.264180787" in out and "4.000000000" in out
    plot = tmp_path / "flow.png"
    code, out, _ = run(capsys, "flow", "--steps", "5", "--plot", plot)
    assert code == 0 and plot.stat().st_size > 0


def test_ball(capsys, tmp_path):
    plot = tmp_path / "ball.svg"
    code, out, _ = run(capsys, "ball", "--lattice", "2,0,0,1", "--plot", plot)
    assert code == 0
    assert "strictly_convex: yes" in out
    assert plot.read_text().lstrip().startswith("<?xml")


def test_render_to_file(capsys, tmp_path):
    dest = tmp_path / "ml.svg"
    assert run(capsys, "render", ML, "-o", dest)[0] == 0
    assert dest.read_text().count('class="crossing"') == 1


def test_error_exit_codes(capsys, tmp_path):
    bad = tmp_path / "bad.qsc"
    bad.write_text("face F 4\ncurve\npoint p g0 1.5\n")
    code, _, err = run(capsys, "validate", bad)
    assert code == 1 and "line 3" in err
    assert run(capsys, "validate", tmp_path / "missing.qsc")[0] == 1
    assert run(capsys, "realize", SAMPLES / "torus.qsc", "--class", "1")[0] == 2
    klein = tmp_path / "k.qsc"
    klein.write_text(serialize(catalog.klein_bottle()))
    code, _, err = run(capsys, "realize", klein, "--class", "1")
    assert code == 1 and "NON_ORIENTABLE_INTEGER_TARGET" in err
    assert run(capsys, "norm", "--class", "x,y")[0] == 2
    assert run(capsys, "nosuchcommand")[0] == 2
    assert run(capsys, "class")[0] == 2


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "quasitopy.cli", "class", ML], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0 and proc.stdout == "(1, 1)\n"
