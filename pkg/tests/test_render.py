import xml.etree.ElementTree as ET

from quasitopy import catalog
from quasitopy.curve import Multicurve
from quasitopy.metric_lab import LatticeMetric, unit_ball_probe
from quasitopy.render import RenderOptions, plot_unit_ball, plot_volume_sweep, render_svg
from quasitopy.resolver import resolve

NS = "{http://www.w3.org/2000/svg}"


def _crossings(svg):
    root = ET.fromstring(svg)
    return [e for e in root.iter() if e.get("class") == "crossing"]


def test_crossing_marked_then_gone():
    m = catalog.meridian_longitude()
    assert len(_crossings(render_svg(m.complex, m))) == 1
    r = resolve(m)
    assert _crossings(render_svg(r.complex, r)) == []


def test_empty_curve_draws_faces_only():
    c = catalog.pants()
    svg = render_svg(c, Multicurve(c))
    root = ET.fromstring(svg)
    assert not [e for e in root.iter() if e.get("class") in ("chord", "crossing")]
    texts = " ".join(t.text or "" for t in root.iter(NS + "text"))
    assert "H1" in texts and "H2" in texts


def test_twisted_sides_are_labelled():
    svg = render_svg(catalog.klein_bottle())
    assert "~" in svg


def test_output_is_deterministic():
    m = catalog.figure_eight()
    opts = RenderOptions(columns=1)
    assert render_svg(m.complex, m, opts) == render_svg(m.complex, m, opts)


def test_plots_are_reproducible(tmp_path):
    rows = [(0.1, 4.0, 3.7), (0.2, 4.0, 3.4)]
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    plot_volume_sweep(rows, 2, str(a))
    plot_volume_sweep(rows, 2, str(b))
    assert a.read_bytes() == b.read_bytes()
    png = tmp_path / "ball.png"
    plot_unit_ball(unit_ball_probe(LatticeMetric(), 64), str(png))
    assert png.read_bytes()[:4] == b"\x89PNG"
