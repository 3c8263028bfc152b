from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from conftest import seeded_curve
from quasitopy import catalog
from quasitopy.curve import crossing_report, validate_curve
from quasitopy.errors import QscSyntaxError
from quasitopy.qsc import format_rank, parse, parse_rank, serialize
from quasitopy.surface import evaluation_basis, validate_complex

SAMPLES = Path(__file__).resolve().parent.parent / "samples"

TORUS_WITH_MERIDIAN = """\
# square torus with its meridian
face F 4
glue g0 F.0 F.2 compatible
glue g1 F.1 F.3 compatible
curve
point p g1 0.5
chord m p:b p:a F right
"""


def test_small_document():
    c, m, paths = parse(TORUS_WITH_MERIDIAN)
    assert c == catalog.torus()
    assert m == catalog.meridian()
    assert paths == []
    assert validate_complex(c).euler_characteristic == 0


@pytest.mark.parametrize("path", sorted(SAMPLES.glob("*.qsc")), ids=lambda p: p.stem)
def test_samples_roundtrip(path):
    text = path.read_text()
    c, m, paths = parse(text)
    validate_complex(c)
    if m is not None:
        validate_curve(m)
    assert serialize(c, m, paths) == text


@pytest.mark.parametrize(
    "m",
    [catalog.meridian_longitude(), catalog.figure_eight(), catalog.annulus_arc(), catalog.klein_one_sided()],
    ids=["ml", "fig8", "arc", "klein"],
)
def test_catalog_roundtrip(m):
    c, back, _ = parse(serialize(m.complex, m))
    assert c == m.complex
    assert back == m


@pytest.mark.parametrize("seed", range(8))
def test_random_curve_roundtrip_with_paths(seed):
    m = seeded_curve(seed)
    for mode in ("absolute", "relative"):
        basis = evaluation_basis(m.complex, mode)
        text = serialize(m.complex, m, basis)
        c, back, paths = parse(text)
        assert set(back.points) == set(m.points)
        assert set(back.chords) == set(m.chords)
        assert [(p.steps, p.kind, p.start, p.end) for p in paths] == [(p.steps, p.kind, p.start, p.end) for p in basis]
        assert crossing_report(back).crossings == crossing_report(m).crossings
        assert serialize(c, back, paths) == text


def test_serialize_is_canonical():
    m = catalog.meridian_longitude()
    shuffled = m.replace(points=m.points[::-1], chords=m.chords[::-1])
    assert serialize(m.complex, shuffled) == serialize(m.complex, m)


def test_self_glued_steps_name_their_side():
    c = catalog.torus()
    text = serialize(c, None, evaluation_basis(c))
    assert "F>g0:a" in text or "F>g0:b" in text


@pytest.mark.parametrize(
    "text,line,token",
    [
        ("face F 4\ncurve\npoint p g0 1.5\n", 3, "1.5"),
        ("face F 4\nglue g0 F.0 F.2 sideways\n", 2, "sideways"),
        ("face F x\n", 1, "x"),
        ("point p g0 0.5\n", 1, "point"),
        ("face F 4\nglue g0 F.0\n", 2, "<end of line>"),
        ("face F 4 5\n", 1, "5"),
        ("banana\n", 1, "banana"),
    ],
)
def test_syntax_errors_are_positioned(text, line, token):
    with pytest.raises(QscSyntaxError) as e:
        parse(text)
    assert (e.value.line, e.value.token) == (line, token)
    assert e.value.code == "SYNTAX_ERROR"
    assert f"line {line}" in str(e.value)


def test_rank_column():
    with pytest.raises(QscSyntaxError) as e:
        parse("face F 4\ncurve\npoint p g0 1.5\n")
    assert e.value.column == 12


def test_rank_text():
    assert format_rank(Fraction(1, 2)) == "0.5"
    assert format_rank(Fraction(3, 8)) == "0.375"
    assert format_rank(Fraction(1, 3)) == "1/3"
    for bad in ("0", "1", "1.0", "-0.5", "2/2", "abc", "1e-3"):
        assert parse_rank(bad) is None


@given(st.fractions(min_value=0, max_value=1, max_denominator=10**6).filter(lambda r: 0 < r < 1))
def test_rank_roundtrip(r):
    assert parse_rank(format_rank(r)) == r
