"""Small named complexes and curves used for demos and tests."""

from __future__ import annotations

from fractions import Fraction

from .curve import Chord, EdgePoint, Multicurve, PointCopy
from .surface import Alignment, Gluing, SideRef, SurfaceComplex

C = Alignment.COMPATIBLE
T = Alignment.TWISTED


def _glue(gid, fa, sa, fb, sb, align=C):
    return Gluing(gid, SideRef(fa, sa), SideRef(fb, sb), align)


def torus() -> SurfaceComplex:
    return SurfaceComplex((("F", 4),), (_glue("g0", "F", 0, "F", 2), _glue("g1", "F", 1, "F", 3)))


def klein_bottle() -> SurfaceComplex:
    return SurfaceComplex((("F", 4),), (_glue("g0", "F", 0, "F", 2), _glue("g1", "F", 1, "F", 3, T)))


def genus2() -> SurfaceComplex:
    pairs = [(0, 2), (1, 3), (4, 6), (5, 7)]
    return SurfaceComplex((("F", 8),), tuple(_glue(f"g{i}", "F", a, "F", b) for i, (a, b) in enumerate(pairs)))


def disk() -> SurfaceComplex:
    return SurfaceComplex((("D", 1),))


def cone_disk() -> SurfaceComplex:
    """A square with two adjacent sides folded together: a disk with one interior edge."""
    return SurfaceComplex((("D", 4),), (_glue("g0", "D", 0, "D", 1),))


def annulus() -> SurfaceComplex:
    return SurfaceComplex((("A", 4),), (_glue("g0", "A", 0, "A", 2),))


def mobius() -> SurfaceComplex:
    return SurfaceComplex((("M", 4),), (_glue("g0", "M", 0, "M", 2, T),))


def pants() -> SurfaceComplex:
    return SurfaceComplex(
        (("H1", 6), ("H2", 6)),
        tuple(_glue(f"g{i}", "H1", i, "H2", 5 - i) for i in (0, 2, 4)),
    )


def sphere() -> SurfaceComplex:
    return SurfaceComplex((("S", 2),), (_glue("g0", "S", 0, "S", 1),))


def projective_plane() -> SurfaceComplex:
    return SurfaceComplex((("P", 2),), (_glue("g0", "P", 0, "P", 1, T),))


def two_square_disk() -> SurfaceComplex:
    return SurfaceComplex((("L", 4), ("R", 4)), (_glue("g0", "L", 1, "R", 3),))


def cylinder_two_faces() -> SurfaceComplex:
    return SurfaceComplex((("U", 4), ("V", 4)), (_glue("g0", "U", 1, "V", 3), _glue("g1", "V", 1, "U", 3)))


def torus_two_faces() -> SurfaceComplex:
    return SurfaceComplex(
        (("U", 4), ("V", 4)),
        (
            _glue("g0", "U", 1, "V", 3),
            _glue("g1", "V", 1, "U", 3),
            _glue("g2", "U", 0, "U", 2),
            _glue("g3", "V", 0, "V", 2),
        ),
    )


CORPUS = {
    "torus": torus,
    "klein": klein_bottle,
    "genus2": genus2,
    "disk": disk,
    "cone_disk": cone_disk,
    "annulus": annulus,
    "mobius": mobius,
    "pants": pants,
    "sphere": sphere,
    "rp2": projective_plane,
    "two_square_disk": two_square_disk,
    "cylinder2": cylinder_two_faces,
    "torus2": torus_two_faces,
}


# ------------------------------------------------------------------- curves


def meridian(coor: str = "right") -> Multicurve:
    """Horizontal circle on the square torus: crosses the vertical gluing once."""
    c = torus()
    return Multicurve(
        c,
        (EdgePoint("p", "g1", Fraction(1, 2)),),
        (Chord("m", PointCopy("p", "b"), PointCopy("p", "a"), "F", coor),),
    )


def longitude(coor: str = "right") -> Multicurve:
    """Vertical circle on the square torus: crosses the horizontal gluing once."""
    c = torus()
    return Multicurve(
        c,
        (EdgePoint("q", "g0", Fraction(1, 2)),),
        (Chord("l", PointCopy("q", "a"), PointCopy("q", "b"), "F", coor),),
    )


def meridian_longitude() -> Multicurve:
    m, l = meridian(), longitude()
    return m.replace(points=m.points + l.points, chords=m.chords + l.chords)


def figure_eight(coor: str = "left") -> Multicurve:
    """One immersed circle with a single double point, inside the cone disk."""
    c = cone_disk()
    pts = (EdgePoint("p", "g0", Fraction(3, 10)), EdgePoint("q", "g0", Fraction(7, 10)))
    chords = (
        Chord("c1", PointCopy("p", "a"), PointCopy("q", "b"), "D", coor),
        Chord("c2", PointCopy("q", "a"), PointCopy("p", "b"), "D", coor),
    )
    return Multicurve(c, pts, chords)


def annulus_arc(coor: str = "left") -> Multicurve:
    """A relative arc joining the two boundary circles of the annulus."""
    c = annulus()
    pts = (EdgePoint("u", SideRef("A", 1), Fraction(1, 2)), EdgePoint("v", SideRef("A", 3), Fraction(1, 2)))
    return Multicurve(c, pts, (Chord("k", PointCopy("u"), PointCopy("v"), "A", coor),), relative=True)


def klein_one_sided() -> Multicurve:
    """The meridian chord drawn through the twisted gluing of the Klein bottle."""
    c = klein_bottle()
    return Multicurve(
        c,
        (EdgePoint("p", "g1", Fraction(1, 2)),),
        (Chord("m", PointCopy("p", "b"), PointCopy("p", "a"), "F", "left"),),
    )
